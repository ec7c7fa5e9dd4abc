#include "holocorr/iteration.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include "holocorr/point_index.hpp"

namespace holocorr {

FiberIteration::FiberIteration(const Correspondence& f, const SpherePointd& start, Side side, Options options)
    : f_(f), side_(side), options_(options) {
  if (!(options_.caps.dedup_radius > 0.0)) throw PreconditionError("dedup radius must be positive");
  if (options_.caps.max_atoms == 0) throw PreconditionError("max_atoms must be positive");
  levels_.push_back({TracedAtom{start, 1.0, -1, -1}});
}

std::span<const TracedAtom> FiberIteration::level(int n) const {
  if (!options_.keep_history) {
    if (n != depth_) throw PreconditionError("fiber iteration history was not kept");
    return levels_.back();
  }
  return levels_.at(static_cast<std::size_t>(n));
}

bool FiberIteration::capped_by(int n) const { return first_capped_level_ >= 0 && first_capped_level_ <= n; }

void FiberIteration::advance() {
  const std::vector<TracedAtom>& from = levels_.back();
  std::vector<Fiber> fibers(from.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options_.workers, static_cast<unsigned>(from.size())));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fibers[i] = image(f_, from[i].point, side_, options_.roots);
  };
  if (workers <= 1) {
    work(0, from.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (from.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk, e = std::min(from.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  // Sequential merge in atom order keeps the result independent of workers.
  std::vector<TracedAtom> next;
  PointIndex index(options_.caps.dedup_radius);
  for (std::size_t i = 0; i < from.size(); ++i) {
    for (const auto& fp : fibers[i]) {
      const double w = from[i].weight * fp.multiplicity * options_.weight_scale;
      if (auto hit = index.find_within(fp.point, options_.caps.dedup_radius)) {
        next[*hit].weight += w;
      } else {
        index.insert(fp.point);
        next.push_back({fp.point, w, static_cast<std::int32_t>(i), fp.component});
      }
    }
  }

  if (next.size() > options_.caps.max_atoms) {
    std::vector<std::size_t> order(next.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return next[a].weight > next[b].weight; });
    std::vector<std::size_t> keep(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(options_.caps.max_atoms));
    for (auto it = order.begin() + static_cast<std::ptrdiff_t>(options_.caps.max_atoms); it != order.end(); ++it) {
      pruned_ += next[*it].weight;
    }
    std::sort(keep.begin(), keep.end());
    std::vector<TracedAtom> kept;
    kept.reserve(keep.size());
    for (std::size_t k : keep) kept.push_back(next[k]);
    next = std::move(kept);
    if (first_capped_level_ < 0) first_capped_level_ = depth_ + 1;
  }

  ++depth_;
  if (options_.keep_history) {
    levels_.push_back(std::move(next));
  } else {
    levels_.back() = std::move(next);
  }
}

std::vector<PathStep> FiberIteration::path(int n, std::size_t index) const {
  if (!options_.keep_history) throw PreconditionError("fiber iteration history was not kept");
  std::vector<PathStep> steps(static_cast<std::size_t>(n));
  for (int k = n; k >= 1; --k) {
    const TracedAtom& a = levels_.at(static_cast<std::size_t>(k)).at(index);
    steps[static_cast<std::size_t>(k - 1)] = {a.component, a.point};
    index = static_cast<std::size_t>(a.parent);
  }
  return steps;
}

IteratedFiber iterate_fiber(const Correspondence& f, const SpherePointd& x, int n, const Caps& caps,
                            const RootOptions& roots) {
  if (n < 0) throw PreconditionError("iteration count must be nonnegative");
  FiberIteration it(f, x, Side::forward, {caps, roots, 1.0, false, 1});
  for (int k = 0; k < n; ++k) it.advance();
  const auto atoms = it.current();
  return {std::vector<TracedAtom>(atoms.begin(), atoms.end()), it.pruned_weight(), it.capped(), !f.is_all_forward()};
}

}  // namespace holocorr
