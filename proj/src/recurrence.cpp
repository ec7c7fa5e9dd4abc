#include "holocorr/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "holocorr/point_index.hpp"

namespace holocorr {

namespace {

// Runs body(i) for i in [0, n) on up to `workers` threads, interleaved.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
}

struct LevelHit {
  std::size_t index = 0;
  bool near_boundary = false;
};

// Prefers a witness away from the boundary.
std::optional<LevelHit> scan_level(std::span<const TracedAtom> level, const Region& r) {
  std::optional<LevelHit> boundary;
  for (std::size_t i = 0; i < level.size(); ++i) {
    const Membership m = r.classify(level[i].point);
    if (!m.inside) continue;
    if (!m.near_boundary) return LevelHit{i, false};
    if (!boundary) boundary = LevelHit{i, true};
  }
  return boundary;
}

// Standard error of the weighted mean of d.
double weighted_se(const std::vector<double>& w, const std::vector<double>& d, double total) {
  double mean = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mean += w[i] * d[i];
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) var += w[i] * w[i] * (d[i] - mean) * (d[i] - mean);
  return std::sqrt(var) / total;
}

}  // namespace

std::string to_string(HitStatus s) {
  switch (s) {
    case HitStatus::hit:
      return "hit";
    case HitStatus::miss:
      return "miss";
    case HitStatus::unknown_capped:
      return "unknown_capped";
  }
  return "";
}

std::string to_string(RecurrenceDirection d) { return d == RecurrenceDirection::forward ? "forward" : "backward"; }

HitResult hits_region(const Correspondence& f, const SpherePointd& x, int n, const Region& r, const Caps& caps,
                      const RootOptions& roots) {
  if (n < 1) throw PreconditionError("hits_region needs n >= 1");
  FiberIteration it(f, x, Side::forward, {caps, roots, 1.0, false, 1});
  for (int k = 0; k < n; ++k) it.advance();
  if (const auto h = scan_level(it.current(), r)) {
    return {HitStatus::hit, it.current()[h->index].point, h->near_boundary};
  }
  return {it.capped() ? HitStatus::unknown_capped : HitStatus::miss, std::nullopt, false};
}

ReturnTimes return_times(const Correspondence& f, const SpherePointd& x, const Region& r, int horizon,
                         const Caps& caps, const RootOptions& roots) {
  if (horizon < 1) throw PreconditionError("return_times needs horizon >= 1");
  FiberIteration it(f, x, Side::forward, {caps, roots, 1.0, true, 1});
  ReturnTimes out;
  for (int n = 1; n <= horizon; ++n) {
    it.advance();
    if (const auto h = scan_level(it.current(), r)) {
      out.times.push_back(n);
      out.certificates.push_back({n, it.path(n, h->index), h->near_boundary});
    } else if (it.capped_by(n)) {
      out.unknown.push_back(n);
    }
  }
  out.capped = it.capped();
  out.pruned_weight = it.pruned_weight();
  return out;
}

bool validate_certificate(const Correspondence& f, const SpherePointd& x, const Region& r,
                          const ReturnCertificate& cert, double tol) {
  if (cert.n < 1 || cert.path.size() != static_cast<std::size_t>(cert.n)) return false;
  SpherePointd prev = x;
  for (const auto& step : cert.path) {
    if (step.component < 0 || static_cast<std::size_t>(step.component) >= f.component_count()) return false;
    if (!(f.relation_residual(static_cast<std::size_t>(step.component), prev, step.point, Side::forward) <= tol)) {
      return false;
    }
    prev = step.point;
  }
  return r.contains(prev);
}

WordChain word_witness(const std::vector<RationalMap>& generators, const SpherePointd& x, const Region& r,
                       int horizon, int max_chain, const WordWitnessOptions& options) {
  if (horizon < 1) throw PreconditionError("word_witness needs horizon >= 1");
  if (generators.empty() || max_chain < 1) return {};

  struct Node {
    SpherePointd point;
    int visits = 0;
    std::int32_t parent = -1;
    std::int32_t generator = -1;
    bool inside = false;
  };
  std::vector<std::vector<Node>> levels{{Node{x}}};
  int best_visits = 0, best_level = 0;
  std::size_t best_index = 0;

  for (int n = 1; n <= horizon && best_visits < max_chain; ++n) {
    const auto& prev = levels.back();
    std::vector<Node> next;
    PointIndex index(options.caps.dedup_radius);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      for (std::size_t g = 0; g < generators.size(); ++g) {
        const SpherePointd q = generators[g](prev[i].point);
        if (const auto hit = index.find_within(q, options.caps.dedup_radius)) {
          Node& e = next[*hit];
          const int v = prev[i].visits + (e.inside ? 1 : 0);
          if (v > e.visits) {
            e.visits = v;
            e.parent = static_cast<std::int32_t>(i);
            e.generator = static_cast<std::int32_t>(g);
          }
          continue;
        }
        index.insert(q);
        const bool inside = r.contains(q);
        next.push_back({q, prev[i].visits + (inside ? 1 : 0), static_cast<std::int32_t>(i),
                        static_cast<std::int32_t>(g), inside});
      }
    }
    if (next.size() > options.caps.max_atoms) {
      std::vector<std::size_t> order(next.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return next[a].visits > next[b].visits; });
      order.resize(options.caps.max_atoms);
      std::sort(order.begin(), order.end());
      std::vector<Node> kept;
      kept.reserve(order.size());
      for (std::size_t k : order) kept.push_back(next[k]);
      next = std::move(kept);
    }
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i].visits > best_visits) {
        best_visits = next[i].visits;
        best_level = n;
        best_index = i;
      }
    }
    levels.push_back(std::move(next));
  }

  if (best_visits == 0) return {};
  Word word(static_cast<std::size_t>(best_level));
  std::vector<bool> inside(static_cast<std::size_t>(best_level));
  std::vector<SpherePointd> points(static_cast<std::size_t>(best_level));
  std::size_t idx = best_index;
  for (int k = best_level; k >= 1; --k) {
    const Node& node = levels[static_cast<std::size_t>(k)][idx];
    word[static_cast<std::size_t>(k - 1)] = node.generator;
    inside[static_cast<std::size_t>(k - 1)] = node.inside;
    points[static_cast<std::size_t>(k - 1)] = node.point;
    idx = static_cast<std::size_t>(node.parent);
  }
  WordChain chain;
  for (int k = 1; k <= best_level && static_cast<int>(chain.words.size()) < max_chain; ++k) {
    if (!inside[static_cast<std::size_t>(k - 1)]) continue;
    chain.words.emplace_back(word.begin(), word.begin() + k);
    chain.values.push_back(points[static_cast<std::size_t>(k - 1)]);
  }
  return chain;
}

bool validate_chain(const std::vector<RationalMap>& generators, const SpherePointd& x, const Region& r,
                    const WordChain& chain) {
  for (std::size_t i = 0; i < chain.words.size(); ++i) {
    const Word& w = chain.words[i];
    if (w.empty()) return false;
    if (i > 0) {
      const Word& p = chain.words[i - 1];
      if (w.size() <= p.size() || !std::equal(p.begin(), p.end(), w.begin())) return false;
    }
    SpherePointd z = x;
    for (int g : w) {
      if (g < 0 || static_cast<std::size_t>(g) >= generators.size()) return false;
      z = generators[static_cast<std::size_t>(g)](z);
    }
    if (!r.contains(z)) return false;
  }
  return true;
}

std::vector<std::size_t> weighted_sample(const std::vector<double>& weights, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    // Uniform on (0, 1) from the top 53 bits; log(u) / w orders like u^(1/w).
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    if (weights[i] > 0.0) keys.emplace_back(std::log(u) / weights[i], i);
  }
  k = std::min(k, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = keys[i].second;
  return out;
}

ReturnReport recurrence_experiment(const Correspondence& f, const AtomicMeasure& mu, const Region& r,
                                   RecurrenceDirection direction, const RecurrenceOptions& options) {
  if (options.horizon < 1) throw PreconditionError("recurrence horizon must be >= 1");
  if (options.witnesses && (direction != RecurrenceDirection::forward || options.generators.empty())) {
    throw PreconditionError("word witnesses need forward direction and generator maps");
  }
  ReturnReport report;
  report.region = to_string(r);
  report.direction = direction;
  report.horizon = options.horizon;
  report.min_returns = options.min_returns;
  report.seed = options.seed;

  std::vector<std::size_t> in_region;
  std::vector<double> weights;
  double total = 0.0, inside = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    total += mu.atoms[i].weight;
    if (r.contains(mu.atoms[i].point)) {
      in_region.push_back(i);
      weights.push_back(mu.atoms[i].weight);
      inside += mu.atoms[i].weight;
    }
  }
  auto& agg = report.aggregate;
  agg.atoms_in_region = in_region.size();
  agg.region_mass = total > 0.0 ? inside / total : 0.0;
  agg.fraction_at_least.assign(static_cast<std::size_t>(std::max(options.r_max, 0)), 0.0);
  if (in_region.empty()) {
    agg.region_mass_zero = true;
    return report;
  }

  const Correspondence g = direction == RecurrenceDirection::backward ? adjoint(f) : f;
  const auto picks = weighted_sample(weights, options.max_points, options.seed);
  report.records.resize(picks.size());
  parallel_for(picks.size(), options.workers, [&](std::size_t k) {
    AtomRecord& rec = report.records[k];
    rec.atom_index = in_region[picks[k]];
    rec.atom = mu.atoms[rec.atom_index];
    ReturnTimes rt = return_times(g, rec.atom.point, r, options.horizon, options.caps, options.roots);
    for (std::size_t i = 0; i < rt.times.size(); ++i) {
      if (rt.certificates[i].near_boundary) {
        rec.boundary_times.push_back(rt.times[i]);
      } else {
        rec.times.push_back(rt.times[i]);
        rec.certificates.push_back(std::move(rt.certificates[i]));
      }
    }
    rec.unknown = std::move(rt.unknown);
    rec.capped = rt.capped;
    if (options.witnesses) {
      rec.chain = word_witness(options.generators, rec.atom.point, r, options.witness_horizon,
                               options.witness_max_chain, {options.caps});
    }
  });

  agg.atoms_sampled = report.records.size();
  const double n = static_cast<double>(agg.atoms_sampled);
  std::size_t full_chain = 0, enough = 0;
  for (const auto& rec : report.records) {
    const auto count = static_cast<int>(rec.times.size());
    for (int q = 1; q <= options.r_max; ++q) {
      if (count >= q) agg.fraction_at_least[static_cast<std::size_t>(q - 1)] += 1.0 / n;
    }
    if (count >= options.min_returns) ++enough;
    if (rec.capped) ++agg.capped_atoms;
    if (rec.chain && static_cast<int>(rec.chain->words.size()) >= options.witness_max_chain) ++full_chain;
  }
  agg.fraction_min_returns = static_cast<double>(enough) / n;
  agg.fraction_full_chain = static_cast<double>(full_chain) / n;
  return report;
}

Complex SupportRaster::cell_center(int row, int col) const {
  const double w = (grid.x1 - grid.x0) / grid.resolution;
  const double h = (grid.y1 - grid.y0) / grid.resolution;
  return {grid.x0 + (col + 0.5) * w, grid.y1 - (row + 0.5) * h};
}

double SupportRaster::cell_diagonal(int row, int col) const {
  const double w = (grid.x1 - grid.x0) / grid.resolution;
  const double h = (grid.y1 - grid.y0) / grid.resolution;
  const double left = grid.x0 + col * w, top = grid.y1 - row * h;
  const auto p = [](double re, double im) { return SpherePointd::affine({re, im}); };
  return std::max(chordal_distance(p(left, top), p(left + w, top - h)),
                  chordal_distance(p(left + w, top), p(left, top - h)));
}

double SupportRaster::max_cell_diagonal() const {
  double out = 0.0;
  for (int row = 0; row < grid.resolution; ++row) {
    for (int col = 0; col < grid.resolution; ++col) out = std::max(out, cell_diagonal(row, col));
  }
  return out;
}

std::vector<SpherePointd> SupportRaster::marked_centers() const {
  std::vector<SpherePointd> out;
  for (int row = 0; row < grid.resolution; ++row) {
    for (int col = 0; col < grid.resolution; ++col) {
      if (marked[static_cast<std::size_t>(row * grid.resolution + col)]) {
        out.push_back(SpherePointd::affine(cell_center(row, col)));
      }
    }
  }
  return out;
}

SupportRaster support_raster(const AtomicMeasure& mu, const RasterGrid& grid, double mass_floor,
                             const std::optional<Region>& reference) {
  if (grid.resolution < 16) throw PreconditionError("raster resolution must be at least 16");
  if (!(grid.x1 > grid.x0) || !(grid.y1 > grid.y0)) throw PreconditionError("raster window is empty");
  SupportRaster out;
  out.grid = grid;
  const auto res = static_cast<std::size_t>(grid.resolution);
  out.mass.assign(res * res, 0.0);
  for (const auto& a : mu.atoms) {
    const auto z = a.point.to_affine();
    if (!z || z->real() < grid.x0 || z->real() > grid.x1 || z->imag() < grid.y0 || z->imag() > grid.y1) {
      out.outside_mass += a.weight;
      continue;
    }
    const auto cell = [&](double t) {
      return std::min(static_cast<std::size_t>(std::floor(t * grid.resolution)), res - 1);
    };
    const std::size_t col = cell((z->real() - grid.x0) / (grid.x1 - grid.x0));
    const std::size_t row = cell((grid.y1 - z->imag()) / (grid.y1 - grid.y0));
    out.mass[row * res + col] += a.weight;
  }
  out.marked.resize(out.mass.size());
  for (std::size_t i = 0; i < out.mass.size(); ++i) out.marked[i] = out.mass[i] > 0.0 && out.mass[i] >= mass_floor;

  if (reference) {
    std::vector<SpherePointd> ref;
    for (int row = 0; row < grid.resolution; ++row) {
      for (int col = 0; col < grid.resolution; ++col) {
        const auto p = SpherePointd::affine(out.cell_center(row, col));
        if (reference->contains(p)) ref.push_back(p);
      }
    }
    out.hausdorff = hausdorff_distance(out.marked_centers(), ref);
  }
  return out;
}

namespace {

PointIndex support_index(const SupportRaster& raster, double delta) {
  PointIndex index(std::clamp(delta, 1e-3, 0.5));
  for (const auto& p : raster.marked_centers()) index.insert(p);
  return index;
}

double distance_to(const PointIndex& index, const SpherePointd& p) {
  const auto n = index.nearest(p);
  return n ? n->second : 1.0;
}

}  // namespace

SupportInvarianceResult support_invariance_check(const Correspondence& f, const SupportRaster& raster, double delta,
                                                 const RootOptions& roots, unsigned workers) {
  if (!(delta >= 0.0)) throw PreconditionError("delta must be nonnegative");
  const PointIndex index = support_index(raster, delta);
  SupportInvarianceResult out;
  out.delta = delta;
  out.checked = index.size();

  struct PerPoint {
    std::vector<SupportViolation> violations;
    bool escapes = false;
  };
  std::vector<PerPoint> results(index.size());
  parallel_for(index.size(), workers, [&](std::size_t i) {
    const SpherePointd& x = index.point(i);
    PerPoint& res = results[i];
    double nearest = std::numeric_limits<double>::infinity(), farthest = 0.0;
    for (const auto& fp : forward_image(f, x, roots)) {
      const double d = distance_to(index, fp.point);
      nearest = std::min(nearest, d);
      farthest = std::max(farthest, d);
    }
    if (nearest > delta) res.violations.push_back({x, 'a', nearest});
    res.escapes = farthest > delta;
    double worst = 0.0;
    for (const auto& fp : backward_image(f, x, roots)) worst = std::max(worst, distance_to(index, fp.point));
    if (worst > delta) res.violations.push_back({x, 'b', worst});
  });
  for (auto& res : results) {
    for (auto& v : res.violations) out.violations.push_back(v);
    if (res.escapes) ++out.forward_not_contained;
  }
  return out;
}

bool forward_escapes_support(const Correspondence& f, const SupportRaster& raster, const SpherePointd& x,
                             double delta, const RootOptions& roots) {
  const PointIndex index = support_index(raster, delta);
  for (const auto& fp : forward_image(f, x, roots)) {
    if (distance_to(index, fp.point) > delta) return true;
  }
  return false;
}

MassInequality mass_inequality_check(const Correspondence& f, const AtomicMeasure& mu, const Region& r,
                                     const RootOptions& roots, unsigned workers) {
  return mass_inequality_check(f, mu, std::vector<Region>{r}, roots, workers).front();
}

std::vector<MassInequality> mass_inequality_check(const Correspondence& f, const AtomicMeasure& mu,
                                                  const std::vector<Region>& regions, const RootOptions& roots,
                                                  unsigned workers) {
  const std::size_t n = mu.atoms.size();
  const std::size_t m = regions.size();
  std::vector<double> w(n);
  // Bit 0: atom in R, bit 1: F(atom) meets R, bit 2: F†(atom) meets R.
  std::vector<std::uint8_t> flags(n * m);
  parallel_for(n, workers, [&](std::size_t i) {
    const Atom& a = mu.atoms[i];
    w[i] = a.weight;
    const Fiber fwd = forward_image(f, a.point, roots);
    const Fiber bwd = backward_image(f, a.point, roots);
    for (std::size_t k = 0; k < m; ++k) {
      const Region& r = regions[k];
      const auto meets = [&](const Fiber& fiber) {
        return std::any_of(fiber.begin(), fiber.end(), [&](const FiberPoint& fp) { return r.contains(fp.point); });
      };
      flags[k * n + i] = static_cast<std::uint8_t>((r.contains(a.point) ? 1 : 0) | (meets(fwd) ? 2 : 0) |
                                                   (meets(bwd) ? 4 : 0));
    }
  });

  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw PreconditionError("mass inequality check needs positive total mass");
  double sq = 0.0;
  for (double x : w) sq += x * x;
  const double inv_dt = 1.0 / f.topological_degree();

  std::vector<MassInequality> out(m);
  std::vector<double> in_r(n), in_pre(n), in_img(n), d(n);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t b = flags[k * n + i];
      in_r[i] = b & 1 ? 1.0 : 0.0;
      in_pre[i] = b & 2 ? 1.0 : 0.0;
      in_img[i] = b & 4 ? 1.0 : 0.0;
    }
    const auto mean = [&](const std::vector<double>& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += w[i] * v[i];
      return s / total;
    };
    // Each inequality a <= b is tested on the per-atom difference a - b.
    const auto holds = [&](const std::vector<double>& a, double ca, const std::vector<double>& b) {
      for (std::size_t i = 0; i < n; ++i) d[i] = ca * a[i] - b[i];
      return mean(d) <= 3.0 * weighted_se(w, d, total) + 1e-12;
    };
    MassInequality& res = out[k];
    res.dt = f.topological_degree();
    res.effective_samples = total * total / sq;
    res.region = mean(in_r);
    res.preimage = mean(in_pre);
    res.image = mean(in_img);
    res.se_region = weighted_se(w, in_r, total);
    res.se_preimage = weighted_se(w, in_pre, total);
    res.se_image = weighted_se(w, in_img, total);
    res.preimage_ok = holds(in_r, 1.0, in_pre);
    res.image_upper_ok = holds(in_r, 1.0, in_img);
    res.image_lower_ok = holds(in_img, inv_dt, in_r);
  }
  return out;
}

std::vector<Region> random_regions(const AtomicMeasure& mu, int count, std::uint64_t seed) {
  double reach = 0.0;
  for (const auto& a : mu.atoms) {
    if (const auto z = a.point.to_affine()) reach = std::max(reach, std::min(std::abs(*z), 10.0));
  }
  if (!(reach > 0.0)) reach = 1.0;
  std::mt19937_64 rng(seed);
  const auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  std::vector<Region> out;
  for (int k = 0; k < count; ++k) {
    if (k % 2 == 0) {
      const Complex c(reach * (2 * u() - 1), reach * (2 * u() - 1));
      out.push_back(Region::disc(c, 0.05 + 0.2 * u(), true));
    } else {
      const double r_in = 0.8 * reach * u();
      out.push_back(Region::annulus(r_in, r_in + reach * (0.1 + 0.4 * u()), true));
    }
  }
  return out;
}

}  // namespace holocorr
