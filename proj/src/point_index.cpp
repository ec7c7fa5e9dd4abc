#include "holocorr/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace holocorr {

PointIndex::PointIndex(double cell_size) : cell_(cell_size) {
  if (!(cell_size > 0.0)) throw PreconditionError("PointIndex cell size must be positive");
}

std::size_t PointIndex::CellHash::operator()(const Cell& c) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int64_t v : c) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

PointIndex::Cell PointIndex::cell_of(const Eigen::Vector3d& v) const {
  return {static_cast<std::int64_t>(std::floor(v.x() / cell_)),
          static_cast<std::int64_t>(std::floor(v.y() / cell_)),
          static_cast<std::int64_t>(std::floor(v.z() / cell_))};
}

std::size_t PointIndex::insert(const SpherePointd& p) {
  const std::size_t id = points_.size();
  points_.push_back(p);
  embedded_.push_back(p.embed());
  cells_[cell_of(embedded_.back())].push_back(id);
  return id;
}

std::optional<std::size_t> PointIndex::find_within(const SpherePointd& p, double radius) const {
  const Eigen::Vector3d v = p.embed();
  const Cell c = cell_of(v);
  std::optional<std::size_t> best;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const auto it = cells_.find({c[0] + dx, c[1] + dy, c[2] + dz});
        if (it == cells_.end()) continue;
        for (std::size_t id : it->second) {
          if (best && id > *best) continue;
          if ((embedded_[id] - v).norm() < radius) best = id;
        }
      }
    }
  }
  return best;
}

std::optional<std::pair<std::size_t, double>> PointIndex::nearest(const SpherePointd& p) const {
  if (points_.empty()) return std::nullopt;
  const Eigen::Vector3d v = p.embed();
  const Cell c = cell_of(v);
  std::size_t best_id = 0;
  double best = std::numeric_limits<double>::infinity();
  // Scan cubic shells of growing radius. A point outside shell k is at least
  // k * cell_ away, so stop once the best distance is within that bound.
  const auto max_shell = static_cast<std::int64_t>(std::ceil(1.0 / cell_)) + 1;
  for (std::int64_t k = 0; k <= max_shell; ++k) {
    for (std::int64_t dx = -k; dx <= k; ++dx) {
      for (std::int64_t dy = -k; dy <= k; ++dy) {
        for (std::int64_t dz = -k; dz <= k; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != k) continue;
          const auto it = cells_.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == cells_.end()) continue;
          for (std::size_t id : it->second) {
            const double d = (embedded_[id] - v).norm();
            if (d < best || (d == best && id < best_id)) {
              best = d;
              best_id = id;
            }
          }
        }
      }
    }
    if (best <= static_cast<double>(k) * cell_) break;
  }
  return std::make_pair(best_id, std::min(best, 1.0));
}

namespace {

double directed_hausdorff(std::span<const SpherePointd> from, std::span<const SpherePointd> to) {
  // Cell size tuned so typical raster-sized sets hit a few points per cell.
  const double cell = std::clamp(2.0 / std::sqrt(static_cast<double>(to.size()) + 1.0), 1e-4, 0.5);
  PointIndex index(cell);
  for (const auto& q : to) index.insert(q);
  double worst = 0.0;
  for (const auto& p : from) worst = std::max(worst, index.nearest(p)->second);
  return worst;
}

}  // namespace

double hausdorff_distance(std::span<const SpherePointd> a, std::span<const SpherePointd> b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return 1.0;
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace holocorr
