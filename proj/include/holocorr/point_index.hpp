#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "holocorr/sphere.hpp"

namespace holocorr {

/// Uniform-grid hash over the sphere embedding. Cells have side `cell_size`
/// in chordal units; points are referred to by insertion index.
class PointIndex {
 public:
  explicit PointIndex(double cell_size);

  /// Adds a point and returns its index.
  std::size_t insert(const SpherePointd& p);

  /// Index of the earliest inserted point within `radius` (<= cell size) of p.
  std::optional<std::size_t> find_within(const SpherePointd& p, double radius) const;

  /// Nearest stored point and its chordal distance; nullopt when empty.
  std::optional<std::pair<std::size_t, double>> nearest(const SpherePointd& p) const;

  std::size_t size() const { return points_.size(); }
  const SpherePointd& point(std::size_t i) const { return points_[i]; }
  double cell_size() const { return cell_; }

 private:
  using Cell = std::array<std::int64_t, 3>;
  struct CellHash {
    std::size_t operator()(const Cell& c) const noexcept;
  };

  Cell cell_of(const Eigen::Vector3d& v) const;

  double cell_;
  std::vector<SpherePointd> points_;
  std::vector<Eigen::Vector3d> embedded_;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> cells_;
};

/// Chordal Hausdorff distance between two finite point sets; 1 if exactly one
/// is empty, 0 if both are.
double hausdorff_distance(std::span<const SpherePointd> a, std::span<const SpherePointd> b);

}  // namespace holocorr
