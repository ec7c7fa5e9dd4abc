#pragma once

#include <random>

#include "holocorr/sphere.hpp"

namespace holocorr::testing {

/// Rotation-invariant random point on the sphere.
inline SpherePointd random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return SpherePointd::from_embedding(Eigen::Vector3d(n(rng), n(rng), n(rng)));
}

inline Complex affine_of(const SpherePointd& p) { return *p.to_affine(); }

}  // namespace holocorr::testing
