#pragma once

#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Core>

#include "holocorr/errors.hpp"

namespace holocorr {

/// Point of the Riemann sphere stored as a unit homogeneous pair [h0 : h1],
/// with affine coordinate z = h0 / h1 and infinity = [1 : 0].
///
/// The representative is canonical: |h0|^2 + |h1|^2 = 1 and the coordinate of
/// larger modulus (h1 on ties) is real and positive, so two equal points have
/// equal coordinates up to rounding.
template <typename Scalar>
class SpherePoint {
 public:
  using Complex = std::complex<Scalar>;
  using Coords = Eigen::Matrix<Complex, 2, 1>;
  using Embedding = Eigen::Matrix<Scalar, 3, 1>;

  /// The origin [0 : 1].
  SpherePoint() : coords_(Complex(0), Complex(1)) {}

  static SpherePoint homogeneous(Complex h0, Complex h1) {
    const Scalar a0 = std::abs(h0);
    const Scalar a1 = std::abs(h1);
    const Scalar scale = std::max(a0, a1);
    if (!(scale > Scalar(0)) || !std::isfinite(scale)) {
      throw PreconditionError("homogeneous coordinates must be finite and not both zero");
    }
    h0 /= scale;
    h1 /= scale;
    // Rotate the larger coordinate onto the positive real axis.
    const Complex pivot = (a1 >= a0) ? h1 : h0;
    const Complex phase = std::conj(pivot) / std::abs(pivot);
    h0 *= phase;
    h1 *= phase;
    const Scalar norm = std::sqrt(std::norm(h0) + std::norm(h1));
    h0 /= norm;
    h1 /= norm;
    if (a1 >= a0) {
      h1 = Complex(h1.real(), Scalar(0));
    } else {
      h0 = Complex(h0.real(), Scalar(0));
    }
    return SpherePoint(h0, h1);
  }

  static SpherePoint affine(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw PreconditionError("affine coordinate must be finite; use SpherePoint::infinity()");
    }
    return homogeneous(z, Complex(1));
  }

  static SpherePoint infinity() { return SpherePoint(Complex(1), Complex(0)); }

  const Complex& h0() const { return coords_(0); }
  const Complex& h1() const { return coords_(1); }
  const Coords& coords() const { return coords_; }

  bool is_infinity() const { return coords_(1) == Complex(0); }

  /// Affine coordinate, or nullopt at infinity.
  std::optional<Complex> to_affine() const {
    if (is_infinity()) return std::nullopt;
    return coords_(0) / coords_(1);
  }

  /// Image on the sphere of diameter 1 centred at the origin; Euclidean
  /// distance between embeddings equals the chordal distance.
  Embedding embed() const {
    const Complex cross = coords_(0) * std::conj(coords_(1));
    return Embedding(cross.real(), cross.imag(),
                     Scalar(0.5) * (std::norm(coords_(0)) - std::norm(coords_(1))));
  }

  /// Inverse of embed() for any nonzero vector (projected radially).
  static SpherePoint from_embedding(const Embedding& v) {
    const Scalar r = v.norm();
    if (!(r > Scalar(0))) throw PreconditionError("cannot project the zero vector to the sphere");
    const Embedding u = v / r;
    // [h0 : h1] with h0 * conj(h1) proportional to (x + iy) and |h0|^2 - |h1|^2 = z.
    const Scalar n0 = std::sqrt(std::max(Scalar(0), (Scalar(1) + u.z()) / Scalar(2)));
    const Scalar n1 = std::sqrt(std::max(Scalar(0), (Scalar(1) - u.z()) / Scalar(2)));
    if (n1 >= n0) {
      return homogeneous(Complex(u.x(), u.y()) / (Scalar(2) * n1), Complex(n1));
    }
    return homogeneous(Complex(n0), Complex(u.x(), -u.y()) / (Scalar(2) * n0));
  }

 private:
  SpherePoint(Complex h0, Complex h1) : coords_(h0, h1) {}

  Coords coords_;
};

using SpherePointd = SpherePoint<double>;

/// Chordal distance |p0 q1 - p1 q0| on unit representatives; lies in [0, 1].
template <typename Scalar>
Scalar chordal_distance(const SpherePoint<Scalar>& p, const SpherePoint<Scalar>& q) {
  const Scalar d = std::abs(p.h0() * q.h1() - p.h1() * q.h0());
  return std::min(d, Scalar(1));
}

/// Chordal distance between two affine values, without building points.
template <typename Scalar>
Scalar chordal_distance(std::complex<Scalar> z, std::complex<Scalar> w) {
  return std::abs(z - w) /
         std::sqrt((Scalar(1) + std::norm(z)) * (Scalar(1) + std::norm(w)));
}

}  // namespace holocorr
