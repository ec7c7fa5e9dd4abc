#pragma once

#include <complex>
#include <span>
#include <vector>

#include "holocorr/sphere.hpp"

namespace holocorr {

using Complex = std::complex<double>;

/// Homogeneous polynomial of degree d in (h0, h1); coefficient j multiplies
/// h0^j * h1^(d - j). In the affine chart z = h0 / h1 this is the polynomial
/// sum_j c_j z^j with formal degree d.
class BinaryForm {
 public:
  explicit BinaryForm(std::vector<Complex> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  const Complex& operator[](int j) const { return coeffs_[static_cast<std::size_t>(j)]; }

  /// Euclidean norm of the coefficient vector.
  double norm() const;

  Complex operator()(const Complex& h0, const Complex& h1) const;
  Complex operator()(const SpherePointd& p) const { return (*this)(p.h0(), p.h1()); }

  /// Same form viewed with degree raised by multiplying by h1^extra.
  BinaryForm raised(int extra) const;

  bool operator==(const BinaryForm&) const = default;

 private:
  std::vector<Complex> coeffs_;
};

BinaryForm operator*(const BinaryForm& a, const BinaryForm& b);
BinaryForm operator+(const BinaryForm& a, const BinaryForm& b);
BinaryForm operator*(Complex s, const BinaryForm& a);

struct Root {
  SpherePointd point;
  int multiplicity = 1;
};

struct RootOptions {
  /// Accepted residual |f(r)| / ||f|| at a unit representative r.
  double tol = 1e-9;
  /// Roots closer than this (chordal) are merged and their multiplicities summed.
  double cluster_radius = 1e-7;
};

/// Projective roots of f with multiplicity; multiplicities always sum to
/// deg f, with infinity carrying the degree drop of the affine polynomial.
/// Throws IllConditioned when a root cannot be polished to tolerance.
std::vector<Root> form_roots(const BinaryForm& f, const RootOptions& options = {});

}  // namespace holocorr
