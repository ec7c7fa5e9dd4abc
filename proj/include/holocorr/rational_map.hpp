#pragma once

#include <vector>

#include "holocorr/binary_form.hpp"

namespace holocorr {

/// Rational self-map f = P / Q of the sphere, stored as two binary forms of
/// the same degree d = max(deg P, deg Q) with no common projective root.
class RationalMap {
 public:
  /// Raises both forms to the larger degree and cancels common roots.
  /// Throws DegreeError if the result is constant.
  RationalMap(BinaryForm num, BinaryForm den);

  /// From affine coefficient lists (index i multiplies z^i).
  static RationalMap from_affine(std::vector<Complex> num, std::vector<Complex> den);
  static RationalMap polynomial(std::vector<Complex> coeffs) { return from_affine(std::move(coeffs), {Complex(1)}); }

  int degree() const { return num_.degree(); }
  const BinaryForm& numerator() const { return num_; }
  const BinaryForm& denominator() const { return den_; }

  SpherePointd operator()(const SpherePointd& x) const;

  /// this ∘ inner (inner applied first).
  RationalMap after(const RationalMap& inner) const;

  /// True when every coefficient is real (needed for exact conversion).
  bool has_real_coefficients() const;

  bool operator==(const RationalMap&) const = default;

 private:
  struct Trusted {};
  RationalMap(BinaryForm num, BinaryForm den, Trusted);

  BinaryForm num_;
  BinaryForm den_;
};

SpherePointd eval_map(const RationalMap& f, const SpherePointd& x);

/// Solutions of f(z) = w with multiplicity; multiplicities sum to deg f.
std::vector<Root> preimages_map(const RationalMap& f, const SpherePointd& w, const RootOptions& options = {});

}  // namespace holocorr
