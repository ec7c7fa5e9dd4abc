#pragma once

#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "holocorr/binary_form.hpp"

namespace holocorr {

using Rational = mpq_class;

/// Dense univariate polynomial over Q; coeffs()[i] multiplies x^i. The zero
/// polynomial has no coefficients and degree -1.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs);
  static QPoly constant(const Rational& c);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(int i) const;
  const Rational& leading() const { return coeffs_.back(); }

  Rational operator()(const Rational& x) const;
  QPoly derivative() const;
  QPoly monic() const;

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const Rational& s, const QPoly& a);
  bool operator==(const QPoly& other) const = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Quotient and remainder of a / b (b nonzero).
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
/// Monic gcd; gcd(0, 0) = 0.
QPoly gcd(const QPoly& a, const QPoly& b);

/// Bivariate polynomial over Q with exact coefficients. coeff(i, j)
/// multiplies x^i y^j; trailing zero rows and columns are trimmed so
/// degree_x() and degree_y() are the true partial degrees.
class ExactBivarPoly {
 public:
  ExactBivarPoly() = default;
  static ExactBivarPoly constant(const Rational& c);
  static ExactBivarPoly monomial(const Rational& c, int i, int j);
  static ExactBivarPoly x();
  static ExactBivarPoly y();
  /// Embeds a polynomial in x (in y when `in_y`).
  static ExactBivarPoly from_univariate(const QPoly& p, bool in_y = false);

  int degree_x() const { return degx_; }
  int degree_y() const { return degy_; }
  bool is_zero() const { return degx_ < 0; }
  bool is_constant() const { return degx_ <= 0 && degy_ <= 0; }

  Rational coeff(int i, int j) const;
  void add_term(const Rational& c, int i, int j);

  /// Coefficient of y^j as a polynomial in x.
  QPoly y_coeff(int j) const;
  /// Coefficient of x^i as a polynomial in y.
  QPoly x_coeff(int i) const;

  /// Roles of x and y exchanged.
  ExactBivarPoly swapped() const;
  ExactBivarPoly derivative_x() const;
  ExactBivarPoly derivative_y() const;

  /// Rational c with this / c integral with coprime coefficients; the sign
  /// of c makes the leading term of primitive() positive.
  Rational content() const;
  /// this / content(): integer coprime coefficients, leading term positive.
  /// Terms are ordered by y-degree, then x-degree.
  ExactBivarPoly primitive() const;

  Rational operator()(const Rational& x, const Rational& y) const;

  /// Binary form in y (degree degree_y()) obtained by fixing x = [x0 : x1]
  /// homogeneously in degree degree_x(); defined at x = infinity too.
  BinaryForm fiber_form(const SpherePointd& x) const;

  friend ExactBivarPoly operator+(const ExactBivarPoly& a, const ExactBivarPoly& b);
  friend ExactBivarPoly operator-(const ExactBivarPoly& a, const ExactBivarPoly& b);
  friend ExactBivarPoly operator*(const ExactBivarPoly& a, const ExactBivarPoly& b);
  friend ExactBivarPoly operator*(const Rational& s, const ExactBivarPoly& a);
  bool operator==(const ExactBivarPoly& other) const;

 private:
  void resize(int degx, int degy);
  void trim();
  Rational& at(int i, int j) { return c_[static_cast<std::size_t>(i * (degy_ + 1) + j)]; }
  const Rational& at(int i, int j) const { return c_[static_cast<std::size_t>(i * (degy_ + 1) + j)]; }

  int degx_ = -1;
  int degy_ = -1;
  std::vector<Rational> c_;
};

ExactBivarPoly pow(const ExactBivarPoly& p, int e);

/// Sylvester resultant eliminating the shared middle variable:
/// p is read as p(u, v) (x = u, y = v), q as q(v, w) (x = v, y = w), and the
/// result is Res_v(p, q) as a polynomial in (x = u, y = w). Exact; no content
/// is removed. Throws CommonFactor when the resultant vanishes identically.
ExactBivarPoly resultant(const ExactBivarPoly& p, const ExactBivarPoly& q);

/// Exact gcd in Q[x, y], normalized by primitive().
ExactBivarPoly gcd(const ExactBivarPoly& a, const ExactBivarPoly& b);

/// Exact quotient a / b; throws PreconditionError if b does not divide a.
ExactBivarPoly exact_divide(const ExactBivarPoly& a, const ExactBivarPoly& b);

struct SquarefreeFactor {
  ExactBivarPoly factor;
  int multiplicity = 1;
};

/// Yun decomposition: pairwise coprime squarefree factors, each primitive,
/// whose product with multiplicities equals p up to a rational constant.
/// Factors are not guaranteed irreducible.
std::vector<SquarefreeFactor> squarefree_decompose(const ExactBivarPoly& p);

/// Prints as a sum of `c*x^i*y^j` terms, e.g. "y - x^4" or "3/2*x*y + 1".
std::string to_string(const ExactBivarPoly& p);

}  // namespace holocorr
