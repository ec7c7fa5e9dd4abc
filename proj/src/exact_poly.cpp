#include "holocorr/exact_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holocorr {

// ---------------------------------------------------------------- QPoly

QPoly::QPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

QPoly QPoly::constant(const Rational& c) { return QPoly(std::vector<Rational>{c}); }

void QPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational QPoly::coeff(int i) const {
  if (i < 0 || i > degree()) return Rational(0);
  return coeffs_[static_cast<std::size_t>(i)];
}

Rational QPoly::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QPoly QPoly::derivative() const {
  std::vector<Rational> d;
  for (int i = 1; i <= degree(); ++i) d.emplace_back(coeffs_[static_cast<std::size_t>(i)] * i);
  return QPoly(std::move(d));
}

QPoly QPoly::monic() const {
  if (is_zero()) return *this;
  const Rational lead = leading();
  std::vector<Rational> c(coeffs_);
  for (auto& v : c) v /= lead;
  return QPoly(std::move(c));
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<Rational> c(static_cast<std::size_t>(std::max(a.degree(), b.degree()) + 1));
  for (int i = 0; i <= a.degree(); ++i) c[static_cast<std::size_t>(i)] += a.coeffs_[static_cast<std::size_t>(i)];
  for (int i = 0; i <= b.degree(); ++i) c[static_cast<std::size_t>(i)] += b.coeffs_[static_cast<std::size_t>(i)];
  return QPoly(std::move(c));
}

QPoly operator-(const QPoly& a, const QPoly& b) { return a + Rational(-1) * b; }

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(static_cast<std::size_t>(a.degree() + b.degree() + 1));
  for (int i = 0; i <= a.degree(); ++i) {
    for (int j = 0; j <= b.degree(); ++j) {
      c[static_cast<std::size_t>(i + j)] += a.coeffs_[static_cast<std::size_t>(i)] * b.coeffs_[static_cast<std::size_t>(j)];
    }
  }
  return QPoly(std::move(c));
}

QPoly operator*(const Rational& s, const QPoly& a) {
  std::vector<Rational> c(a.coeffs_);
  for (auto& v : c) v *= s;
  return QPoly(std::move(c));
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw PreconditionError("polynomial division by zero");
  std::vector<Rational> rem(a.coeffs());
  const int db = b.degree();
  if (a.degree() < db) return {QPoly(), a};
  std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree(); k >= db; --k) {
    const Rational t = rem[static_cast<std::size_t>(k)] / b.leading();
    quot[static_cast<std::size_t>(k - db)] = t;
    if (t == 0) continue;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k - db + j)] -= t * b.coeffs()[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(db));
  return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a, y = b;
  while (!y.is_zero()) {
    QPoly r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

// --------------------------------------------------------- ExactBivarPoly

ExactBivarPoly ExactBivarPoly::constant(const Rational& c) { return monomial(c, 0, 0); }

ExactBivarPoly ExactBivarPoly::monomial(const Rational& c, int i, int j) {
  ExactBivarPoly p;
  p.add_term(c, i, j);
  return p;
}

ExactBivarPoly ExactBivarPoly::x() { return monomial(1, 1, 0); }
ExactBivarPoly ExactBivarPoly::y() { return monomial(1, 0, 1); }

ExactBivarPoly ExactBivarPoly::from_univariate(const QPoly& p, bool in_y) {
  ExactBivarPoly out;
  for (int i = 0; i <= p.degree(); ++i) {
    if (in_y) {
      out.add_term(p.coeffs()[static_cast<std::size_t>(i)], 0, i);
    } else {
      out.add_term(p.coeffs()[static_cast<std::size_t>(i)], i, 0);
    }
  }
  return out;
}

Rational ExactBivarPoly::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i > degx_ || j > degy_) return Rational(0);
  return at(i, j);
}

void ExactBivarPoly::resize(int degx, int degy) {
  if (degx == degx_ && degy == degy_) return;
  std::vector<Rational> c(static_cast<std::size_t>((degx + 1) * (degy + 1)));
  for (int i = 0; i <= std::min(degx, degx_); ++i) {
    for (int j = 0; j <= std::min(degy, degy_); ++j) {
      c[static_cast<std::size_t>(i * (degy + 1) + j)] = at(i, j);
    }
  }
  degx_ = degx;
  degy_ = degy;
  c_ = std::move(c);
}

void ExactBivarPoly::trim() {
  int nx = -1, ny = -1;
  for (int i = 0; i <= degx_; ++i) {
    for (int j = 0; j <= degy_; ++j) {
      if (at(i, j) != 0) {
        nx = std::max(nx, i);
        ny = std::max(ny, j);
      }
    }
  }
  if (nx < 0) {
    degx_ = degy_ = -1;
    c_.clear();
    return;
  }
  resize(nx, ny);
}

void ExactBivarPoly::add_term(const Rational& c, int i, int j) {
  if (i < 0 || j < 0) throw PreconditionError("negative exponent in polynomial term");
  if (c == 0) return;
  if (i > degx_ || j > degy_) resize(std::max(i, degx_), std::max(j, degy_));
  at(i, j) += c;
  if (at(i, j) == 0) trim();
}

QPoly ExactBivarPoly::y_coeff(int j) const {
  std::vector<Rational> c;
  if (j >= 0 && j <= degy_) {
    for (int i = 0; i <= degx_; ++i) c.push_back(at(i, j));
  }
  return QPoly(std::move(c));
}

QPoly ExactBivarPoly::x_coeff(int i) const {
  std::vector<Rational> c;
  if (i >= 0 && i <= degx_) {
    for (int j = 0; j <= degy_; ++j) c.push_back(at(i, j));
  }
  return QPoly(std::move(c));
}

ExactBivarPoly ExactBivarPoly::swapped() const {
  ExactBivarPoly out;
  for (int i = 0; i <= degx_; ++i) {
    for (int j = 0; j <= degy_; ++j) out.add_term(at(i, j), j, i);
  }
  return out;
}

ExactBivarPoly ExactBivarPoly::derivative_x() const {
  ExactBivarPoly out;
  for (int i = 1; i <= degx_; ++i) {
    for (int j = 0; j <= degy_; ++j) out.add_term(at(i, j) * i, i - 1, j);
  }
  return out;
}

ExactBivarPoly ExactBivarPoly::derivative_y() const { return swapped().derivative_x().swapped(); }

namespace {

// Leading term: highest y-degree, then highest x-degree.
std::pair<int, int> leading_term(const ExactBivarPoly& p) {
  for (int j = p.degree_y(); j >= 0; --j) {
    for (int i = p.degree_x(); i >= 0; --i) {
      if (p.coeff(i, j) != 0) return {i, j};
    }
  }
  return {-1, -1};
}

}  // namespace

Rational ExactBivarPoly::content() const {
  if (is_zero()) return Rational(0);
  mpz_class num_gcd = 0, den_lcm = 1;
  for (const auto& c : c_) {
    if (c == 0) continue;
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
  }
  Rational out(num_gcd, den_lcm);
  out.canonicalize();
  const auto [li, lj] = leading_term(*this);
  if (at(li, lj) < 0) out = -out;
  return out;
}

ExactBivarPoly ExactBivarPoly::primitive() const {
  if (is_zero()) return *this;
  const Rational c = content();
  ExactBivarPoly out(*this);
  for (auto& v : out.c_) v /= c;
  return out;
}

Rational ExactBivarPoly::operator()(const Rational& xv, const Rational& yv) const {
  Rational acc(0);
  for (int i = degx_; i >= 0; --i) {
    Rational row(0);
    for (int j = degy_; j >= 0; --j) row = row * yv + at(i, j);
    acc = acc * xv + row;
  }
  return acc;
}

BinaryForm ExactBivarPoly::fiber_form(const SpherePointd& xp) const {
  if (is_zero()) throw PreconditionError("fiber of the zero polynomial");
  const Complex x0 = xp.h0(), x1 = xp.h1();
  std::vector<Complex> pw0(static_cast<std::size_t>(degx_ + 1)), pw1(static_cast<std::size_t>(degx_ + 1));
  pw0[0] = pw1[0] = 1.0;
  for (int i = 1; i <= degx_; ++i) {
    pw0[static_cast<std::size_t>(i)] = pw0[static_cast<std::size_t>(i - 1)] * x0;
    pw1[static_cast<std::size_t>(i)] = pw1[static_cast<std::size_t>(i - 1)] * x1;
  }
  std::vector<Complex> c(static_cast<std::size_t>(degy_ + 1), Complex(0));
  for (int i = 0; i <= degx_; ++i) {
    const Complex weight = pw0[static_cast<std::size_t>(i)] * pw1[static_cast<std::size_t>(degx_ - i)];
    for (int j = 0; j <= degy_; ++j) c[static_cast<std::size_t>(j)] += at(i, j).get_d() * weight;
  }
  return BinaryForm(std::move(c));
}

ExactBivarPoly operator+(const ExactBivarPoly& a, const ExactBivarPoly& b) {
  ExactBivarPoly out(a);
  for (int i = 0; i <= b.degx_; ++i) {
    for (int j = 0; j <= b.degy_; ++j) {
      if (b.at(i, j) != 0) out.add_term(b.at(i, j), i, j);
    }
  }
  return out;
}

ExactBivarPoly operator-(const ExactBivarPoly& a, const ExactBivarPoly& b) { return a + Rational(-1) * b; }

ExactBivarPoly operator*(const ExactBivarPoly& a, const ExactBivarPoly& b) {
  ExactBivarPoly out;
  if (a.is_zero() || b.is_zero()) return out;
  out.resize(a.degx_ + b.degx_, a.degy_ + b.degy_);
  for (int i = 0; i <= a.degx_; ++i) {
    for (int j = 0; j <= a.degy_; ++j) {
      if (a.at(i, j) == 0) continue;
      for (int k = 0; k <= b.degx_; ++k) {
        for (int l = 0; l <= b.degy_; ++l) out.at(i + k, j + l) += a.at(i, j) * b.at(k, l);
      }
    }
  }
  out.trim();
  return out;
}

ExactBivarPoly operator*(const Rational& s, const ExactBivarPoly& a) {
  if (s == 0) return {};
  ExactBivarPoly out(a);
  for (auto& v : out.c_) v *= s;
  return out;
}

bool ExactBivarPoly::operator==(const ExactBivarPoly& other) const {
  return degx_ == other.degx_ && degy_ == other.degy_ && c_ == other.c_;
}

ExactBivarPoly pow(const ExactBivarPoly& p, int e) {
  ExactBivarPoly out = ExactBivarPoly::constant(1);
  for (int k = 0; k < e; ++k) out = out * p;
  return out;
}

// -------------------------------------------------------------- resultant

namespace {

Rational determinant(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      const Rational f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

// Sylvester determinant of a (formal degree m) and b (formal degree n),
// coefficient vectors in ascending powers.
Rational sylvester(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  const int m = static_cast<int>(a.size()) - 1;
  const int n = static_cast<int>(b.size()) - 1;
  const auto size = static_cast<std::size_t>(m + n);
  if (size == 0) return Rational(1);
  std::vector<std::vector<Rational>> s(size, std::vector<Rational>(size));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + m - k)] = a[static_cast<std::size_t>(k)];
  }
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k <= n; ++k) s[static_cast<std::size_t>(n + i)][static_cast<std::size_t>(i + n - k)] = b[static_cast<std::size_t>(k)];
  }
  return determinant(std::move(s));
}

// Monomial coefficients of the polynomial through (t, values[t]), t = 0..N.
std::vector<Rational> interpolate(const std::vector<Rational>& values) {
  const std::size_t n = values.size();
  std::vector<Rational> dd(values);
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / Rational(static_cast<long>(level));
      if (i == level) break;
    }
  }
  // Horner on the Newton form with nodes 0, 1, 2, ...
  std::vector<Rational> poly{dd[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    std::vector<Rational> next(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * Rational(static_cast<long>(k));
    }
    next[0] += dd[k];
    poly = std::move(next);
  }
  return poly;
}

}  // namespace

ExactBivarPoly resultant(const ExactBivarPoly& p, const ExactBivarPoly& q) {
  if (p.is_zero() || q.is_zero()) throw PreconditionError("resultant of the zero polynomial");
  const int m = p.degree_y();
  const int n = q.degree_x();
  if (m <= 0 && n <= 0) throw PreconditionError("resultant needs positive degree in the eliminated variable");
  const int du = std::max(0, p.degree_x()) * n;
  const int dw = std::max(0, q.degree_y()) * m;

  // values[iu][iw] = Res at (u, w) = (iu, iw).
  std::vector<std::vector<Rational>> values(static_cast<std::size_t>(du + 1),
                                            std::vector<Rational>(static_cast<std::size_t>(dw + 1)));
  std::vector<QPoly> p_by_v(static_cast<std::size_t>(m + 1)), q_by_v(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= m; ++k) p_by_v[static_cast<std::size_t>(k)] = p.y_coeff(k);
  for (int k = 0; k <= n; ++k) q_by_v[static_cast<std::size_t>(k)] = q.x_coeff(k);
  for (int iu = 0; iu <= du; ++iu) {
    std::vector<Rational> a(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k) a[static_cast<std::size_t>(k)] = p_by_v[static_cast<std::size_t>(k)](Rational(iu));
    for (int iw = 0; iw <= dw; ++iw) {
      std::vector<Rational> b(static_cast<std::size_t>(n + 1));
      for (int k = 0; k <= n; ++k) b[static_cast<std::size_t>(k)] = q_by_v[static_cast<std::size_t>(k)](Rational(iw));
      values[static_cast<std::size_t>(iu)][static_cast<std::size_t>(iw)] = sylvester(a, b);
    }
  }

  // Interpolate in u for each w node, then in w for each u power.
  std::vector<std::vector<Rational>> in_u(static_cast<std::size_t>(dw + 1));
  for (int iw = 0; iw <= dw; ++iw) {
    std::vector<Rational> column(static_cast<std::size_t>(du + 1));
    for (int iu = 0; iu <= du; ++iu) column[static_cast<std::size_t>(iu)] = values[static_cast<std::size_t>(iu)][static_cast<std::size_t>(iw)];
    in_u[static_cast<std::size_t>(iw)] = interpolate(column);
  }
  ExactBivarPoly out;
  for (int i = 0; i <= du; ++i) {
    std::vector<Rational> row(static_cast<std::size_t>(dw + 1));
    for (int iw = 0; iw <= dw; ++iw) row[static_cast<std::size_t>(iw)] = in_u[static_cast<std::size_t>(iw)][static_cast<std::size_t>(i)];
    const std::vector<Rational> coeffs = interpolate(row);
    for (int j = 0; j <= dw; ++j) out.add_term(coeffs[static_cast<std::size_t>(j)], i, j);
  }
  if (out.is_zero()) throw CommonFactor("resultant vanishes identically: inputs share a factor in the eliminated variable");
  return out;
}

// ------------------------------------------------------- gcd in Q[x][y]

namespace {

// Coefficients in y, each a polynomial in x.
using YPoly = std::vector<QPoly>;

YPoly to_y(const ExactBivarPoly& p) {
  YPoly out;
  for (int j = 0; j <= p.degree_y(); ++j) out.push_back(p.y_coeff(j));
  return out;
}

ExactBivarPoly from_y(const YPoly& p) {
  ExactBivarPoly out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (int i = 0; i <= p[j].degree(); ++i) out.add_term(p[j].coeffs()[static_cast<std::size_t>(i)], i, static_cast<int>(j));
  }
  return out;
}

void trim(YPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int degree(const YPoly& p) { return static_cast<int>(p.size()) - 1; }

QPoly content_x(const YPoly& p) {
  QPoly g;
  for (const auto& c : p) g = gcd(g, c);
  return g;
}

YPoly divide_coeffs(const YPoly& p, const QPoly& d) {
  YPoly out;
  for (const auto& c : p) {
    auto [q, r] = divmod(c, d);
    if (!r.is_zero()) throw PreconditionError("inexact content division");
    out.push_back(std::move(q));
  }
  return out;
}

YPoly primitive_x(const YPoly& p) {
  if (p.empty()) return p;
  return divide_coeffs(p, content_x(p));
}

// Pseudo-remainder of a by b in y.
YPoly prem(YPoly a, const YPoly& b) {
  const int db = degree(b);
  const QPoly& lb = b.back();
  while (degree(a) >= db && !a.empty()) {
    const int shift = degree(a) - db;
    const QPoly la = a.back();
    for (auto& c : a) c = lb * c;
    for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(j + shift)] = a[static_cast<std::size_t>(j + shift)] - la * b[static_cast<std::size_t>(j)];
    trim(a);
  }
  return a;
}

}  // namespace

ExactBivarPoly gcd(const ExactBivarPoly& a, const ExactBivarPoly& b) {
  if (a.is_zero()) return b.primitive();
  if (b.is_zero()) return a.primitive();
  YPoly ya = to_y(a), yb = to_y(b);
  const QPoly common = gcd(content_x(ya), content_x(yb));
  ya = primitive_x(ya);
  yb = primitive_x(yb);
  if (degree(ya) < degree(yb)) std::swap(ya, yb);
  YPoly g;
  while (true) {
    if (degree(yb) == 0) {
      g = YPoly{QPoly::constant(1)};
      break;
    }
    YPoly r = prem(ya, yb);
    if (r.empty()) {
      g = yb;
      break;
    }
    ya = std::move(yb);
    yb = primitive_x(r);
  }
  for (auto& c : g) c = common * c;
  return from_y(g).primitive();
}

ExactBivarPoly exact_divide(const ExactBivarPoly& a, const ExactBivarPoly& b) {
  if (b.is_zero()) throw PreconditionError("division by the zero polynomial");
  YPoly rem = to_y(a);
  const YPoly yb = to_y(b);
  const int db = degree(yb);
  YPoly quot(static_cast<std::size_t>(std::max(0, degree(rem) - db + 1)));
  while (!rem.empty() && degree(rem) >= db) {
    const int shift = degree(rem) - db;
    auto [t, r] = divmod(rem.back(), yb.back());
    if (!r.is_zero()) throw PreconditionError("polynomial does not divide exactly");
    quot[static_cast<std::size_t>(shift)] = quot[static_cast<std::size_t>(shift)] + t;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(j + shift)] = rem[static_cast<std::size_t>(j + shift)] - t * yb[static_cast<std::size_t>(j)];
    if (!rem.back().is_zero()) throw PreconditionError("polynomial does not divide exactly");
    trim(rem);
  }
  if (!rem.empty()) throw PreconditionError("polynomial does not divide exactly");
  return from_y(quot);
}

// -------------------------------------------------- squarefree (Yun)

namespace {

std::vector<std::pair<QPoly, int>> yun_univariate(const QPoly& f) {
  std::vector<std::pair<QPoly, int>> out;
  if (f.degree() <= 0) return out;
  const QPoly df = f.derivative();
  const QPoly a0 = gcd(f, df);
  QPoly b = divmod(f, a0).first;
  QPoly c = divmod(df, a0).first;
  QPoly d = c - b.derivative();
  for (int i = 1; b.degree() > 0; ++i) {
    const QPoly a = gcd(b, d);
    const QPoly bn = divmod(b, a).first;
    c = divmod(d, a).first;
    d = c - bn.derivative();
    if (a.degree() > 0) out.emplace_back(a, i);
    b = bn;
  }
  return out;
}

// Yun in y for f primitive with respect to x-content.
std::vector<SquarefreeFactor> yun_in_y(const ExactBivarPoly& f) {
  std::vector<SquarefreeFactor> out;
  const ExactBivarPoly df = f.derivative_y();
  const ExactBivarPoly a0 = gcd(f, df);
  ExactBivarPoly b = exact_divide(f, a0);
  ExactBivarPoly c = exact_divide(df, a0);
  ExactBivarPoly d = c - b.derivative_y();
  for (int i = 1; b.degree_y() > 0; ++i) {
    const ExactBivarPoly a = gcd(b, d);
    const ExactBivarPoly bn = exact_divide(b, a);
    c = exact_divide(d, a);
    d = c - bn.derivative_y();
    if (a.degree_y() > 0) out.push_back({a.primitive(), i});
    b = bn;
  }
  return out;
}

}  // namespace

std::vector<SquarefreeFactor> squarefree_decompose(const ExactBivarPoly& p) {
  if (p.is_zero()) throw PreconditionError("squarefree decomposition of the zero polynomial");
  std::vector<SquarefreeFactor> out;
  const YPoly yp = to_y(p);
  const QPoly cont = content_x(yp);
  if (p.degree_y() > 0) out = yun_in_y(from_y(divide_coeffs(yp, cont)));
  for (auto& [factor, mult] : yun_univariate(cont)) {
    out.push_back({ExactBivarPoly::from_univariate(factor).primitive(), mult});
  }
  if (out.empty()) return out;
  std::stable_sort(out.begin(), out.end(),
                   [](const SquarefreeFactor& a, const SquarefreeFactor& b) { return a.multiplicity > b.multiplicity; });
  return out;
}

// ------------------------------------------------------------- printing

std::string to_string(const ExactBivarPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int j = p.degree_y(); j >= 0; --j) {
    for (int i = p.degree_x(); i >= 0; --i) {
      Rational c = p.coeff(i, j);
      if (c == 0) continue;
      const bool negative = c < 0;
      if (negative) c = -c;
      if (first) {
        if (negative) os << '-';
      } else {
        os << (negative ? " - " : " + ");
      }
      first = false;
      const bool unit = (c == 1) && (i > 0 || j > 0);
      bool need_star = false;
      if (!unit) {
        os << c.get_str();
        need_star = true;
      }
      auto var = [&](char name, int e) {
        if (e == 0) return;
        if (need_star) os << '*';
        os << name;
        if (e > 1) os << '^' << e;
        need_star = true;
      };
      var('x', i);
      var('y', j);
    }
  }
  return os.str();
}

}  // namespace holocorr
