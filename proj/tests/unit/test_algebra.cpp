#include "doctest.h"

#include <algorithm>
#include <random>

#include "holocorr/binary_form.hpp"
#include "holocorr/exact_poly.hpp"
#include "test_support.hpp"

using namespace holocorr;

namespace {

// Multiset comparison of root lists by greedy chordal matching.
bool same_roots(std::vector<Root> got, std::vector<std::pair<SpherePointd, int>> want, double tol) {
  int total_got = 0, total_want = 0;
  for (const auto& r : got) total_got += r.multiplicity;
  for (const auto& w : want) total_want += w.second;
  if (total_got != total_want) return false;
  for (const auto& [p, m] : want) {
    auto it = std::find_if(got.begin(), got.end(), [&](const Root& r) { return chordal_distance(r.point, p) < tol; });
    if (it == got.end() || it->multiplicity < m) return false;
    it->multiplicity -= m;
  }
  return true;
}

// Form with roots r_i (as points), expanded as prod (b_i h0 - a_i h1) for r = [a : b].
BinaryForm form_from_roots(const std::vector<SpherePointd>& roots) {
  BinaryForm f({Complex(1)});
  for (const auto& r : roots) f = f * BinaryForm({-r.h0(), r.h1()});
  return f;
}

Complex eval_numeric(const ExactBivarPoly& p, Complex x, Complex y) {
  Complex acc(0);
  for (int i = 0; i <= p.degree_x(); ++i) {
    for (int j = 0; j <= p.degree_y(); ++j) acc += p.coeff(i, j).get_d() * std::pow(x, i) * std::pow(y, j);
  }
  return acc;
}

double abs_coeff_sum(const ExactBivarPoly& p, Complex x, Complex y) {
  double acc = 0;
  for (int i = 0; i <= p.degree_x(); ++i) {
    for (int j = 0; j <= p.degree_y(); ++j) acc += std::abs(p.coeff(i, j).get_d()) * std::pow(std::abs(x), i) * std::pow(std::abs(y), j);
  }
  return acc;
}

ExactBivarPoly random_poly(std::mt19937_64& rng, int dx, int dy, int range) {
  std::uniform_int_distribution<int> c(-range, range);
  ExactBivarPoly p;
  for (int i = 0; i <= dx; ++i) {
    for (int j = 0; j <= dy; ++j) p.add_term(Rational(c(rng)), i, j);
  }
  // Force the stated bidegree.
  p.add_term(Rational(range + 1), dx, dy);
  return p;
}

std::vector<Complex> numeric_coeffs_in_y(const ExactBivarPoly& p, Complex x) {
  std::vector<Complex> c(static_cast<std::size_t>(p.degree_y() + 1));
  for (int j = 0; j <= p.degree_y(); ++j) {
    for (int i = 0; i <= p.degree_x(); ++i) c[static_cast<std::size_t>(j)] += p.coeff(i, j).get_d() * std::pow(x, i);
  }
  return c;
}

const ExactBivarPoly X = ExactBivarPoly::x();
const ExactBivarPoly Y = ExactBivarPoly::y();
ExactBivarPoly C(long v) { return ExactBivarPoly::constant(Rational(v)); }

}  // namespace

TEST_CASE("form_roots examples") {
  const auto zero = SpherePointd::affine(0.0), inf = SpherePointd::infinity();
  CHECK(same_roots(form_roots(BinaryForm({0.0, 1.0, 0.0})), {{zero, 1}, {inf, 1}}, 1e-12));
  CHECK(same_roots(form_roots(BinaryForm({-1.0, 0.0, 1.0})),
                   {{SpherePointd::affine(1.0), 1}, {SpherePointd::affine(-1.0), 1}}, 1e-12));
  // h0^2 vanishes at affine 0 twice.
  CHECK(same_roots(form_roots(BinaryForm({0.0, 0.0, 1.0})), {{zero, 2}}, 1e-12));
  // Degree drop: the constant form 1 of degree 3 has a triple root at infinity.
  CHECK(same_roots(form_roots(BinaryForm({1.0, 0.0, 0.0, 0.0})), {{inf, 3}}, 1e-12));
  CHECK_THROWS_AS(BinaryForm({0.0, 0.0}), PreconditionError);
}

TEST_CASE("form_roots recovers random well-separated roots up to degree 12") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 12;
    std::vector<SpherePointd> roots;
    while (static_cast<int>(roots.size()) < d) {
      const auto p = testing::random_point(rng);
      bool separated = true;
      for (const auto& r : roots) separated = separated && chordal_distance(r, p) > 0.15;
      if (separated) roots.push_back(p);
    }
    const auto got = form_roots(form_from_roots(roots));
    std::vector<std::pair<SpherePointd, int>> want;
    for (const auto& r : roots) want.push_back({r, 1});
    CHECK(same_roots(got, want, 1e-9));
  }
}

TEST_CASE("form_roots merges double roots and keeps residuals small") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> gi(-3, 3);
  int merged_checks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Gaussian-integer roots give exact coefficients.
    const auto a = SpherePointd::affine(Complex(gi(rng), gi(rng)));
    const auto b = SpherePointd::affine(Complex(gi(rng), gi(rng)) * 0.5);
    if (chordal_distance(a, b) < 0.05) continue;
    const int ma = 1 + trial % 2, mb = 1 + (trial / 2) % 2;
    std::vector<SpherePointd> roots(static_cast<std::size_t>(ma), a);
    roots.insert(roots.end(), static_cast<std::size_t>(mb), b);
    roots.push_back(SpherePointd::affine(Complex(7.5, 0.25)));
    const auto f = form_from_roots(roots);
    const auto got = form_roots(f);
    int total = 0;
    for (const auto& r : got) {
      total += r.multiplicity;
      CHECK(std::abs(f(r.point)) <= 1e-9 * f.norm());
    }
    CHECK(total == f.degree());
    INFO("multiplicities " << ma << ", " << mb);
    CHECK(same_roots(got, {{a, ma}, {b, mb}, {roots.back(), 1}}, 1e-7));
    ++merged_checks;
  }
  CHECK(merged_checks > 100);
}

TEST_CASE("triple roots split by rounding stay close to the true root") {
  const auto a = SpherePointd::affine({0.4, -0.7});
  const auto f = form_from_roots({a, a, a, SpherePointd::affine(2.0)});
  const auto got = form_roots(f);
  int total = 0;
  for (const auto& r : got) {
    total += r.multiplicity;
    if (chordal_distance(r.point, SpherePointd::affine(2.0)) > 0.1) CHECK(chordal_distance(r.point, a) < 1e-4);
  }
  CHECK(total == 4);
}

TEST_CASE("rational polynomial arithmetic") {
  const QPoly p({Rational(-1), Rational(0), Rational(1)});  // x^2 - 1
  const QPoly q({Rational(1), Rational(1)});                 // x + 1
  const auto [quo, rem] = divmod(p, q);
  CHECK(quo == QPoly({Rational(-1), Rational(1)}));
  CHECK(rem.is_zero());
  CHECK(gcd(p, q) == q);
  CHECK(gcd(p, QPoly({Rational(2)})) == QPoly::constant(1));
}

TEST_CASE("bivariate printing and content") {
  CHECK(to_string(Y - pow(X, 4)) == "y - x^4");
  const auto p = Rational(3, 2) * X * Y + C(1);
  CHECK(to_string(p) == "3/2*x*y + 1");
  CHECK(to_string((C(-6) * Y + C(4) * X).primitive()) == "3*y - 2*x");
  CHECK(to_string(ExactBivarPoly()) == "0");
}

TEST_CASE("resultant examples") {
  // p(u, v) = v - u^2, q(v, w) = w - v^2.
  const auto r = resultant(Y - X * X, Y - X * X);
  CHECK((r == Y - pow(X, 4) || r == pow(X, 4) - Y));
  // Res_v(v, v - 1): Sylvester matrix [[1, 0], [1, -1]] has determinant -1.
  // Here p = v (x = u, y = v) and q = v - 1 viewed in (x = v, y = w).
  const auto r2 = resultant(Y, X - C(1));
  CHECK(r2 == C(-1));
  // v (v - u) and v (w - v) share the factor v for every (u, w).
  CHECK_THROWS_AS(resultant(Y * (Y - X), X * (Y - X)), CommonFactor);
}

TEST_CASE("resultant vanishes exactly where the fibers share a root") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> small(-3, 3);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int dpu = 1 + trial % 2, dpv = 1 + (trial / 2) % 2, dqv = 1 + (trial / 4) % 2, dqw = 1 + (trial / 8) % 2;
    const auto p = random_poly(rng, dpu, dpv, 3);  // p(u, v)
    const auto q = random_poly(rng, dqv, dqw, 3);  // q(v, w)
    ExactBivarPoly r;
    try {
      r = resultant(p, q);
    } catch (const CommonFactor&) {
      continue;
    }
    // Brute force: for u0, take a root v0 of p(u0, .), then a root w0 of q(v0, .).
    const Complex u0(small(rng) + 0.5, small(rng) * 0.25);
    const auto vroots = form_roots(BinaryForm(numeric_coeffs_in_y(p, u0)));
    for (const auto& vr : vroots) {
      if (!vr.point.to_affine() || std::abs(*vr.point.to_affine()) > 50) continue;
      const Complex v0 = *vr.point.to_affine();
      const auto wroots = form_roots(BinaryForm(numeric_coeffs_in_y(q, v0)));
      for (const auto& wr : wroots) {
        if (!wr.point.to_affine() || std::abs(*wr.point.to_affine()) > 50) continue;
        const Complex w0 = *wr.point.to_affine();
        CHECK(std::abs(eval_numeric(r, u0, w0)) <= 1e-7 * abs_coeff_sum(r, u0, w0));
        ++checked;
      }
    }
    // Off the shared-root locus it does not vanish: pick w1 away from every w0.
    const Complex w1(0.37, 1.91);
    bool shares = false;
    for (const auto& vr : vroots) {
      if (!vr.point.to_affine()) continue;
      shares = shares || std::abs(eval_numeric(q, *vr.point.to_affine(), w1)) < 1e-6;
    }
    if (!shares) CHECK(std::abs(eval_numeric(r, u0, w1)) > 1e-9 * abs_coeff_sum(r, u0, w1));
  }
  CHECK(checked > 40);
}

TEST_CASE("squarefree decomposition examples") {
  const auto a = Y - X, b = Y + X;
  const auto parts = squarefree_decompose(a * a * b);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].multiplicity == 2);
  CHECK((parts[0].factor == a.primitive() || parts[0].factor == (C(-1) * a).primitive()));
  CHECK(parts[1].multiplicity == 1);
  CHECK(parts[1].factor == b.primitive());

  const auto c = Y - X * X;
  const auto cube = squarefree_decompose(pow(c, 3));
  REQUIRE(cube.size() == 1);
  CHECK(cube[0].multiplicity == 3);
  CHECK(cube[0].factor == c);

  const auto sq = squarefree_decompose(c * b);
  REQUIRE(sq.size() == 1);
  CHECK(sq[0].multiplicity == 1);
}

TEST_CASE("squarefree reconstruction is exact up to a constant") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f1 = random_poly(rng, 1, 1, 4);
    const auto f2 = random_poly(rng, 2, 1, 4);
    const auto f3 = Y - random_poly(rng, 1, 0, 4);
    const auto input = Rational(5, 3) * pow(f1, 1 + trial % 3) * f2 * pow(f3, 2);
    const auto parts = squarefree_decompose(input);
    ExactBivarPoly product = C(1);
    for (const auto& part : parts) product = product * pow(part.factor, part.multiplicity);
    CHECK(product.primitive() == input.primitive());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto g = gcd(parts[i].factor, parts[i].factor.derivative_y());
      CHECK(g.degree_y() <= 0);
      for (std::size_t j = i + 1; j < parts.size(); ++j) CHECK(gcd(parts[i].factor, parts[j].factor).is_constant());
    }
  }
}

TEST_CASE("gcd and exact division") {
  const auto a = Y - X * X, b = X * Y + C(3), c = Y + C(2) * X;
  CHECK(gcd(a * b, a * c) == a.primitive());
  CHECK(exact_divide(a * b, b) == a);
  CHECK_THROWS_AS(exact_divide(a * b, c), PreconditionError);
}
