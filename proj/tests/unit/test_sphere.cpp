#include "doctest.h"

#include <random>

#include "holocorr/binary_form.hpp"
#include "holocorr/point_index.hpp"
#include "test_support.hpp"

using namespace holocorr;

TEST_CASE("chart conversion examples") {
  const auto zero = SpherePointd::affine(0.0);
  CHECK(zero.h0() == Complex(0));
  CHECK(zero.h1() == Complex(1));

  const auto inf = SpherePointd::infinity();
  CHECK(inf.h0() == Complex(1));
  CHECK(inf.h1() == Complex(0));
  CHECK(inf.is_infinity());
  CHECK_FALSE(inf.to_affine().has_value());

  const double s = std::sqrt(5.0);
  const auto p = SpherePointd::homogeneous(2.0 / s, 1.0 / s);
  CHECK(std::abs(*p.to_affine() - Complex(2.0)) < 1e-15);
}

TEST_CASE("chordal distance examples") {
  CHECK(chordal_distance(SpherePointd::affine(0.0), SpherePointd::infinity()) == doctest::Approx(1.0));
  const auto p = SpherePointd::affine({0.3, -1.7});
  CHECK(chordal_distance(p, p) == 0.0);
  // [1:1]/sqrt2 and [-1:1]/sqrt2: |1*1 - 1*(-1)| / 2 = 1.
  CHECK(chordal_distance(SpherePointd::affine(1.0), SpherePointd::affine(-1.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("canonical representative makes equal points coordinate-equal") {
  const Complex phase = std::polar(1.0, 2.1);
  const auto a = SpherePointd::homogeneous(Complex(3, 1), Complex(-2, 5));
  const auto b = SpherePointd::homogeneous(phase * Complex(3, 1) * 7.0, phase * Complex(-2, 5) * 7.0);
  CHECK(std::abs(a.h0() - b.h0()) < 1e-15);
  CHECK(std::abs(a.h1() - b.h1()) < 1e-15);
  CHECK(a.h1().imag() == 0.0);
  CHECK(a.h1().real() > 0.0);
  CHECK(std::norm(a.h0()) + std::norm(a.h1()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(SpherePointd::homogeneous(0.0, 0.0), PreconditionError);
}

TEST_CASE("metric properties on random points") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = testing::random_point(rng);
    const auto q = testing::random_point(rng);
    const auto r = testing::random_point(rng);
    const double pq = chordal_distance(p, q);
    CHECK(pq == doctest::Approx(chordal_distance(q, p)).epsilon(1e-15));
    CHECK(pq <= chordal_distance(p, r) + chordal_distance(r, q) + 1e-12);
    // Embedding realizes the metric.
    CHECK(std::abs((p.embed() - q.embed()).norm() - pq) < 1e-12);
    // Unit-modulus rescaling of a representative does not change distances.
    const Complex u = std::polar(1.0, 0.37 * trial);
    const double raw = std::abs(u * p.h0() * q.h1() - u * p.h1() * q.h0());
    CHECK(std::abs(raw - pq) < 1e-12);
  }
}

TEST_CASE("chart round trips on 10^4 random points") {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = testing::random_point(rng);
    const auto back = SpherePointd::affine(*p.to_affine());
    worst = std::max(worst, chordal_distance(p, back));
    const auto via_embedding = SpherePointd::from_embedding(p.embed());
    worst = std::max(worst, chordal_distance(p, via_embedding));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("point index merges within radius and finds nearest") {
  PointIndex index(1e-3);
  index.insert(SpherePointd::affine(0.0));
  index.insert(SpherePointd::affine(1.0));
  CHECK(index.find_within(SpherePointd::affine(1e-4), 1e-3) == std::optional<std::size_t>(0));
  CHECK_FALSE(index.find_within(SpherePointd::affine(0.5), 1e-3).has_value());
  const auto n = index.nearest(SpherePointd::affine(0.9));
  REQUIRE(n.has_value());
  CHECK(n->first == 1);
  CHECK(n->second == doctest::Approx(chordal_distance(SpherePointd::affine(0.9), SpherePointd::affine(1.0))));

  std::mt19937_64 rng(3);
  std::vector<SpherePointd> cloud;
  for (int i = 0; i < 300; ++i) cloud.push_back(testing::random_point(rng));
  PointIndex coarse(0.05);
  for (const auto& p : cloud) coarse.insert(p);
  for (int t = 0; t < 50; ++t) {
    const auto q = testing::random_point(rng);
    double brute = 1.0;
    for (const auto& p : cloud) brute = std::min(brute, chordal_distance(p, q));
    CHECK(coarse.nearest(q)->second == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("hausdorff distance") {
  std::vector<SpherePointd> a{SpherePointd::affine(0.0)};
  std::vector<SpherePointd> b{SpherePointd::affine(0.0), SpherePointd::infinity()};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(1.0));
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance({}, a) == 1.0);
}
