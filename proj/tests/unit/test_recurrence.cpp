#include "doctest.h"

#include <map>
#include <random>

#include "holocorr/recurrence.hpp"
#include "test_support.hpp"

using namespace holocorr;

namespace {

RationalMap poly_map(std::vector<double> c) {
  std::vector<Complex> cc(c.begin(), c.end());
  return RationalMap::polynomial(std::move(cc));
}

const std::vector<RationalMap> kAnnulusMaps{poly_map({0, 0, 1}), poly_map({0, 0, 0.5})};
const Correspondence kAnnulus = Correspondence::from_maps(kAnnulusMaps);
const Correspondence kSquare = Correspondence::from_maps({poly_map({0, 0, 1})});
const Region kShell = Region::annulus(1.0, 2.0, true);

SpherePointd pt(Complex z) { return SpherePointd::affine(z); }

// Largest number of visits to R along any word orbit of length <= n,
// by enumerating all words.
int brute_max_visits(const std::vector<RationalMap>& gens, const SpherePointd& x, const Region& r, int n) {
  int best = 0;
  std::vector<std::pair<SpherePointd, int>> level{{x, 0}};
  for (int k = 1; k <= n; ++k) {
    std::vector<std::pair<SpherePointd, int>> next;
    for (const auto& [p, v] : level) {
      for (const auto& g : gens) {
        const SpherePointd q = g(p);
        const int w = v + (r.contains(q) ? 1 : 0);
        best = std::max(best, w);
        next.emplace_back(q, w);
      }
    }
    level = std::move(next);
  }
  return best;
}

// Measure with one unit atom per cell center of `grid` inside r.
AtomicMeasure cell_measure(const RasterGrid& grid, const Region& r) {
  SupportRaster shape;
  shape.grid = grid;
  AtomicMeasure mu;
  for (int row = 0; row < grid.resolution; ++row) {
    for (int col = 0; col < grid.resolution; ++col) {
      const auto p = pt(shape.cell_center(row, col));
      if (r.contains(p)) mu.atoms.push_back({p, 1.0});
    }
  }
  return mu;
}

}  // namespace

TEST_CASE("region membership on the shell") {
  CHECK(kShell.contains(pt(1.5)));
  CHECK_FALSE(kShell.contains(pt(0.5)));
  const Membership m = kShell.classify(pt(1.0));
  CHECK(m.inside);
  CHECK(m.near_boundary);
  CHECK_FALSE(kShell.classify(pt(1.5)).near_boundary);

  // Huge affine values behave like infinity instead of overflowing.
  const Membership far = kShell.classify(pt(1e200));
  CHECK_FALSE(far.inside);
  CHECK_FALSE(far.near_boundary);
  const Region right = Region::half_plane(1.0, 0.0, 0.0);
  CHECK(right.classify(pt(1e200)).near_boundary);
  CHECK(right.contains(pt(1e-3)));
  CHECK_FALSE(right.contains(pt(-1e-3)));
}

TEST_CASE("hits_region") {
  const SpherePointd x = pt(std::sqrt(2.0));
  const HitResult h1 = hits_region(kAnnulus, x, 1, kShell);
  CHECK(h1.status == HitStatus::hit);
  REQUIRE(h1.witness);
  CHECK(kShell.contains(*h1.witness));
  CHECK(hits_region(kAnnulus, x, 2, kShell).status == HitStatus::hit);
  const HitResult miss = hits_region(kAnnulus, pt(3.0), 1, kShell);
  CHECK(miss.status == HitStatus::miss);
  CHECK_FALSE(miss.witness);
  CHECK_THROWS_AS(hits_region(kAnnulus, x, 0, kShell), PreconditionError);

  SUBCASE("pruning turns a miss into unknown") {
    // F^3(3) has 8 points, none in the shell; keep only two of them.
    const HitResult capped = hits_region(kAnnulus, pt(3.0), 3, kShell, Caps{2, 1e-9});
    CHECK(capped.status == HitStatus::unknown_capped);
    CHECK(hits_region(kAnnulus, pt(3.0), 3, kShell).status == HitStatus::miss);
  }
}

TEST_CASE("return times") {
  const SpherePointd x = pt(std::sqrt(2.0));
  const ReturnTimes rt = return_times(kAnnulus, x, kShell, 6);
  CHECK(rt.times == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK_FALSE(rt.capped);
  REQUIRE(rt.certificates.size() == 6);
  for (const auto& c : rt.certificates) CHECK(validate_certificate(kAnnulus, x, kShell, c));

  CHECK(return_times(kSquare, pt(3.0), kShell, 8).times.empty());
  CHECK_THROWS_AS(return_times(kAnnulus, x, kShell, 0), PreconditionError);

  SUBCASE("tampered certificates are rejected") {
    ReturnCertificate bad = rt.certificates[2];
    bad.path[1].point = pt(1.7);
    CHECK_FALSE(validate_certificate(kAnnulus, x, kShell, bad));
    ReturnCertificate outside = rt.certificates[0];
    CHECK_FALSE(validate_certificate(kAnnulus, x, Region::annulus(3.0, 4.0, true), outside));
    ReturnCertificate short_path = rt.certificates[3];
    short_path.path.pop_back();
    CHECK_FALSE(validate_certificate(kAnnulus, x, kShell, short_path));
  }

  SUBCASE("prefix monotonicity in the horizon") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(1.05, 1.95), angle(0, 6.283185307179586);
    const Region b = Region::annulus(1.2, 1.8, true);
    for (int trial = 0; trial < 10; ++trial) {
      const SpherePointd p = pt(std::polar(radius(rng), angle(rng)));
      const auto small = return_times(kAnnulus, p, b, 8, Caps{64, 1e-9}).times;
      const auto large = return_times(kAnnulus, p, b, 16, Caps{64, 1e-9}).times;
      REQUIRE(small.size() <= large.size());
      CHECK(std::equal(small.begin(), small.end(), large.begin()));
    }
  }

  SUBCASE("certificates survive pruning") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> radius(1.05, 1.95), angle(0, 6.283185307179586);
    const Region b = Region::annulus(1.2, 1.8, true);
    const Correspondence back = adjoint(kAnnulus);
    for (int trial = 0; trial < 5; ++trial) {
      const SpherePointd p = pt(std::polar(radius(rng), angle(rng)));
      const ReturnTimes r = return_times(back, p, b, 12, Caps{32, 1e-9});
      CHECK(r.capped);
      for (const auto& c : r.certificates) CHECK(validate_certificate(back, p, b, c));
    }
  }
}

TEST_CASE("word witness") {
  const SpherePointd x = pt(std::sqrt(2.0));
  const WordChain chain = word_witness(kAnnulusMaps, x, kShell, 10, 4);
  REQUIRE(chain.words.size() == 4);
  CHECK(chain.words[0] == Word{0});
  CHECK(chain.words[1] == Word{0, 1});
  CHECK(chain.words[2] == Word{0, 1, 1});
  CHECK(chain.words[3] == Word{0, 1, 1, 1});
  for (const auto& v : chain.values) CHECK(chordal_distance(v, pt(2.0)) < 1e-12);
  CHECK(validate_chain(kAnnulusMaps, x, kShell, chain));

  CHECK(word_witness({poly_map({0, 0, 1})}, pt(3.0), kShell, 10, 4).words.empty());

  SUBCASE("validation catches broken chains") {
    WordChain bad = chain;
    bad.words[2] = Word{1, 1, 1};
    CHECK_FALSE(validate_chain(kAnnulusMaps, x, kShell, bad));
    WordChain flat = chain;
    flat.words[1] = Word{0};
    CHECK_FALSE(validate_chain(kAnnulusMaps, x, kShell, flat));
    WordChain out = chain;
    out.words[1] = Word{0, 0};
    CHECK_FALSE(validate_chain(kAnnulusMaps, x, kShell, out));
  }

  SUBCASE("chain length matches exhaustive word search") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(0.9, 2.1), angle(0, 6.283185307179586);
    const std::vector<RationalMap> gens{poly_map({0, 0, 1}), poly_map({0, 0, 0.5}), poly_map({-1, 0, 1})};
    for (int trial = 0; trial < 20; ++trial) {
      const Region r = trial % 2 ? Region::annulus(1.0 + 0.3 * std::abs(u(rng)), 1.6 + 0.4 * std::abs(u(rng)), true)
                                 : Region::disc(Complex(u(rng), u(rng)), 0.3 + 0.3 * std::abs(u(rng)), true);
      const SpherePointd p = pt(std::polar(radius(rng), angle(rng)));
      const int horizon = 7;
      const int expected = brute_max_visits(gens, p, r, horizon);
      const WordChain c = word_witness(gens, p, r, horizon, 100);
      CHECK(static_cast<int>(c.words.size()) == expected);
      CHECK(validate_chain(gens, p, r, c));
    }
  }
}

TEST_CASE("weighted sampling without replacement") {
  const std::vector<double> w{1, 2, 3, 4};
  std::map<std::size_t, int> first;
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) first[weighted_sample(w, 1, static_cast<std::uint64_t>(s))[0]]++;
  // Single draws follow the weights exactly.
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(first[i] / double(trials) - w[i] / 10.0) < 0.015);

  const auto all = weighted_sample(w, 10, 1);
  CHECK(all.size() == 4);
  std::vector<std::size_t> sorted(all);
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(weighted_sample({0.0, 1.0}, 2, 7) == std::vector<std::size_t>{1});
  CHECK(weighted_sample(w, 3, 9) == weighted_sample(w, 3, 9));
}

TEST_CASE("recurrence experiment") {
  ChaosOptions co;
  co.count = 2000;
  co.rng_seed = 4;
  const AtomicMeasure mu = chaos_sample(kAnnulus, pt(1.5), co);
  const Region b = Region::annulus(1.2, 1.8, true);
  RecurrenceOptions opt;
  opt.horizon = 16;
  opt.min_returns = 3;
  opt.max_points = 40;
  opt.seed = 8;

  SUBCASE("empty region") {
    const ReturnReport rep = recurrence_experiment(kAnnulus, mu, Region::disc(Complex(10.0, 0.0), 0.01, true),
                                                   RecurrenceDirection::forward, opt);
    CHECK(rep.aggregate.region_mass_zero);
    CHECK(rep.records.empty());
  }

  SUBCASE("forward") {
    const ReturnReport rep = recurrence_experiment(kAnnulus, mu, b, RecurrenceDirection::forward, opt);
    CHECK(rep.records.size() == 40);
    CHECK(rep.aggregate.atoms_sampled == 40);
    CHECK(rep.aggregate.region_mass > 0.3);
    for (const auto& rec : rep.records) {
      CHECK(b.contains(rec.atom.point));
      CHECK(std::is_sorted(rec.times.begin(), rec.times.end()));
      REQUIRE(rec.certificates.size() == rec.times.size());
      for (const auto& c : rec.certificates) CHECK(validate_certificate(kAnnulus, rec.atom.point, b, c));
    }
    CHECK(rep.aggregate.fraction_min_returns > 0.9);
    // Sampled atoms are distinct.
    std::vector<std::size_t> ids;
    for (const auto& rec : rep.records) ids.push_back(rec.atom_index);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  }

  SUBCASE("backward equals forward on the adjoint, any worker count") {
    const ReturnReport bwd = recurrence_experiment(kAnnulus, mu, b, RecurrenceDirection::backward, opt);
    RecurrenceOptions par = opt;
    par.workers = 3;
    const ReturnReport fwd = recurrence_experiment(adjoint(kAnnulus), mu, b, RecurrenceDirection::forward, par);
    REQUIRE(bwd.records.size() == fwd.records.size());
    for (std::size_t i = 0; i < bwd.records.size(); ++i) {
      CHECK(bwd.records[i].atom_index == fwd.records[i].atom_index);
      CHECK(bwd.records[i].times == fwd.records[i].times);
      CHECK(bwd.records[i].unknown == fwd.records[i].unknown);
    }
    CHECK(bwd.aggregate.fraction_at_least == fwd.aggregate.fraction_at_least);
    CHECK(bwd.aggregate.fraction_min_returns > 0.9);
  }

  SUBCASE("word witnesses") {
    RecurrenceOptions w = opt;
    w.witnesses = true;
    w.generators = kAnnulusMaps;
    const ReturnReport rep = recurrence_experiment(kAnnulus, mu, b, RecurrenceDirection::forward, w);
    for (const auto& rec : rep.records) {
      REQUIRE(rec.chain);
      CHECK(validate_chain(kAnnulusMaps, rec.atom.point, b, *rec.chain));
    }
    CHECK(rep.aggregate.fraction_full_chain > 0.9);
    CHECK_THROWS_AS(recurrence_experiment(kAnnulus, mu, b, RecurrenceDirection::backward, w), PreconditionError);
  }
}

TEST_CASE("support raster") {
  SUBCASE("dirac at the origin") {
    const SupportRaster r = support_raster(AtomicMeasure::dirac(pt(0.0)), {-3, 3, -3, 3, 16}, 0.5);
    CHECK(std::count(r.marked.begin(), r.marked.end(), true) == 1);
    const auto centers = r.marked_centers();
    REQUIRE(centers.size() == 1);
    const Complex c = *centers[0].to_affine();
    // Cell side 0.375: the marked cell has 0 on its closure.
    CHECK(std::abs(c.real()) <= 0.1875 + 1e-12);
    CHECK(std::abs(c.imag()) <= 0.1875 + 1e-12);
  }

  SUBCASE("orientation and outside mass") {
    AtomicMeasure mu;
    mu.atoms = {{pt({0.1, 1.5}), 0.25}, {pt({0.1, -1.5}), 0.25}, {pt(7.0), 0.25}, {SpherePointd::infinity(), 0.25}};
    const SupportRaster r = support_raster(mu, {-2, 2, -2, 2, 16}, 0.1);
    CHECK(r.outside_mass == doctest::Approx(0.5));
    const auto centers = r.marked_centers();
    REQUIRE(centers.size() == 2);
    // Row-major from the top: the upper atom comes first.
    CHECK(centers[0].to_affine()->imag() > 0);
    CHECK(centers[1].to_affine()->imag() < 0);
  }

  CHECK_THROWS_AS(support_raster(AtomicMeasure::dirac(pt(0.0)), {-1, 1, -1, 1, 8}, 0.0), PreconditionError);

  SUBCASE("hausdorff distance to a reference region") {
    const RasterGrid g{-2.5, 2.5, -2.5, 2.5, 64};
    const SupportRaster exact = support_raster(cell_measure(g, kShell), g, 0.5, kShell);
    REQUIRE(exact.hausdorff);
    CHECK(*exact.hausdorff == 0.0);
    const SupportRaster other = support_raster(cell_measure(g, Region::annulus(1.0, 1.5, true)), g, 0.5, kShell);
    // Cells near |z| = 2 are missing: chordal gap between radii 1.5 and 2 is about 0.12.
    CHECK(*other.hausdorff > 0.08);
  }
}

TEST_CASE("support invariance on the annulus") {
  const RasterGrid g{-2.2, 2.2, -2.2, 2.2, 96};
  const SupportRaster r = support_raster(cell_measure(g, kShell), g, 0.5);
  const double delta = 2 * r.max_cell_diagonal();
  const SupportInvarianceResult res = support_invariance_check(kAnnulus, r, delta, {}, 2);
  CHECK(res.violations.empty());
  CHECK(res.checked > 1000);
  // The forward image of a support point need not stay in the support.
  CHECK(res.forward_not_contained > 0);
  CHECK(forward_escapes_support(kAnnulus, r, pt(2.0), delta));

  SUBCASE("a too-small support is flagged") {
    const Region half = Region::intersection_of({kShell, Region::half_plane(1.0, 0.0, 0.0)});
    const SupportRaster thin = support_raster(cell_measure(g, half), g, 0.5);
    const SupportInvarianceResult bad = support_invariance_check(kAnnulus, thin, delta);
    CHECK_FALSE(bad.violations.empty());
  }
}

TEST_CASE("mass inequalities") {
  ChaosOptions co;
  co.count = 20000;
  co.rng_seed = 17;
  const AtomicMeasure mu = chaos_sample(kAnnulus, pt(1.5), co);

  const MassInequality all = mass_inequality_check(kAnnulus, mu, Region::all());
  CHECK(all.region == doctest::Approx(1.0));
  CHECK(all.preimage == doctest::Approx(1.0));
  CHECK(all.image == doctest::Approx(1.0));
  CHECK(all.pass());

  const MassInequality none = mass_inequality_check(kAnnulus, mu, Region::empty());
  CHECK(none.region == 0.0);
  CHECK(none.preimage == 0.0);
  CHECK(none.image == 0.0);
  CHECK(none.pass());

  const MassInequality ring = mass_inequality_check(kAnnulus, mu, Region::annulus(1.4, 1.6, true), {}, 2);
  CHECK(ring.pass());
  CHECK(ring.dt == 4);
  CHECK(ring.region <= ring.image);

  SUBCASE("batched regions match single checks") {
    const auto regions = random_regions(mu, 6, 21);
    REQUIRE(regions.size() == 6);
    CHECK(regions[0].op() == Region::Op::primitive);
    CHECK(std::holds_alternative<DiscPrimitive>(regions[0].primitive()));
    CHECK(std::holds_alternative<AnnulusPrimitive>(regions[1].primitive()));
    CHECK(to_string(random_regions(mu, 6, 21)[3]) == to_string(regions[3]));
    const auto batch = mass_inequality_check(kAnnulus, mu, regions, {}, 3);
    for (std::size_t k = 0; k < regions.size(); ++k) {
      const MassInequality one = mass_inequality_check(kAnnulus, mu, regions[k]);
      CHECK(batch[k].region == one.region);
      CHECK(batch[k].preimage == one.preimage);
      CHECK(batch[k].image == one.image);
      CHECK(batch[k].pass() == one.pass());
      CHECK(batch[k].pass());
    }
  }

  SUBCASE("a non-invariant measure fails") {
    const MassInequality bad = mass_inequality_check(kAnnulus, AtomicMeasure::dirac(pt(1.9)),
                                                     Region::disc(Complex(1.9, 0.0), 0.01, true));
    CHECK(bad.region == 1.0);
    CHECK(bad.preimage == 0.0);
    CHECK_FALSE(bad.preimage_ok);
    CHECK_FALSE(bad.pass());
  }
}
