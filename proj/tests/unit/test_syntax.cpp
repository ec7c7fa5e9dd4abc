#include "doctest.h"

#include <random>

#include "holocorr/syntax.hpp"
#include "test_support.hpp"

using namespace holocorr;

namespace {

SpherePointd pt(Complex z) { return SpherePointd::affine(z); }

std::size_t parse_error_position(const std::string& text) {
  try {
    parse_generators(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  return std::string::npos;
}

}  // namespace

TEST_CASE("tokenizer") {
  const auto t = tokenize("3i + 2.5e-1*z^2; [2] (z)");
  REQUIRE(t.size() == 15);
  CHECK(t[0].kind == TokenKind::imaginary);
  CHECK(t[0].text == "3i");
  CHECK(t[2].kind == TokenKind::number);
  CHECK(t[2].text == "2.5e-1");
  CHECK(t[4].kind == TokenKind::identifier);
  CHECK(t[4].position == 12);
  CHECK(t.back().kind == TokenKind::end);
  CHECK_THROWS_AS(tokenize("z $ 2"), ParseError);
  CHECK_THROWS_AS(tokenize("2x"), ParseError);
}

TEST_CASE("generator examples") {
  const auto g = parse_generators("z^2; z^2/2");
  REQUIRE(g.maps.size() == 2);
  CHECK(g.maps[0].degree() == 2);
  CHECK(g.maps[1].degree() == 2);
  CHECK(chordal_distance(g.maps[1](pt(2.0)), pt(2.0)) < 1e-15);

  const auto r = parse_generators("(z^2+1)/(2*z)");
  CHECK(r.maps[0].degree() == 2);
  CHECK(chordal_distance(r.maps[0](pt(2.0)), pt(1.25)) < 1e-15);

  try {
    parse_generators("z; 3", true);
    FAIL("expected DegreeError");
  } catch (const DegreeError& e) {
    CHECK(std::string(e.what()).find("'3'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_generators("z; 3"), DegreeError);
  CHECK_THROWS_AS(parse_generators("z + 1; z^2"), DegreeError);
  CHECK_NOTHROW(parse_generators("z + 1; z^2", true));
}

TEST_CASE("exact reduction at parse time") {
  // (z^2 - 1)/(z - 1) reduces to z + 1 exactly.
  const auto g = parse_generators("(z^2 - 1)/(z - 1)", true);
  CHECK(g.maps[0].degree() == 1);
  const auto h = parse_generators("z^3*(z - i)/(z*(z - i))");
  CHECK(h.maps[0].degree() == 2);
  CHECK(chordal_distance(h.maps[0](pt({0.3, 0.7})), pt(Complex(0.3, 0.7) * Complex(0.3, 0.7))) < 1e-14);
  CHECK_THROWS_AS(parse_generators("(z - i)/(z - 1i)"), DegreeError);
  const auto c = parse_generators("(1+2i)*z^2 - 0.25");
  CHECK(chordal_distance(c.maps[0](pt(1.0)), pt(Complex(0.75, 2))) < 1e-15);
  CHECK(chordal_distance(parse_generators("z^-2").maps[0](pt(2.0)), pt(0.25)) < 1e-15);
}

TEST_CASE("parse errors carry positions") {
  CHECK(parse_error_position("z^2 +") == 5);
  CHECK(parse_error_position("z^2; w") == 5);
  CHECK(parse_error_position("z^2.5") == 2);
  CHECK(parse_error_position("(z^2") == 4);
  CHECK(parse_error_position("z^2/(z-z)") == 3);
  CHECK(parse_error_position("[0] z^2") == 1);
}

TEST_CASE("multiplicities, adjoints and poly mode") {
  const auto g = parse_generators("[2] z^2; adjoint(z^3)");
  CHECK(g.items[0].multiplicity == 2);
  CHECK(g.items[1].adjoint);
  const auto F = g.correspondence();
  CHECK(degrees(F).dt == 2 * 2 + 1);
  CHECK(degrees(F).d0 == 2 + 3);

  const auto p = parse_generators("poly: y - x^2; [3] x*y - 2");
  CHECK(p.poly_mode);
  REQUIRE(p.polys.size() == 2);
  CHECK(to_string(p.polys[0]) == "y - x^2");
  CHECK(p.items[1].multiplicity == 3);
  const auto P = p.correspondence();
  CHECK(P.poly_factors()[1].multiplicity == 3);
  CHECK_THROWS_AS(parse_generators("poly: y - z"), ParseError);
  CHECK_THROWS_AS(parse_generators("poly: y - i*x"), ParseError);
}

TEST_CASE("parse, print, parse round trips") {
  for (const std::string text :
       {"z^2; z^2/2", "(z^2+1)/(2*z)", "-z^2 + 0.125", "z^2 - (z - 1)", "z^3/(z/2)", "(-z)^2 - -z", "[3] adjoint((z + 2i)^3)",
        "poly: y - x^2; [2] 3/2*x*y - 1", "z^-2 + 3.5i*z", "0.001*z^3 - 2e3"}) {
    const auto a = parse_generators(text, true);
    const std::string printed = to_string(a);
    const auto b = parse_generators(printed, true);
    INFO(text << " -> " << printed);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      CHECK(a.items[i].expr == b.items[i].expr);
      CHECK(a.items[i].multiplicity == b.items[i].multiplicity);
      CHECK(a.items[i].adjoint == b.items[i].adjoint);
    }
    CHECK(to_string(b) == printed);
  }
  CHECK(to_string(parse_generators("z^2 / 2")) == "z^2/2");
}

TEST_CASE("polynomial text") {
  const auto p = parse_poly("y - x^2");
  CHECK(p == ExactBivarPoly::y() - ExactBivarPoly::x() * ExactBivarPoly::x());
  const auto q = parse_poly("3/2*x*y + 1");
  CHECK(to_string(q) == "3/2*x*y + 1");
  CHECK(parse_poly(to_string(q)) == q);
  CHECK_THROWS_AS(parse_poly("y/x"), ParseError);
  CHECK_THROWS_AS(parse_poly("y - x ;"), ParseError);
}

TEST_CASE("region membership") {
  const auto ann = parse_region("annulus 1 2 closed");
  CHECK(ann.contains(pt(1.5)));
  CHECK_FALSE(ann.contains(pt(0.5)));
  const auto edge = ann.classify(pt(1.0));
  CHECK(edge.inside);
  CHECK(edge.near_boundary);
  CHECK_FALSE(ann.classify(pt(1.5)).near_boundary);
  CHECK_FALSE(ann.contains(SpherePointd::infinity()));

  const auto open_ann = parse_region("annulus 1 2 open");
  CHECK_FALSE(open_ann.contains(pt(1.0)));
  CHECK(open_ann.classify(pt(1.0)).near_boundary);

  const auto u = parse_region("union (disc 0 0 0.5 open) (annulus 1 2 closed)");
  CHECK(u.contains(pt(0.1)));
  CHECK(u.contains(pt(-1.5)));
  CHECK_FALSE(u.contains(pt(0.8)));
  CHECK(parse_region("complement (disc inf 0.5 closed)").contains(pt(0.0)));
  CHECK_FALSE(parse_region("complement (disc inf 0.5 closed)").contains(pt(100.0)));
  CHECK(parse_region("halfplane 1 0 0.5").contains(pt(1.0)));
  CHECK_FALSE(parse_region("halfplane 1 0 0.5").contains(pt(-1.0)));
  CHECK(parse_region("intersection (all) (halfplane 0 1 0)").contains(pt({3, 1})));
  CHECK_FALSE(parse_region("empty").contains(pt(0.0)));
}

TEST_CASE("region text round trips") {
  for (const std::string text : {"annulus 1.2 1.8 closed", "union (disc 0 0 0.5 open) (annulus 1 2 closed)",
                                 "complement (intersection (halfplane -1 0.5 1e-09) (disc inf 0.25 closed) (all))",
                                 "disc -0.1 3 0.125 closed", "empty"}) {
    const auto r = parse_region(text);
    CHECK(to_string(r) == text);
    CHECK(parse_region(to_string(r)) == r);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 100; ++t) {
    const auto r = Region::union_of({Region::disc(Complex(u(rng), u(rng)), std::abs(u(rng)) / 2, t % 2 == 0),
                                     Region::annulus(0.1, 1.0 + std::abs(u(rng)), true)});
    CHECK(parse_region(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_region("annulus 2 1 closed"), ParseError);
  CHECK_THROWS_AS(parse_region("annulus 1 2"), ParseError);
  CHECK_THROWS_AS(parse_region("union (all)"), ParseError);
  CHECK_THROWS_AS(parse_region("disc 0 0 1 closed extra"), ParseError);
}
