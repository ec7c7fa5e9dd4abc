#include "holocorr/correspondence.hpp"

#include <algorithm>
#include <numeric>

namespace holocorr {

namespace {

Eigen::MatrixXd numeric_matrix(const ExactBivarPoly& p) {
  Eigen::MatrixXd m(p.degree_x() + 1, p.degree_y() + 1);
  for (int i = 0; i <= p.degree_x(); ++i) {
    for (int j = 0; j <= p.degree_y(); ++j) m(i, j) = p.coeff(i, j).get_d();
  }
  return m;
}

// Binary form in the second variable after fixing the first at p; `m` is
// indexed (first power, second power).
BinaryForm fiber_form(const Eigen::MatrixXd& m, const SpherePointd& p) {
  const auto dx = static_cast<int>(m.rows()) - 1;
  const auto dy = static_cast<int>(m.cols()) - 1;
  std::vector<Complex> pw0(static_cast<std::size_t>(dx + 1)), pw1(static_cast<std::size_t>(dx + 1));
  pw0[0] = pw1[0] = 1.0;
  for (int i = 1; i <= dx; ++i) {
    pw0[static_cast<std::size_t>(i)] = pw0[static_cast<std::size_t>(i - 1)] * p.h0();
    pw1[static_cast<std::size_t>(i)] = pw1[static_cast<std::size_t>(i - 1)] * p.h1();
  }
  std::vector<Complex> c(static_cast<std::size_t>(dy + 1), Complex(0));
  for (int i = 0; i <= dx; ++i) {
    const Complex w = pw0[static_cast<std::size_t>(i)] * pw1[static_cast<std::size_t>(dx - i)];
    for (int j = 0; j <= dy; ++j) c[static_cast<std::size_t>(j)] += m(i, j) * w;
  }
  return BinaryForm(std::move(c));
}

bool is_forward_on(Direction d, Side side) {
  return (d == Direction::forward) == (side == Side::forward);
}

// True if p has a nonconstant factor in x alone.
bool has_pure_x_factor(const ExactBivarPoly& p) {
  QPoly g;
  for (int j = 0; j <= p.degree_y(); ++j) g = gcd(g, p.y_coeff(j));
  return g.degree() > 0;
}

// Makes the factor list pairwise coprime, summing multiplicities of shared
// parts. Inputs must be squarefree.
std::vector<PolyFactor> coprime_refine(std::vector<PolyFactor> factors) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < factors.size() && !changed; ++a) {
      for (std::size_t b = a + 1; b < factors.size() && !changed; ++b) {
        const ExactBivarPoly g = gcd(factors[a].poly, factors[b].poly);
        if (g.is_constant()) continue;
        const PolyFactor fa{exact_divide(factors[a].poly, g).primitive(), factors[a].multiplicity};
        const PolyFactor fb{exact_divide(factors[b].poly, g).primitive(), factors[b].multiplicity};
        const PolyFactor shared{g, factors[a].multiplicity + factors[b].multiplicity};
        std::vector<PolyFactor> next;
        for (std::size_t k = 0; k < factors.size(); ++k) {
          if (k != a && k != b) next.push_back(std::move(factors[k]));
        }
        for (const auto& f : {fa, fb, shared}) {
          if (!f.poly.is_constant()) next.push_back(f);
        }
        factors = std::move(next);
        changed = true;
      }
    }
  }
  return factors;
}

}  // namespace

Correspondence Correspondence::from_maps(const std::vector<RationalMap>& generators) {
  std::vector<GraphComponent> components;
  for (const auto& g : generators) components.push_back({g, 1, Direction::forward});
  return graph_chain(std::move(components));
}

Correspondence Correspondence::graph_chain(std::vector<GraphComponent> components) {
  if (components.empty()) throw PreconditionError("graph chain needs at least one component");
  for (const auto& c : components) {
    if (c.multiplicity < 1) throw PreconditionError("component multiplicity must be positive");
  }
  Correspondence out;
  out.chain_ = std::move(components);
  out.finish();
  return out;
}

Correspondence Correspondence::poly_chain(std::vector<PolyFactor> factors) {
  if (factors.empty()) throw PreconditionError("polynomial chain needs at least one factor");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.multiplicity < 1) throw PreconditionError("factor multiplicity must be positive");
    if (f.poly.degree_x() < 1 || f.poly.degree_y() < 1) {
      throw PreconditionError("factor " + to_string(f.poly) + " must have positive degree in both variables");
    }
    if (has_pure_x_factor(f.poly) || has_pure_x_factor(f.poly.swapped())) {
      throw PreconditionError("factor " + to_string(f.poly) + " contains a component in one variable only");
    }
    const auto sqf = squarefree_decompose(f.poly);
    if (sqf.size() != 1 || sqf.front().multiplicity != 1) {
      throw PreconditionError("factor " + to_string(f.poly) + " is not squarefree");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!gcd(f.poly, factors[j].poly).is_constant()) {
        throw PreconditionError("factors " + to_string(factors[j].poly) + " and " + to_string(f.poly) + " are not coprime");
      }
    }
  }
  Correspondence out;
  out.chain_ = std::move(factors);
  out.finish();
  return out;
}

void Correspondence::finish() {
  dt_ = d0_ = 0;
  numeric_.clear();
  if (is_graph_chain()) {
    for (const auto& c : graph_components()) {
      const int fwd = c.multiplicity * (c.direction == Direction::forward ? c.map.degree() : 1);
      const int bwd = c.multiplicity * (c.direction == Direction::forward ? 1 : c.map.degree());
      dt_ += fwd;
      d0_ += bwd;
    }
  } else {
    for (const auto& f : poly_factors()) {
      dt_ += f.multiplicity * f.poly.degree_x();
      d0_ += f.multiplicity * f.poly.degree_y();
      numeric_.push_back(numeric_matrix(f.poly));
    }
  }
}

bool Correspondence::is_all_forward() const {
  if (!is_graph_chain()) return false;
  const auto& c = graph_components();
  return std::all_of(c.begin(), c.end(), [](const GraphComponent& g) { return g.direction == Direction::forward; });
}

const std::vector<GraphComponent>& Correspondence::graph_components() const {
  if (!is_graph_chain()) throw PreconditionError("correspondence is not a graph chain");
  return std::get<std::vector<GraphComponent>>(chain_);
}

const std::vector<PolyFactor>& Correspondence::poly_factors() const {
  if (is_graph_chain()) throw PreconditionError("correspondence is not a polynomial chain");
  return std::get<std::vector<PolyFactor>>(chain_);
}

std::size_t Correspondence::component_count() const {
  return std::visit([](const auto& v) { return v.size(); }, chain_);
}

int Correspondence::component_weight(std::size_t i, Side side) const {
  if (is_graph_chain()) {
    const auto& c = graph_components().at(i);
    // Forward fiber of a forward graph is one point; backward has deg f.
    return c.multiplicity * (is_forward_on(c.direction, side) ? 1 : c.map.degree());
  }
  const auto& f = poly_factors().at(i);
  return f.multiplicity * (side == Side::forward ? f.poly.degree_y() : f.poly.degree_x());
}

Fiber Correspondence::component_fiber(std::size_t i, const SpherePointd& p, Side side, const RootOptions& options) const {
  Fiber out;
  const int idx = static_cast<int>(i);
  if (is_graph_chain()) {
    const auto& c = graph_components().at(i);
    if (is_forward_on(c.direction, side)) {
      out.push_back({c.map(p), c.multiplicity, idx});
    } else {
      for (const auto& r : preimages_map(c.map, p, options)) out.push_back({r.point, r.multiplicity * c.multiplicity, idx});
    }
    return out;
  }
  const auto& f = poly_factors().at(i);
  const Eigen::MatrixXd& m = numeric_.at(i);
  const BinaryForm form = (side == Side::forward) ? fiber_form(m, p) : fiber_form(m.transpose(), p);
  for (const auto& r : form_roots(form, options)) out.push_back({r.point, r.multiplicity * f.multiplicity, idx});
  return out;
}

double Correspondence::relation_residual(std::size_t i, const SpherePointd& from, const SpherePointd& to, Side side) const {
  if (is_graph_chain()) {
    const auto& c = graph_components().at(i);
    return is_forward_on(c.direction, side) ? chordal_distance(c.map(from), to) : chordal_distance(c.map(to), from);
  }
  const Eigen::MatrixXd& m = numeric_.at(i);
  const SpherePointd& x = (side == Side::forward) ? from : to;
  const SpherePointd& y = (side == Side::forward) ? to : from;
  return std::abs(fiber_form(m, x)(y)) / m.norm();
}

Fiber image(const Correspondence& f, const SpherePointd& p, Side side, const RootOptions& options) {
  Fiber out;
  for (std::size_t i = 0; i < f.component_count(); ++i) {
    Fiber part = f.component_fiber(i, p, side, options);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Fiber forward_image(const Correspondence& f, const SpherePointd& x, const RootOptions& options) {
  return image(f, x, Side::forward, options);
}

Fiber backward_image(const Correspondence& f, const SpherePointd& y, const RootOptions& options) {
  return image(f, y, Side::backward, options);
}

int total_multiplicity(const Fiber& fiber) {
  return std::accumulate(fiber.begin(), fiber.end(), 0, [](int s, const FiberPoint& p) { return s + p.multiplicity; });
}

Correspondence adjoint(const Correspondence& f) {
  Correspondence out;
  if (f.is_graph_chain()) {
    auto components = f.graph_components();
    for (auto& c : components) c.direction = (c.direction == Direction::forward) ? Direction::reverse : Direction::forward;
    out.chain_ = std::move(components);
  } else {
    auto factors = f.poly_factors();
    for (auto& p : factors) p.poly = p.poly.swapped();
    out.chain_ = std::move(factors);
  }
  out.finish();
  return out;
}

Degrees degrees(const Correspondence& f) {
  return {f.topological_degree(), f.adjoint_degree(), f.adjoint_degree() < f.topological_degree()};
}

namespace {

ExactBivarPoly graph_poly(const RationalMap& map) {
  if (!map.has_real_coefficients()) {
    throw PreconditionError("exact conversion needs real coefficients");
  }
  ExactBivarPoly p;
  for (int j = 0; j <= map.degree(); ++j) {
    p.add_term(Rational(map.denominator()[j].real()), j, 1);
    p.add_term(Rational(-map.numerator()[j].real()), j, 0);
  }
  return p.primitive();
}

}  // namespace

Correspondence to_poly_chain(const Correspondence& f) {
  if (!f.is_graph_chain()) return f;
  std::vector<PolyFactor> factors;
  for (const auto& c : f.graph_components()) {
    ExactBivarPoly p = graph_poly(c.map);
    if (c.direction == Direction::reverse) p = p.swapped().primitive();
    auto same = std::find_if(factors.begin(), factors.end(), [&](const PolyFactor& q) { return q.poly == p; });
    if (same != factors.end()) {
      same->multiplicity += c.multiplicity;
    } else {
      factors.push_back({p, c.multiplicity});
    }
  }
  return Correspondence::poly_chain(coprime_refine(std::move(factors)));
}

Correspondence compose(const Correspondence& f, const Correspondence& g) {
  if (f.is_all_forward() && g.is_all_forward()) {
    std::vector<GraphComponent> out;
    for (const auto& a : f.graph_components()) {
      for (const auto& b : g.graph_components()) {
        out.push_back({a.map.after(b.map), a.multiplicity * b.multiplicity, Direction::forward});
      }
    }
    return Correspondence::graph_chain(std::move(out));
  }

  const Correspondence pf = to_poly_chain(f);
  const Correspondence pg = to_poly_chain(g);
  std::vector<PolyFactor> factors;
  for (const auto& a : pf.poly_factors()) {
    for (const auto& b : pg.poly_factors()) {
      // b relates (x1, x2), a relates (x2, x3); eliminate x2.
      const ExactBivarPoly r = resultant(b.poly, a.poly).primitive();
      for (const auto& [factor, exponent] : squarefree_decompose(r)) {
        if (factor.degree_x() < 1 || factor.degree_y() < 1) {
          throw DegeneracyDetected("elimination produced the one-variable factor " + to_string(factor));
        }
        factors.push_back({factor, a.multiplicity * b.multiplicity * exponent});
      }
    }
  }
  Correspondence out = Correspondence::poly_chain(coprime_refine(std::move(factors)));
  if (out.topological_degree() != f.topological_degree() * g.topological_degree() ||
      out.adjoint_degree() != f.adjoint_degree() * g.adjoint_degree()) {
    throw DegeneracyDetected("composed chain has degrees (" + std::to_string(out.topological_degree()) + ", " +
                             std::to_string(out.adjoint_degree()) + "), expected (" +
                             std::to_string(f.topological_degree() * g.topological_degree()) + ", " +
                             std::to_string(f.adjoint_degree() * g.adjoint_degree()) + ")");
  }
  return out;
}

Fiber composition_excess(const Correspondence& f, const Correspondence& g, const Correspondence& fg,
                         const SpherePointd& x, double tol, const RootOptions& options) {
  const Fiber composed = forward_image(fg, x, options);
  Fiber excess;
  for (const auto& mid : forward_image(g, x, options)) {
    for (const auto& p : forward_image(f, mid.point, options)) {
      const bool covered = std::any_of(composed.begin(), composed.end(), [&](const FiberPoint& q) {
        return chordal_distance(p.point, q.point) <= tol;
      });
      if (!covered) excess.push_back(p);
    }
  }
  return excess;
}

std::vector<DegeneratePoint> degenerate_points(const Correspondence& f) {
  std::vector<DegeneratePoint> out;
  if (f.is_graph_chain()) return out;
  for (const auto& factor : f.poly_factors()) {
    for (const Side side : {Side::forward, Side::backward}) {
      const ExactBivarPoly p = (side == Side::forward) ? factor.poly : factor.poly.swapped();
      // Affine roots of the leading coefficient in the fiber variable.
      const QPoly lead = p.y_coeff(p.degree_y());
      if (lead.degree() < 1) continue;
      std::vector<Complex> c;
      for (const auto& v : lead.coeffs()) c.emplace_back(v.get_d());
      for (const auto& r : form_roots(BinaryForm(std::move(c)))) {
        out.push_back({r.point, side,
                       std::string(side == Side::forward ? "forward" : "backward") +
                           " fiber of " + to_string(factor.poly) + " has a root at infinity"});
      }
    }
  }
  return out;
}

}  // namespace holocorr
