#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "holocorr/exact_poly.hpp"
#include "holocorr/rational_map.hpp"

namespace holocorr {

enum class Direction { forward, reverse };

/// Graph of a rational map, or of its adjoint when `direction` is reverse.
struct GraphComponent {
  RationalMap map;
  int multiplicity = 1;
  Direction direction = Direction::forward;

  bool operator==(const GraphComponent&) const = default;
};

/// Curve {P(x, y) = 0} in the sphere squared.
struct PolyFactor {
  ExactBivarPoly poly;
  int multiplicity = 1;

  bool operator==(const PolyFactor&) const = default;
};

/// Which projection a fiber is taken along: forward fibers are F(x),
/// backward fibers are F†(y).
enum class Side { forward, backward };

struct FiberPoint {
  SpherePointd point;
  int multiplicity = 1;
  /// Index of the chain component contributing the point.
  int component = 0;
};

using Fiber = std::vector<FiberPoint>;

/// Holomorphic correspondence on the sphere given by a weighted chain of
/// components. The topological degree d_t counts a generic backward fiber
/// with multiplicity; d0 counts a generic forward fiber.
class Correspondence {
 public:
  /// Chain of forward graphs of the generators, each with multiplicity one.
  static Correspondence from_maps(const std::vector<RationalMap>& generators);
  static Correspondence graph_chain(std::vector<GraphComponent> components);
  /// Factors must be squarefree, pairwise coprime, free of factors in one
  /// variable only, and of positive degree in both variables.
  static Correspondence poly_chain(std::vector<PolyFactor> factors);

  bool is_graph_chain() const { return std::holds_alternative<std::vector<GraphComponent>>(chain_); }
  /// Graph chain whose components are all forward graphs.
  bool is_all_forward() const;

  const std::vector<GraphComponent>& graph_components() const;
  const std::vector<PolyFactor>& poly_factors() const;
  std::size_t component_count() const;

  int topological_degree() const { return dt_; }
  int adjoint_degree() const { return d0_; }

  /// Size of the generic fiber of component i (with multiplicity) on `side`.
  int component_weight(std::size_t i, Side side) const;

  /// Fiber of a single component; multiplicities include the component's.
  Fiber component_fiber(std::size_t i, const SpherePointd& p, Side side, const RootOptions& options = {}) const;

  /// Residual of the relation "(from, to) lies on component i" used to
  /// re-validate certificates: chordal mismatch for graphs, normalized
  /// polynomial value for curves.
  double relation_residual(std::size_t i, const SpherePointd& from, const SpherePointd& to, Side side) const;

  /// Structural equality of the chains.
  bool operator==(const Correspondence& other) const { return chain_ == other.chain_; }

 private:
  Correspondence() = default;
  void finish();

  std::variant<std::vector<GraphComponent>, std::vector<PolyFactor>> chain_;
  // Numeric copies of the curve coefficients, (x power, y power).
  std::vector<Eigen::MatrixXd> numeric_;
  int dt_ = 0;
  int d0_ = 0;

  friend Correspondence adjoint(const Correspondence& f);
};

Fiber forward_image(const Correspondence& f, const SpherePointd& x, const RootOptions& options = {});
Fiber backward_image(const Correspondence& f, const SpherePointd& y, const RootOptions& options = {});
Fiber image(const Correspondence& f, const SpherePointd& p, Side side, const RootOptions& options = {});

/// Total multiplicity of a fiber.
int total_multiplicity(const Fiber& fiber);

Correspondence adjoint(const Correspondence& f);

struct Degrees {
  int dt = 0;
  int d0 = 0;
  /// d0 < d_t, the hypothesis under which the equilibrium measure exists.
  bool condition = false;
};

Degrees degrees(const Correspondence& f);

/// Curve representation: the graph of P/Q becomes Q(x) y - P(x), reverse
/// graphs swap variables. Requires real coefficients.
Correspondence to_poly_chain(const Correspondence& f);

/// f ∘ g, applying g first. Graph chains of forward components compose map
/// by map; otherwise the middle variable is eliminated by resultants and the
/// result is checked against d_t(f ∘ g) = d_t(f) d_t(g), d0 likewise.
/// Throws DegeneracyDetected or CommonFactor.
Correspondence compose(const Correspondence& f, const Correspondence& g);

/// Points of F(G(x)) with no point of (F ∘ G)(x) within `tol`. The composed
/// fiber is contained in the iterated one, with equality off an exceptional
/// set that is not computed; a nonempty result marks x as such a point.
Fiber composition_excess(const Correspondence& f, const Correspondence& g, const Correspondence& fg,
                         const SpherePointd& x, double tol = 1e-6, const RootOptions& options = {});

struct DegeneratePoint {
  SpherePointd point;
  /// Fiber side whose degree drops at `point`.
  Side side = Side::forward;
  std::string description;
};

/// Points where a curve factor's fiber acquires a root at infinity through
/// a vanishing leading coefficient. Empty for graph chains.
std::vector<DegeneratePoint> degenerate_points(const Correspondence& f);

}  // namespace holocorr
