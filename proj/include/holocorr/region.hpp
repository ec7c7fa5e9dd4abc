#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "holocorr/binary_form.hpp"

namespace holocorr {

/// Chordal disc; `center` is an affine value, or infinity when empty.
struct DiscPrimitive {
  std::optional<Complex> center;
  double radius = 0.0;
  bool closed = true;
  SpherePointd point;
};

/// r_in <= |z| <= r_out in the affine chart; never contains infinity.
struct AnnulusPrimitive {
  double r_in = 0.0;
  double r_out = 0.0;
  bool closed = true;
};

/// nx Re z + ny Im z >= offset (closed); infinity lies on its boundary.
struct HalfPlanePrimitive {
  double nx = 1.0;
  double ny = 0.0;
  double offset = 0.0;
};

struct Membership {
  bool inside = false;
  /// Within boundary_tol of the boundary of some primitive involved.
  bool near_boundary = false;
};

/// Borel test set: an expression tree over discs, annuli and half-planes.
/// Closed primitives contain points up to boundary_tol outside them, open
/// primitives exclude points up to boundary_tol inside them.
class Region {
 public:
  enum class Op { all, empty, primitive, union_of, intersection_of, complement_of };
  using Primitive = std::variant<DiscPrimitive, AnnulusPrimitive, HalfPlanePrimitive>;

  static Region all();
  static Region empty();
  static Region disc(std::optional<Complex> center, double radius, bool closed);
  static Region annulus(double r_in, double r_out, bool closed);
  static Region half_plane(double nx, double ny, double offset);
  static Region union_of(std::vector<Region> parts);
  static Region intersection_of(std::vector<Region> parts);
  static Region complement_of(Region r);

  Membership classify(const SpherePointd& p) const;
  bool contains(const SpherePointd& p) const { return classify(p).inside; }

  Op op() const { return node_->op; }
  const Primitive& primitive() const { return node_->primitive; }
  const std::vector<Region>& children() const { return node_->children; }

  double boundary_tol() const { return tol_; }
  Region with_boundary_tol(double tol) const;

  bool operator==(const Region& other) const;

 private:
  struct Node {
    Op op = Op::all;
    Primitive primitive;
    std::vector<Region> children;
  };
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  Membership classify(const SpherePointd& p, double tol) const;

  std::shared_ptr<const Node> node_;
  double tol_ = 1e-9;
};

/// Prefix form read by parse_region, e.g. `union (disc 0 0 0.5 open) (annulus 1 2 closed)`.
std::string to_string(const Region& r);

}  // namespace holocorr
