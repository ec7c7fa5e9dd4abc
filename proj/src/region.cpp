#include "holocorr/region.hpp"

#include <charconv>
#include <cmath>

namespace holocorr {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Signed chordal distance from p to the circle |z| = r, positive outside.
// Uses the unit homogeneous coordinates so that huge |z| cannot overflow.
double circle_side(const SpherePointd& p, double r) {
  return (std::abs(p.h0()) - r * std::abs(p.h1())) / std::sqrt(1.0 + r * r);
}

// Depth of p inside a primitive in chordal units: positive inside,
// negative outside, zero on the boundary.
double depth(const Region::Primitive& prim, const SpherePointd& p) {
  if (const auto* d = std::get_if<DiscPrimitive>(&prim)) return d->radius - chordal_distance(p, d->point);
  if (const auto* a = std::get_if<AnnulusPrimitive>(&prim)) {
    if (p.is_infinity()) return -circle_side(p, a->r_out);
    return std::min(circle_side(p, a->r_in), -circle_side(p, a->r_out));
  }
  const auto& h = std::get<HalfPlanePrimitive>(prim);
  // Affine signed distance scaled by the chordal line element 1 / (1 + |z|^2),
  // written with z = h0 / h1 and |h0|^2 + |h1|^2 = 1.
  const Complex w = p.h0() * std::conj(p.h1());
  const double n = std::hypot(h.nx, h.ny);
  return (h.nx * w.real() + h.ny * w.imag() - h.offset * std::norm(p.h1())) / n;
}

bool closed(const Region::Primitive& prim) {
  if (const auto* d = std::get_if<DiscPrimitive>(&prim)) return d->closed;
  if (const auto* a = std::get_if<AnnulusPrimitive>(&prim)) return a->closed;
  return true;
}

}  // namespace

Region Region::all() { return Region(std::make_shared<const Node>(Node{Op::all, {}, {}})); }
Region Region::empty() { return Region(std::make_shared<const Node>(Node{Op::empty, {}, {}})); }

Region Region::disc(std::optional<Complex> center, double radius, bool is_closed) {
  if (!(radius >= 0.0)) throw PreconditionError("disc radius must be nonnegative");
  const SpherePointd point = center ? SpherePointd::affine(*center) : SpherePointd::infinity();
  return Region(std::make_shared<const Node>(Node{Op::primitive, DiscPrimitive{center, radius, is_closed, point}, {}}));
}

Region Region::annulus(double r_in, double r_out, bool is_closed) {
  if (!(r_in >= 0.0) || !(r_out >= r_in) || !std::isfinite(r_out)) {
    throw PreconditionError("annulus needs 0 <= r_in <= r_out < infinity");
  }
  return Region(std::make_shared<const Node>(Node{Op::primitive, AnnulusPrimitive{r_in, r_out, is_closed}, {}}));
}

Region Region::half_plane(double nx, double ny, double offset) {
  if (nx == 0.0 && ny == 0.0) throw PreconditionError("half-plane normal must be nonzero");
  return Region(std::make_shared<const Node>(Node{Op::primitive, HalfPlanePrimitive{nx, ny, offset}, {}}));
}

Region Region::union_of(std::vector<Region> parts) {
  if (parts.size() < 2) throw PreconditionError("union needs at least two regions");
  return Region(std::make_shared<const Node>(Node{Op::union_of, {}, std::move(parts)}));
}

Region Region::intersection_of(std::vector<Region> parts) {
  if (parts.size() < 2) throw PreconditionError("intersection needs at least two regions");
  return Region(std::make_shared<const Node>(Node{Op::intersection_of, {}, std::move(parts)}));
}

Region Region::complement_of(Region r) {
  return Region(std::make_shared<const Node>(Node{Op::complement_of, {}, {std::move(r)}}));
}

Region Region::with_boundary_tol(double tol) const {
  if (!(tol >= 0.0)) throw PreconditionError("boundary tolerance must be nonnegative");
  Region out = *this;
  out.tol_ = tol;
  return out;
}

Membership Region::classify(const SpherePointd& p) const { return classify(p, tol_); }

Membership Region::classify(const SpherePointd& p, double tol) const {
  switch (node_->op) {
    case Op::all:
      return {true, false};
    case Op::empty:
      return {false, false};
    case Op::primitive: {
      const double s = depth(node_->primitive, p);
      const bool inside = closed(node_->primitive) ? s >= -tol : s > tol;
      return {inside, std::abs(s) <= tol};
    }
    case Op::union_of:
    case Op::intersection_of: {
      const bool is_union = node_->op == Op::union_of;
      Membership out{!is_union, false};
      for (const auto& c : node_->children) {
        const Membership m = c.classify(p, tol);
        out.inside = is_union ? (out.inside || m.inside) : (out.inside && m.inside);
        out.near_boundary = out.near_boundary || m.near_boundary;
      }
      return out;
    }
    case Op::complement_of: {
      const Membership m = node_->children.front().classify(p, tol);
      return {!m.inside, m.near_boundary};
    }
  }
  return {};
}

bool Region::operator==(const Region& other) const {
  if (tol_ != other.tol_ || op() != other.op()) return false;
  if (op() == Op::primitive) {
    const auto& a = primitive();
    const auto& b = other.primitive();
    if (a.index() != b.index()) return false;
    if (const auto* d = std::get_if<DiscPrimitive>(&a)) {
      const auto& e = std::get<DiscPrimitive>(b);
      return d->center == e.center && d->radius == e.radius && d->closed == e.closed;
    }
    if (const auto* an = std::get_if<AnnulusPrimitive>(&a)) {
      const auto& e = std::get<AnnulusPrimitive>(b);
      return an->r_in == e.r_in && an->r_out == e.r_out && an->closed == e.closed;
    }
    const auto& h = std::get<HalfPlanePrimitive>(a);
    const auto& e = std::get<HalfPlanePrimitive>(b);
    return h.nx == e.nx && h.ny == e.ny && h.offset == e.offset;
  }
  return children() == other.children();
}

std::string to_string(const Region& r) {
  auto wrap = [](const Region& c) { return "(" + to_string(c) + ")"; };
  switch (r.op()) {
    case Region::Op::all:
      return "all";
    case Region::Op::empty:
      return "empty";
    case Region::Op::primitive: {
      const auto& prim = r.primitive();
      if (const auto* d = std::get_if<DiscPrimitive>(&prim)) {
        std::string center = "inf";
        if (d->center) center = fmt(d->center->real()) + " " + fmt(d->center->imag());
        return "disc " + center + " " + fmt(d->radius) + (d->closed ? " closed" : " open");
      }
      if (const auto* a = std::get_if<AnnulusPrimitive>(&prim)) {
        return "annulus " + fmt(a->r_in) + " " + fmt(a->r_out) + (a->closed ? " closed" : " open");
      }
      const auto& h = std::get<HalfPlanePrimitive>(prim);
      return "halfplane " + fmt(h.nx) + " " + fmt(h.ny) + " " + fmt(h.offset);
    }
    case Region::Op::union_of:
    case Region::Op::intersection_of: {
      std::string out = r.op() == Region::Op::union_of ? "union" : "intersection";
      for (const auto& c : r.children()) out += " " + wrap(c);
      return out;
    }
    case Region::Op::complement_of:
      return "complement " + wrap(r.children().front());
  }
  return "";
}

}  // namespace holocorr
