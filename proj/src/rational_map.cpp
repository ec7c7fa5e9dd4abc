#include "holocorr/rational_map.hpp"

#include <algorithm>

namespace holocorr {

namespace {

constexpr double kCommonRootRadius = 1e-7;

// Divides f by the linear form vanishing at the root p.
BinaryForm deflate(const BinaryForm& f, const SpherePointd& p) {
  const int d = f.degree();
  std::vector<Complex> c(f.coeffs().begin(), f.coeffs().end());
  if (d == 0) throw PreconditionError("cannot deflate a constant form");
  std::vector<Complex> q(static_cast<std::size_t>(d));
  const auto z = p.to_affine();
  if (z && std::abs(*z) <= 1.0) {
    // Divide by (h0 - r h1), synthetic division from the top coefficient.
    Complex carry(0);
    for (int k = d; k >= 1; --k) {
      carry = c[static_cast<std::size_t>(k)] + *z * carry;
      q[static_cast<std::size_t>(k - 1)] = carry;
    }
  } else {
    // Divide by (h1 - s h0), s = 1 / r, working from the bottom coefficient.
    const Complex s = z ? 1.0 / *z : Complex(0);
    Complex carry(0);
    for (int k = 0; k < d; ++k) {
      carry = c[static_cast<std::size_t>(k)] + s * carry;
      q[static_cast<std::size_t>(k)] = carry;
    }
  }
  return BinaryForm(std::move(q));
}

std::vector<Complex> trimmed(std::vector<Complex> c) {
  while (c.size() > 1 && c.back() == Complex(0)) c.pop_back();
  return c;
}

}  // namespace

RationalMap::RationalMap(BinaryForm num, BinaryForm den)
    : num_(std::move(num)), den_(std::move(den)) {
  const int d = std::max(num_.degree(), den_.degree());
  num_ = num_.raised(d - num_.degree());
  den_ = den_.raised(d - den_.degree());
  // Cancel common roots one linear factor at a time.
  while (num_.degree() > 0) {
    const auto rn = form_roots(num_);
    const auto rd = form_roots(den_);
    const SpherePointd* common = nullptr;
    for (const auto& a : rn) {
      for (const auto& b : rd) {
        if (chordal_distance(a.point, b.point) < kCommonRootRadius) {
          common = &a.point;
          break;
        }
      }
      if (common) break;
    }
    if (!common) break;
    num_ = deflate(num_, *common);
    den_ = deflate(den_, *common);
  }
  if (num_.degree() < 1) throw DegreeError("rational map is constant");
}

RationalMap::RationalMap(BinaryForm num, BinaryForm den, Trusted)
    : num_(std::move(num)), den_(std::move(den)) {}

RationalMap RationalMap::from_affine(std::vector<Complex> num, std::vector<Complex> den) {
  return RationalMap(BinaryForm(trimmed(std::move(num))), BinaryForm(trimmed(std::move(den))));
}

SpherePointd RationalMap::operator()(const SpherePointd& x) const {
  const Complex p = num_(x);
  const Complex q = den_(x);
  if (p == Complex(0) && q == Complex(0)) {
    // Unreachable for coprime forms except through underflow; step off the point.
    const SpherePointd nudged = SpherePointd::homogeneous(x.h0() + 1e-12 * x.h1(), x.h1() - 1e-12 * x.h0());
    return (*this)(nudged);
  }
  return SpherePointd::homogeneous(p, q);
}

RationalMap RationalMap::after(const RationalMap& inner) const {
  const int d = degree();
  // Powers of the inner forms.
  std::vector<BinaryForm> pn{BinaryForm({Complex(1)})}, pd{BinaryForm({Complex(1)})};
  for (int k = 1; k <= d; ++k) {
    pn.push_back(pn.back() * inner.num_);
    pd.push_back(pd.back() * inner.den_);
  }
  auto substitute = [&](const BinaryForm& f) {
    std::vector<Complex> acc(static_cast<std::size_t>(d * inner.degree() + 1), Complex(0));
    for (int j = 0; j <= d; ++j) {
      if (f[j] == Complex(0)) continue;
      const BinaryForm term = pn[static_cast<std::size_t>(j)] * pd[static_cast<std::size_t>(d - j)];
      for (int k = 0; k <= term.degree(); ++k) acc[static_cast<std::size_t>(k)] += f[j] * term[k];
    }
    return BinaryForm(std::move(acc));
  };
  // Composition of coprime forms stays coprime.
  return RationalMap(substitute(num_), substitute(den_), Trusted{});
}

bool RationalMap::has_real_coefficients() const {
  auto real = [](const BinaryForm& f) {
    return std::all_of(f.coeffs().begin(), f.coeffs().end(), [](const Complex& c) { return c.imag() == 0.0; });
  };
  return real(num_) && real(den_);
}

SpherePointd eval_map(const RationalMap& f, const SpherePointd& x) { return f(x); }

std::vector<Root> preimages_map(const RationalMap& f, const SpherePointd& w, const RootOptions& options) {
  const int d = f.degree();
  std::vector<Complex> c(static_cast<std::size_t>(d + 1));
  for (int j = 0; j <= d; ++j) c[static_cast<std::size_t>(j)] = w.h1() * f.numerator()[j] - w.h0() * f.denominator()[j];
  return form_roots(BinaryForm(std::move(c)), options);
}

}  // namespace holocorr
