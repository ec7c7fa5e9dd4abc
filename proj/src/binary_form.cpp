#include "holocorr/binary_form.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace holocorr {

BinaryForm::BinaryForm(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw PreconditionError("binary form needs at least one coefficient");
  if (std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == Complex(0); })) {
    throw PreconditionError("binary form must not be identically zero");
  }
}

double BinaryForm::norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

Complex BinaryForm::operator()(const Complex& h0, const Complex& h1) const {
  const int d = degree();
  Complex acc(0);
  Complex scale(1);
  if (std::abs(h1) >= std::abs(h0)) {
    const Complex t = h0 / h1;
    for (int j = d; j >= 0; --j) acc = acc * t + coeffs_[static_cast<std::size_t>(j)];
    for (int j = 0; j < d; ++j) scale *= h1;
  } else {
    const Complex t = h1 / h0;
    for (int j = 0; j <= d; ++j) acc = acc * t + coeffs_[static_cast<std::size_t>(j)];
    for (int j = 0; j < d; ++j) scale *= h0;
  }
  return acc * scale;
}

BinaryForm BinaryForm::raised(int extra) const {
  std::vector<Complex> c(coeffs_);
  c.resize(coeffs_.size() + static_cast<std::size_t>(extra), Complex(0));
  return BinaryForm(std::move(c));
}

BinaryForm operator*(const BinaryForm& a, const BinaryForm& b) {
  std::vector<Complex> c(static_cast<std::size_t>(a.degree() + b.degree() + 1), Complex(0));
  for (int i = 0; i <= a.degree(); ++i) {
    for (int j = 0; j <= b.degree(); ++j) c[static_cast<std::size_t>(i + j)] += a[i] * b[j];
  }
  return BinaryForm(std::move(c));
}

BinaryForm operator+(const BinaryForm& a, const BinaryForm& b) {
  if (a.degree() != b.degree()) throw PreconditionError("adding binary forms of different degree");
  std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
  for (int j = 0; j <= b.degree(); ++j) c[static_cast<std::size_t>(j)] += b[j];
  return BinaryForm(std::move(c));
}

BinaryForm operator*(Complex s, const BinaryForm& a) {
  std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
  for (auto& v : c) v *= s;
  return BinaryForm(std::move(c));
}

namespace {

// Affine polynomial q(z) = sum q[j] z^j with q.front() and q.back() nonzero.
struct Affine {
  std::vector<Complex> q;

  int degree() const { return static_cast<int>(q.size()) - 1; }

  // Value and derivative of q at z.
  std::pair<Complex, Complex> at(Complex z) const {
    Complex p(0), dp(0);
    for (int j = degree(); j >= 0; --j) {
      dp = dp * z + p;
      p = p * z + q[static_cast<std::size_t>(j)];
    }
    return {p, dp};
  }

  // Value and derivative of the reversed polynomial w^k q(1/w).
  std::pair<Complex, Complex> reversed_at(Complex w) const {
    Complex p(0), dp(0);
    for (int j = 0; j <= degree(); ++j) {
      dp = dp * w + p;
      p = p * w + q[static_cast<std::size_t>(j)];
    }
    return {p, dp};
  }
};

std::vector<Complex> quadratic_roots(const Affine& f) {
  const Complex a = f.q[2], b = f.q[1], c = f.q[0];
  const Complex disc = std::sqrt(b * b - 4.0 * a * c);
  const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  return {q / a, c / q};
}

std::vector<Complex> companion_roots(const Affine& f) {
  const int k = f.degree();
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(k, k);
  const Complex lead = f.q[static_cast<std::size_t>(k)];
  for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < k; ++i) companion(i, k - 1) = -f.q[static_cast<std::size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /* computeEigenvectors = */ false);
  std::vector<Complex> roots(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

// Newton steps in whichever chart keeps |coordinate| <= 1.
Complex polish(const Affine& f, Complex z) {
  for (int iter = 0; iter < 6; ++iter) {
    Complex step;
    if (std::abs(z) <= 1.0) {
      const auto [p, dp] = f.at(z);
      if (dp == Complex(0)) break;
      step = p / dp;
      const Complex next = z - step;
      if (chordal_distance(z, next) > 1e-3) break;
      z = next;
    } else {
      Complex w = 1.0 / z;
      const auto [p, dp] = f.reversed_at(w);
      if (dp == Complex(0)) break;
      step = p / dp;
      w -= step;
      if (w == Complex(0)) return z;
      const Complex next = 1.0 / w;
      if (chordal_distance(z, next) > 1e-3) break;
      z = next;
    }
    if (std::abs(step) < 1e-17) break;
  }
  return z;
}

double residual(const BinaryForm& f, double norm, const SpherePointd& p) {
  return std::abs(f(p)) / norm;
}

}  // namespace

std::vector<Root> form_roots(const BinaryForm& f, const RootOptions& options) {
  const int d = f.degree();
  int hi = d;
  while (f[hi] == Complex(0)) --hi;
  int lo = 0;
  while (f[lo] == Complex(0)) ++lo;

  std::vector<Root> roots;
  if (lo > 0) roots.push_back({SpherePointd(), lo});
  if (hi < d) roots.push_back({SpherePointd::infinity(), d - hi});

  Affine reduced{std::vector<Complex>(f.coeffs().begin() + lo, f.coeffs().begin() + hi + 1)};
  const double scale = std::abs(reduced.q.back());
  for (auto& c : reduced.q) c /= scale;

  std::vector<Complex> affine;
  switch (reduced.degree()) {
    case 0:
      break;
    case 1:
      affine.push_back(-reduced.q[0] / reduced.q[1]);
      break;
    case 2:
      affine = quadratic_roots(reduced);
      break;
    default:
      affine = companion_roots(reduced);
      for (auto& z : affine) z = polish(reduced, z);
      break;
  }
  for (const auto& z : affine) {
    const bool finite = std::isfinite(z.real()) && std::isfinite(z.imag());
    roots.push_back({finite ? SpherePointd::affine(z) : SpherePointd::infinity(), 1});
  }

  // Merge clusters (single linkage). The exact 0 and infinity roots stay
  // exact; otherwise the merged point is the embedding centroid.
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (chordal_distance(roots[i].point, roots[j].point) < options.cluster_radius) {
        parent[find(j)] = find(i);
      }
    }
  }

  const double norm = f.norm();
  std::vector<Root> merged;
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) != i) continue;
    Root out{roots[i].point, 0};
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    bool exact = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (find(j) != i) continue;
      out.multiplicity += roots[j].multiplicity;
      centroid += roots[j].multiplicity * roots[j].point.embed();
      const bool special = (lo > 0 && j == 0) || (hi < d && j == (lo > 0 ? 1u : 0u));
      if (special && !exact) {
        out.point = roots[j].point;
        exact = true;
      }
    }
    if (!exact && out.multiplicity > 1) out.point = SpherePointd::from_embedding(centroid);
    if (residual(f, norm, out.point) > options.tol) {
      throw IllConditioned("root residual " + std::to_string(residual(f, norm, out.point)) +
                           " exceeds tolerance in degree " + std::to_string(d) + " form");
    }
    merged.push_back(out);
  }
  return merged;
}

}  // namespace holocorr
