#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "holocorr/correspondence.hpp"
#include "holocorr/iteration.hpp"

namespace holocorr {

enum class MeasureMethod { tree, chaos, file };

std::string to_string(MeasureMethod m);

/// How an atomic measure was produced.
struct Provenance {
  MeasureMethod method = MeasureMethod::file;
  SpherePointd seed;
  int depth = 0;
  std::size_t samples = 0;
  int burn = 0;
  std::uint64_t rng_seed = 0;
  double pruned_mass = 0.0;
  double dedup_radius = 1e-9;
  /// Tree measures: pruned mass stayed below 1e-6.
  bool exact = true;
};

struct Atom {
  SpherePointd point;
  double weight = 0.0;
};

/// Finitely many weighted points on the sphere.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  Provenance provenance;

  double total_mass() const;
  static AtomicMeasure dirac(const SpherePointd& a);
};

/// (1 - (d / r)^2)^3 for chordal distance d < r, else 0.
struct Bump {
  SpherePointd center;
  double radius = 0.1;
};

/// z^k times a cutoff equal to 1 where the chordal distance to 0 is at most
/// `cutoff` and decaying to 0 at cutoff + (1 - cutoff) / 2, so the function
/// vanishes near infinity.
struct Moment {
  int k = 1;
  double cutoff = 0.9;
};

struct Constant {
  double value = 1.0;
};

using TestFunction = std::variant<Bump, Moment, Constant>;

Complex evaluate(const TestFunction& phi, const SpherePointd& p);
std::string describe(const TestFunction& phi);

/// 64 bumps of radius 0.35 on a spherical Fibonacci lattice, then moments
/// k = 1..4 with cutoff 0.9.
std::vector<TestFunction> standard_family();

/// n points of the spherical Fibonacci lattice.
std::vector<SpherePointd> fibonacci_points(int n);

Complex pair(const AtomicMeasure& mu, const TestFunction& phi);

/// T(phi)(x): sum of phi over the backward fiber of x with multiplicity.
Complex transfer(const Correspondence& f, const TestFunction& phi, const SpherePointd& x,
                 const RootOptions& roots = {});

/// F*nu: each atom replaced by its backward fiber; total mass times d_t.
/// Throws DegenerateAtom if an atom sits on a degenerate backward fiber.
AtomicMeasure pullback(const Correspondence& f, const AtomicMeasure& nu, const RootOptions& roots = {});
/// F*nu / d_t.
AtomicMeasure pullback_normalized(const Correspondence& f, const AtomicMeasure& nu, const RootOptions& roots = {});

/// d_t^-n (F^n)* delta_a by breadth-first backward expansion.
AtomicMeasure boyd_tree(const Correspondence& f, const SpherePointd& a, int n, const Caps& caps = {},
                        const RootOptions& roots = {}, unsigned workers = 1);

struct ChaosOptions {
  int burn = 50;
  std::size_t count = 1'000'000;
  std::uint64_t rng_seed = 0;
  double dedup_radius = 1e-9;
  unsigned workers = 1;
  RootOptions roots;
};

/// `count` independent backward random walks of `burn` steps from a, each
/// step choosing a fiber point with probability multiplicity / d_t. Walk i
/// uses its own generator seeded from (rng_seed, i), so the result does not
/// depend on the worker count.
AtomicMeasure chaos_sample(const Correspondence& f, const SpherePointd& a, const ChaosOptions& options);

/// Endpoint of walk `index` (exposed for distribution tests).
SpherePointd chaos_walk(const Correspondence& f, const SpherePointd& a, int steps, std::uint64_t rng_seed,
                        std::uint64_t index, const RootOptions& roots = {});

struct InvarianceDefect {
  double max = 0.0;
  std::vector<double> per_function;
};

/// max over phi of |<mu, T phi> - d_t <mu, phi>| / d_t.
InvarianceDefect invariance_defect(const Correspondence& f, const AtomicMeasure& mu,
                                   const std::vector<TestFunction>& phis, const RootOptions& roots = {},
                                   unsigned workers = 1);

/// max over phi of |<mu1, phi> - <mu2, phi>|.
double weakstar_distance(const AtomicMeasure& a, const AtomicMeasure& b, const std::vector<TestFunction>& phis);

/// Throws DegenerateAtom if an atom of mu is within `tol` of a degenerate
/// backward-fiber point of f.
void check_atoms_generic(const Correspondence& f, const AtomicMeasure& mu, double tol = 1e-9);

/// Atom CSV: "# holocorr atoms v1", provenance and "# total_mass=" comment
/// lines, header "kind,re,im,weight", then one row per atom.
void write_atoms(std::ostream& out, const AtomicMeasure& mu);
/// Throws IoError on malformed rows or a total mass mismatch above 1e-6.
AtomicMeasure read_atoms(std::istream& in);

}  // namespace holocorr
