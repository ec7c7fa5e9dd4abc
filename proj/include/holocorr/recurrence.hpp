#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holocorr/iteration.hpp"
#include "holocorr/measure.hpp"
#include "holocorr/region.hpp"

namespace holocorr {

enum class HitStatus { hit, miss, unknown_capped };

std::string to_string(HitStatus s);

/// Three-valued answer to "does F^n(x) meet R". A miss is only reported when
/// no mass was pruned up to level n; otherwise it is unknown_capped.
struct HitResult {
  HitStatus status = HitStatus::miss;
  std::optional<SpherePointd> witness;
  /// Every witness found lies within boundary_tol of the region boundary.
  bool near_boundary = false;
};

HitResult hits_region(const Correspondence& f, const SpherePointd& x, int n, const Region& r, const Caps& caps = {},
                      const RootOptions& roots = {});

/// Witness for one return: the path x = p0 -> p1 -> ... -> pn through the
/// chain components, with pn in the region.
struct ReturnCertificate {
  int n = 0;
  std::vector<PathStep> path;
  bool near_boundary = false;

  const SpherePointd& witness() const { return path.back().point; }
};

struct ReturnTimes {
  std::vector<int> times;
  /// Parallel to times.
  std::vector<ReturnCertificate> certificates;
  /// Levels where nothing was found but mass had been pruned.
  std::vector<int> unknown;
  bool capped = false;
  double pruned_weight = 0.0;
};

/// All n in 1..horizon at which F^n(x) meets R, from one incremental
/// forward expansion. Throws PreconditionError when horizon < 1.
ReturnTimes return_times(const Correspondence& f, const SpherePointd& x, const Region& r, int horizon,
                         const Caps& caps = {}, const RootOptions& roots = {});

/// Re-walks the certificate path: every step must satisfy the component
/// relation to within `tol` and the endpoint must lie in R.
bool validate_certificate(const Correspondence& f, const SpherePointd& x, const Region& r,
                          const ReturnCertificate& cert, double tol = 1e-6);

/// A word is a list of generator indices in order of application, so the
/// word {i, j} is g_j ∘ g_i.
using Word = std::vector<int>;

struct WordChain {
  /// Strictly increasing lengths; each word extends the previous one.
  std::vector<Word> words;
  /// g(x) for each word, as found by the search.
  std::vector<SpherePointd> values;
};

struct WordWitnessOptions {
  Caps caps{4096, 1e-9};
};

/// Longest nested chain g_1, g_2 = h_1 ∘ g_1, ... with g_i(x) in R and
/// l(g_i) <= horizon, truncated to max_chain words. A word orbit visiting R
/// at levels n_1 < n_2 < ... gives the chain of its prefixes, so the search
/// maximizes visits over orbits level by level.
WordChain word_witness(const std::vector<RationalMap>& generators, const SpherePointd& x, const Region& r,
                       int horizon, int max_chain, const WordWitnessOptions& options = {});

/// Direct evaluation check of a chain: nesting, increasing lengths, every
/// g_i(x) in R.
bool validate_chain(const std::vector<RationalMap>& generators, const SpherePointd& x, const Region& r,
                    const WordChain& chain);

enum class RecurrenceDirection { forward, backward };

std::string to_string(RecurrenceDirection d);

struct RecurrenceOptions {
  int horizon = 40;
  int min_returns = 10;
  /// Fractions with >= r returns are reported for r = 1..r_max.
  int r_max = 10;
  std::size_t max_points = 500;
  std::uint64_t seed = 0;
  /// Small caps keep the backward tree tractable; a found witness stays a
  /// certified return, misses under pruning become unknown.
  Caps caps{256, 1e-9};
  RootOptions roots;
  bool witnesses = false;
  /// Word witness search, used when `witnesses` is set.
  int witness_horizon = 24;
  int witness_max_chain = 5;
  std::vector<RationalMap> generators;
  unsigned workers = 1;
};

struct AtomRecord {
  std::size_t atom_index = 0;
  Atom atom;
  /// Returns certified by a witness away from the region boundary.
  std::vector<int> times;
  std::vector<ReturnCertificate> certificates;
  /// Returns whose only witnesses were within boundary_tol of the boundary;
  /// not counted.
  std::vector<int> boundary_times;
  std::vector<int> unknown;
  bool capped = false;
  std::optional<WordChain> chain;
};

struct ReturnAggregate {
  std::size_t atoms_in_region = 0;
  std::size_t atoms_sampled = 0;
  /// Mass of mu in R over total mass.
  double region_mass = 0.0;
  /// Index r - 1 holds the fraction of sampled atoms with >= r returns.
  std::vector<double> fraction_at_least;
  double fraction_min_returns = 0.0;
  std::size_t capped_atoms = 0;
  /// No atom of mu lies in R.
  bool region_mass_zero = false;
  /// Fraction of sampled atoms with a chain of witness_max_chain words.
  double fraction_full_chain = 0.0;
};

struct ReturnReport {
  std::string region;
  RecurrenceDirection direction = RecurrenceDirection::forward;
  int horizon = 0;
  int min_returns = 0;
  std::uint64_t seed = 0;
  std::vector<AtomRecord> records;
  ReturnAggregate aggregate;
};

/// Samples up to max_points atoms of mu inside R, weighted and without
/// replacement, and computes their return times under F (forward) or
/// adjoint(F) (backward). Word witnesses need forward direction.
ReturnReport recurrence_experiment(const Correspondence& f, const AtomicMeasure& mu, const Region& r,
                                   RecurrenceDirection direction, const RecurrenceOptions& options);

/// Indices of k atoms drawn without replacement with probability
/// proportional to weight (key u^(1/w), largest keys win).
std::vector<std::size_t> weighted_sample(const std::vector<double>& weights, std::size_t k, std::uint64_t seed);

/// Chart window [x0, x1] x [y0, y1] cut into resolution^2 cells.
struct RasterGrid {
  double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
  int resolution = 256;
};

/// Row-major cell masses, row 0 at the top (largest imaginary part).
struct SupportRaster {
  RasterGrid grid;
  std::vector<double> mass;
  std::vector<bool> marked;
  /// Mass falling outside the window.
  double outside_mass = 0.0;
  std::optional<double> hausdorff;

  Complex cell_center(int row, int col) const;
  double cell_diagonal(int row, int col) const;
  /// Largest chordal diagonal over all cells.
  double max_cell_diagonal() const;
  std::vector<SpherePointd> marked_centers() const;
};

/// Cells with mass >= mass_floor are marked. With a reference region, also
/// the chordal Hausdorff distance from the marked centers to the centers of
/// cells inside the reference. Throws PreconditionError if resolution < 16.
SupportRaster support_raster(const AtomicMeasure& mu, const RasterGrid& grid, double mass_floor,
                             const std::optional<Region>& reference = std::nullopt);

struct SupportViolation {
  SpherePointd point;
  /// 'a': no forward image near the support; 'b': a backward image far from it.
  char kind = 'a';
  double distance = 0.0;
};

struct SupportInvarianceResult {
  std::vector<SupportViolation> violations;
  std::size_t checked = 0;
  /// Centers with some forward image farther than delta from the support.
  std::size_t forward_not_contained = 0;
  double delta = 0.0;
};

SupportInvarianceResult support_invariance_check(const Correspondence& f, const SupportRaster& raster, double delta,
                                                 const RootOptions& roots = {}, unsigned workers = 1);

/// True when some point of F(x) is farther than delta from the support.
bool forward_escapes_support(const Correspondence& f, const SupportRaster& raster, const SpherePointd& x,
                             double delta, const RootOptions& roots = {});

struct MassInequality {
  double region = 0.0;
  /// Mass of atoms x with F(x) meeting R.
  double preimage = 0.0;
  /// Mass of atoms y with F†(y) meeting R.
  double image = 0.0;
  double se_region = 0.0;
  double se_preimage = 0.0;
  double se_image = 0.0;
  double effective_samples = 0.0;
  int dt = 1;
  bool preimage_ok = false;
  bool image_upper_ok = false;
  bool image_lower_ok = false;

  bool pass() const { return preimage_ok && image_upper_ok && image_lower_ok; }
};

/// mu(R) <= mu(F†(R)) and mu(F(R)) / d_t <= mu(R) <= mu(F(R)), each within
/// 3 standard errors of the difference.
MassInequality mass_inequality_check(const Correspondence& f, const AtomicMeasure& mu, const Region& r,
                                     const RootOptions& roots = {}, unsigned workers = 1);
/// Same for several regions, computing each atom's fibers once.
std::vector<MassInequality> mass_inequality_check(const Correspondence& f, const AtomicMeasure& mu,
                                                  const std::vector<Region>& regions, const RootOptions& roots = {},
                                                  unsigned workers = 1);

/// Random closed discs and annuli scaled to the affine extent of mu's atoms
/// (|z| clipped to 10), alternating disc, annulus, disc, ...
std::vector<Region> random_regions(const AtomicMeasure& mu, int count, std::uint64_t seed);

}  // namespace holocorr
