#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "holocorr/correspondence.hpp"

namespace holocorr {

struct Caps {
  std::size_t max_atoms = 2'000'000;
  /// Points closer than this (chordal) are merged, weights summed.
  double dedup_radius = 1e-9;
};

/// Weighted point with a back-pointer into the previous level.
struct TracedAtom {
  SpherePointd point;
  double weight = 0.0;
  std::int32_t parent = -1;
  std::int32_t component = -1;
};

struct PathStep {
  int component = 0;
  SpherePointd point;
};

/// Breadth-first expansion x, F(x), F(F(x)), ... (or the backward analogue)
/// with multiplicities multiplied along paths. Each level is deduplicated and
/// capped; the pruned weight is accumulated rather than dropped silently.
/// Level contents do not depend on `workers`.
class FiberIteration {
 public:
  struct Options {
    Caps caps;
    RootOptions roots;
    /// Every level's weights are multiplied by this (1 / d_t normalizes).
    double weight_scale = 1.0;
    /// Keep all levels so that paths can be reconstructed.
    bool keep_history = true;
    unsigned workers = 1;
  };

  FiberIteration(const Correspondence& f, const SpherePointd& start, Side side, Options options);

  void advance();
  int depth() const { return depth_; }
  std::span<const TracedAtom> current() const { return levels_.back(); }
  std::span<const TracedAtom> level(int n) const;

  /// Total weight pruned by the atom cap so far (in scaled units).
  double pruned_weight() const { return pruned_; }
  bool capped() const { return pruned_ > 0.0; }
  /// True if some level was pruned at depth <= n.
  bool capped_by(int n) const;

  /// Steps from the start point to atom `index` of level `n`; needs history.
  std::vector<PathStep> path(int n, std::size_t index) const;

  Side side() const { return side_; }

 private:
  const Correspondence& f_;
  Side side_;
  Options options_;
  int depth_ = 0;
  double pruned_ = 0.0;
  int first_capped_level_ = -1;
  std::vector<std::vector<TracedAtom>> levels_;
};

struct IteratedFiber {
  std::vector<TracedAtom> atoms;
  double pruned_weight = 0.0;
  bool capped = false;
  /// False when the chain is made of forward graphs, where iterated
  /// application equals the fiber of the composed chain; true otherwise,
  /// where F(F(...F(x))) may strictly contain the fiber of F^n.
  bool iterated_application_semantics = false;
};

/// Points reachable in exactly n forward steps from x, with multiplicities.
IteratedFiber iterate_fiber(const Correspondence& f, const SpherePointd& x, int n, const Caps& caps = {},
                            const RootOptions& roots = {});

}  // namespace holocorr
