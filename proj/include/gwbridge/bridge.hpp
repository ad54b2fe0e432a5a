#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gwbridge/rng.hpp"
#include "gwbridge/tree.hpp"
#include "gwbridge/walk.hpp"

namespace gwbridge {

/// Per-vertex SRW occupancy over a time horizon. Vertices are the arena
/// prefix of depth <= depth_limit (the whole tree when there is no limit).
/// Stored masses are scaled: the true mass at time t is slice * exp(log_scale).
struct OccupancyTable {
  long horizon = 0;
  int depth_limit = -1;        ///< -1: no killing
  std::size_t width = 0;       ///< number of vertices tracked
  double leaked_mass = 0.0;    ///< probability killed on entering depth_limit + 1
  int stride = 0;              ///< every stride-th slice kept; 0 keeps only the last
  std::vector<std::vector<double>> slices;  ///< slices[k] is time k * stride
  std::vector<double> slice_log_scale;
  std::vector<double> last;    ///< time `horizon`
  double last_log_scale = 0.0;

  /// Sum of tracked mass at the final time, unscaled.
  [[nodiscard]] double final_mass() const;
};

struct BridgeResult {
  double p_return = 0.0;       ///< P(X_steps = root [, max <= L])
  double log_p_return = 0.0;   ///< natural log, finite even when p_return underflows
  OccupancyTable table;
};

/// Forward DP of the SRW kernel for `steps` steps from the root. With a depth
/// limit L the walk is killed on entering depth L+1 (L must be below the
/// depth cap); without one the tree must be complete or capped at depth
/// >= steps, otherwise std::invalid_argument. `stride` > 0 keeps every
/// stride-th slice for bridge sampling. Slices whose largest entry falls
/// below 1e-280 are rescaled, with the factor tracked in log space.
BridgeResult occupancy_dp(const Tree& tree, long steps, std::optional<int> depth_limit = std::nullopt,
                          int stride = 0);

/// occupancy_dp over 2n steps.
BridgeResult bridge_dp(const Tree& tree, long n, std::optional<int> depth_limit = std::nullopt, int stride = 0);

/// P(X_steps = root [, max <= L]) in any ordered field, with no rescaling;
/// used with exact rationals as a reference.
template <class Scalar>
Scalar return_prob(const Tree& tree, long steps, std::optional<int> depth_limit = std::nullopt) {
  if (steps > 0 && tree.degree(Tree::root()) == 0) throw std::domain_error("return_prob: isolated root has no move");
  const int limit = depth_limit.value_or(tree.max_depth());
  const std::size_t width = tree.prefix_size(limit);
  std::vector<Scalar> cur(width, Scalar(0)), next(width, Scalar(0)), out(width, Scalar(0));
  cur[0] = Scalar(1);
  for (long t = 0; t < steps; ++t) {
    for (std::size_t u = 0; u < width; ++u) {
      const auto v = static_cast<Tree::Index>(u);
      const int nb = tree.neighbours(v);
      out[u] = nb > 0 ? cur[u] / Scalar(nb) : Scalar(0);
    }
    for (std::size_t u = 0; u < width; ++u) {
      const auto v = static_cast<Tree::Index>(u);
      Scalar acc = v == Tree::root() ? Scalar(0) : out[tree.parent(v)];
      if (tree.depth(v) < limit)
        for (int c = 0; c < tree.degree(v); ++c) acc += out[tree.child(v, c)];
      next[u] = acc;
    }
    std::swap(cur, next);
  }
  return cur[0];
}

struct DispProfile {
  std::vector<int> L;
  std::vector<double> joint;        ///< P(max <= L, X_2n = root)
  std::vector<double> log_joint;
  std::vector<double> leaked;       ///< truncation certificate per L
  double p_ref = 0.0;               ///< denominator for the conditional cdf
  double log_p_ref = 0.0;
  bool p_ref_exact = false;         ///< no-kill value rather than the largest L
  std::vector<double> cdf;          ///< joint / p_ref
};

/// One kill-mode DP per L (sorted ascending). The reference return
/// probability is the no-kill DP when the tree reaches depth 2n, else the
/// value at the largest L (its leaked mass is then the certificate).
DispProfile max_disp_profile(const Tree& tree, long n, const std::vector<int>& L_list);

/// Exact sample of a walk conditioned on X_2n = root (and max <= L for a
/// kill-mode table) by the backward h-transform of a table built with a
/// positive stride. Slices between stored ones are recomputed.
WalkPath sample_bridge(const Tree& tree, long n, const OccupancyTable& table, CounterRng& rng);

/// Leaked mass of the kill-mode DP at L, an upper bound on
/// P(X_2n = root) - P(max <= L, X_2n = root); 0 when L >= 2n.
double truncation_bound(const Tree& tree, long n, int L);

}  // namespace gwbridge
