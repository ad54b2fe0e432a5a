#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "gwbridge/tree.hpp"
#include "gwbridge/walk.hpp"

namespace gwbridge {

/// dSRW/dBRW(m) of a root-to-root path of 2n steps, in log space.
/// Throws std::invalid_argument unless the path starts and ends at the root
/// after an even number of steps.
double log_rn_derivative(const Tree& tree, const WalkPath& path, int m);
double rn_derivative(const Tree& tree, const WalkPath& path, int m);

/// One factor of the derivative: 1 at the root, (deg+m)/(deg+1) elsewhere.
double rn_bracket(const Tree& tree, Tree::Index v, int m);

struct SandwichConstants {
  int m = 1;
  double M = 1.0;   ///< 4m/(m+1)^2
  double c1 = 1.0;
  double c2 = 1.0;
  int max_deg_considered = 1;
};

/// Constants found by scanning every degree in [m, max_deg] plus the root.
/// c1 is the smallest bracket relative to its peak 2m/(m+1), c2 the largest
/// over the positions counted by B_n (root or degree > m).
SandwichConstants sandwich_constants(int m, int max_deg);

/// Largest out-degree among vertices of depth <= depth.
int max_degree_within(const Tree& tree, int depth);

struct SandwichReport {
  long n = 0;
  int m = 1;
  std::uint64_t paths_checked = 0;
  double min_slack_lower = 0.0;   ///< log(RN) - log(M^n c1^B_n), minimum over paths and events
  double min_slack_upper = 0.0;   ///< log(M^n c2^B_n) - log(RN)
  double identity_residual = 0.0; ///< max |sum BRW * RN * 1_A - SRW(A)|
  long path_violations = 0;
  long event_violations = 0;
  std::vector<int> L;             ///< event {X_2n = root, max <= L}; the last L is the plain return
  std::vector<double> srw;        ///< SRW(A) from the bridge DP
  std::vector<double> brw_rn;     ///< sum over enumerated paths of BRW-prob * RN
  std::vector<double> lower;      ///< M^n E_BRW[c1^B_n 1_A]
  std::vector<double> upper;      ///< M^n E_BRW[c2^B_n 1_A]

  [[nodiscard]] bool ok(double tol = 1e-12) const;
};

/// Exhaustive check over every 2n-step root-return path. Every vertex within
/// depth n must be expanded with at least m children and degree at most
/// constants.max_deg_considered (std::invalid_argument otherwise). Throws
/// CapacityExceeded past `max_paths`. First-step branches are split over
/// `workers` threads and summed in a fixed order.
SandwichReport verify_sandwich(const Tree& tree, long n, const SandwichConstants& constants,
                               std::uint64_t max_paths = 100'000'000, int workers = 1);

nlohmann::ordered_json to_json(const SandwichReport& report);

/// P_BRW(B_n = b, X_2n = root, max_{j<=2n} |X_j| <= L) for b = 0..2n, by a
/// forward DP over (vertex, running B count). Without L the limit is n, which
/// no return path can pass. The tree must be expanded below the limit.
std::vector<double> brw_bn_distribution(const Tree& tree, long n, int m, std::optional<int> L = std::nullopt);

/// M^n E_BRW[c^B_n 1_A] from the distribution above.
double sandwich_side(const std::vector<double>& bn_dist, long n, double M, double c);

}  // namespace gwbridge
