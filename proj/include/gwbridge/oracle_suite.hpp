#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gwbridge {

/// Outcome of one named invariant check.
struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;   ///< the quantity compared against `tolerance`
  double tolerance = 0.0;
  long count = 0;          ///< instances examined
  std::string detail;
  double wall_ms = 0.0;
};

/// (x^2/n) log P(max_{j<=n} |S_j| <= x) against -pi^2/8; residual is the relative error.
CheckResult check_confinement_constant(long n = 1'000'000, int x = 251);

/// First-return pmf against C(2k,k) / ((2k-1) 4^k) for k <= k_max.
CheckResult check_first_return(int k_max = 20);

/// q of {0: 1/4, 2: 3/4} is 1/3, the dual law is subcritical, and F_n stays
/// below x_o for certified x.
CheckResult check_extinction_dual();

/// Exponential moment of the hitting time against e^{lam (5|T|/n + 1)} for
/// every rooted tree up to `max_vertices` and n = 1..3, lam at its largest
/// admissible value, in exact rational arithmetic. e^lam is bracketed by
/// Taylor sums with a remainder term.
CheckResult check_hitting_bound(int max_vertices = 7);

/// The n = 1 form e^{lam (4|T| - 3)} over the same trees.
CheckResult check_hitting_bound_single(int max_vertices = 7);

/// Exhaustive change-of-measure identity and per-path sandwich on random
/// trees with at least m children per vertex.
CheckResult check_change_of_measure(std::uint64_t seed, int trees = 20);

/// bridge_dp against rational path enumeration on every tree up to
/// `max_vertices` vertices, n <= 3, every kill level.
CheckResult check_bridge_enumeration(int max_vertices = 10);

/// bridge_dp against direct simulation on a random 50-vertex tree at n = 6;
/// residual in standard errors.
CheckResult check_bridge_monte_carlo(std::uint64_t seed, long paths = 1'000'000);

/// Coupled tree/line walks never violate the domination, over 10 trees.
CheckResult check_couplings(std::uint64_t seed, long paths = 100'000);

/// Escape bracket on the binary tree at cap 30 contains 1/6 and is narrower than 1e-6.
CheckResult check_escape_binary();

/// Every check above with default sizes.
std::vector<CheckResult> run_all_checks(std::uint64_t seed);

}  // namespace gwbridge
