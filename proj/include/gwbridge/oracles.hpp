#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "gwbridge/tree.hpp"

namespace gwbridge {

/// P(max_{j<=n} |X_j| <= x) for simple random walk on Z started at 0, by a
/// killing DP on [-x, x].
double z_confinement(long n, int x);

/// P(first return to 0 happens at step 2k) for k = 1..k_max (entry k-1),
/// the coefficients of 1 - sqrt(1 - s^2).
std::vector<double> z_first_return_pmf(int k_max);

/// P(exit time <= t) for t = 0..horizon, for SRW started at 1 that exits
/// [1, b] by stepping to 0 or to b+1.
std::vector<double> z_exit_time_dist(int b, int horizon);

/// Largest lambda allowed by the hitting-time moment bound:
/// min{n/(18|T|), n^2/(18|T|^2), 1/(18|T(u)|^2) over root children u}.
double hitting_lambda_max(const Tree& tree, int n_leaves);

/// Thrown when a denominator of the hitting-moment recursion is not positive,
/// i.e. the exponential moment is infinite for this lambda.
class MomentDiverges : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// E[y^L] for the walk started at the root of `tree` with `n_leaves` extra
/// leaves attached to the root, L the hitting time of those leaves. Written
/// in terms of y = e^lambda so it can run over exact rationals. Unexpanded
/// nodes of a capped tree are treated as leaves.
template <class Scalar>
Scalar hitting_moment_y(const Tree& tree, int n_leaves, const Scalar& y) {
  if (n_leaves < 1) throw std::invalid_argument("hitting_moment: n_leaves must be >= 1");
  // f[v] = E[y^{time to reach parent(v)}] for the walk started at v inside T(v)
  std::vector<Scalar> f(tree.size());
  for (std::size_t i = tree.size(); i-- > 0;) {
    const auto v = static_cast<Tree::Index>(i);
    Scalar sum = 0;
    for (int c = 0; c < tree.degree(v); ++c) sum += f[tree.child(v, c)];
    const int out_edges = tree.degree(v) + (v == 0 ? n_leaves : 1);
    const Scalar step = y / Scalar(out_edges);
    const Scalar denom = Scalar(1) - step * sum;
    if (!(denom > 0)) throw MomentDiverges("hitting_moment: recursion denominator is not positive");
    f[i] = (v == 0 ? Scalar(n_leaves) : Scalar(1)) * step / denom;
  }
  return f[0];
}

/// E[e^{lam L}] as above. With `check_range`, lam above hitting_lambda_max is
/// rejected with std::invalid_argument.
double hitting_moment(const Tree& tree, int n_leaves, double lam, bool check_range = true);

/// Every rooted unlabelled tree with exactly `vertices` vertices, one per
/// isomorphism class, in level order.
std::vector<Tree> enumerate_rooted_trees(int vertices);

}  // namespace gwbridge
