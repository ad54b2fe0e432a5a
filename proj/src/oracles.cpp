#include "gwbridge/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gwbridge {

double z_confinement(long n, int x) {
  if (n < 0 || x < 1) throw std::invalid_argument("z_confinement: need n >= 0 and x >= 1");
  const std::size_t width = 2 * static_cast<std::size_t>(x) + 1;
  // padded by one killed cell on each side
  std::vector<double> cur(width + 2, 0.0), next(width + 2, 0.0);
  cur[static_cast<std::size_t>(x) + 1] = 1.0;
  for (long t = 0; t < n; ++t) {
    for (std::size_t i = 1; i <= width; ++i) next[i] = 0.5 * (cur[i - 1] + cur[i + 1]);
    std::swap(cur, next);
  }
  double total = 0.0;
  for (std::size_t i = 1; i <= width; ++i) total += cur[i];
  return total;
}

std::vector<double> z_first_return_pmf(int k_max) {
  if (k_max < 1) throw std::invalid_argument("z_first_return_pmf: k_max must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(k_max));
  out[0] = 0.5;
  for (int k = 2; k <= k_max; ++k) out[k - 1] = out[k - 2] * (2.0 * k - 3.0) / (2.0 * k);
  return out;
}

std::vector<double> z_exit_time_dist(int b, int horizon) {
  if (b < 2) throw std::invalid_argument("z_exit_time_dist: b must be >= 2");
  if (horizon < 0) throw std::invalid_argument("z_exit_time_dist: negative horizon");
  // cells 1..b live; 0 and b+1 absorb
  std::vector<double> cur(static_cast<std::size_t>(b) + 2, 0.0), next(cur.size(), 0.0);
  cur[1] = 1.0;
  std::vector<double> cdf(static_cast<std::size_t>(horizon) + 1, 0.0);
  double exited = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 1; i <= b; ++i) {
      next[i - 1] += 0.5 * cur[i];
      next[i + 1] += 0.5 * cur[i];
    }
    exited += next[0] + next[b + 1];
    next[0] = next[b + 1] = 0.0;
    std::swap(cur, next);
    cdf[t] = exited;
  }
  return cdf;
}

double hitting_lambda_max(const Tree& tree, int n_leaves) {
  if (n_leaves < 1) throw std::invalid_argument("hitting_lambda_max: n_leaves must be >= 1");
  const double size = static_cast<double>(tree.size());
  const double n = n_leaves;
  double best = std::min(n / (18.0 * size), n * n / (18.0 * size * size));
  // subtree sizes of the root's children
  std::vector<double> sub(tree.size(), 1.0);
  for (std::size_t i = tree.size(); i-- > 1;) sub[tree.parent(static_cast<Tree::Index>(i))] += sub[i];
  for (int c = 0; c < tree.degree(0); ++c) {
    const double s = sub[tree.child(0, c)];
    best = std::min(best, 1.0 / (18.0 * s * s));
  }
  return best;
}

double hitting_moment(const Tree& tree, int n_leaves, double lam, bool check_range) {
  if (check_range && lam > hitting_lambda_max(tree, n_leaves) * (1.0 + 1e-12))
    throw std::invalid_argument("hitting_moment: lambda outside the admissible range");
  return hitting_moment_y<double>(tree, n_leaves, std::exp(lam));
}

namespace {

// Trees as parent arrays in preorder; children of the root are stored as
// canonical subtrees listed in non-increasing (size, rank) order.
using Shape = std::vector<Tree::Index>;

void attach(Shape& out, const Shape& sub) {
  const auto offset = static_cast<Tree::Index>(out.size());
  for (std::size_t i = 0; i < sub.size(); ++i) out.push_back(i == 0 ? 0 : sub[i] + offset);
}

}  // namespace

std::vector<Tree> enumerate_rooted_trees(int vertices) {
  if (vertices < 1) throw std::invalid_argument("enumerate_rooted_trees: need at least one vertex");
  std::vector<std::vector<Shape>> by_size(static_cast<std::size_t>(vertices) + 1);
  by_size[1] = {Shape{-1}};
  for (int n = 2; n <= vertices; ++n) {
    // Choose root subtrees as a non-increasing sequence of (size, rank).
    std::vector<std::pair<int, std::size_t>> picks;
    auto rec = [&](auto&& self, int remaining, int max_size, std::size_t max_rank) -> void {
      if (remaining == 0) {
        Shape s{-1};
        for (auto [sz, rk] : picks) attach(s, by_size[sz][rk]);
        by_size[n].push_back(std::move(s));
        return;
      }
      for (int sz = std::min(remaining, max_size); sz >= 1; --sz) {
        const std::size_t top = sz == max_size ? max_rank : by_size[sz].size() - 1;
        for (std::size_t rk = 0; rk <= top; ++rk) {
          picks.emplace_back(sz, rk);
          self(self, remaining - sz, sz, rk);
          picks.pop_back();
        }
      }
    };
    rec(rec, n - 1, n - 1, by_size[n - 1].size() - 1);
  }
  std::vector<Tree> out;
  out.reserve(by_size[vertices].size());
  for (const auto& s : by_size[vertices]) out.push_back(Tree::from_parents(s));
  return out;
}

}  // namespace gwbridge
