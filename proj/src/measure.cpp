#include "gwbridge/measure.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "gwbridge/bridge.hpp"
#include "gwbridge/errors.hpp"

namespace gwbridge {

double rn_bracket(const Tree& tree, Tree::Index v, int m) {
  if (v == Tree::root()) return 1.0;
  const double deg = tree.degree(v);
  return (deg + m) / (deg + 1.0);
}

double log_rn_derivative(const Tree& tree, const WalkPath& path, int m) {
  if (m < 1) throw std::invalid_argument("rn_derivative: m must be >= 1");
  const auto& x = path.vertices;
  if (x.empty() || x.front() != Tree::root()) throw std::invalid_argument("rn_derivative: path must start at the root");
  if (x.size() % 2 == 0) throw std::invalid_argument("rn_derivative: path must have an even number of steps");
  if (x.back() != Tree::root()) throw std::invalid_argument("rn_derivative: path must end at the root");
  const long n = static_cast<long>(x.size() - 1) / 2;
  double acc = -static_cast<double>(n) * std::log(static_cast<double>(m));
  for (std::size_t j = 0; j + 1 < x.size(); ++j) acc += std::log(rn_bracket(tree, x[j], m));
  return acc;
}

double rn_derivative(const Tree& tree, const WalkPath& path, int m) {
  return std::exp(log_rn_derivative(tree, path, m));
}

SandwichConstants sandwich_constants(int m, int max_deg) {
  if (m < 1 || max_deg < m) throw std::invalid_argument("sandwich_constants: need max_deg >= m >= 1");
  SandwichConstants c;
  c.m = m;
  c.max_deg_considered = max_deg;
  c.M = 4.0 * m / ((m + 1.0) * (m + 1.0));
  const double peak = 2.0 * m / (m + 1.0);
  // the root bracket is 1 and counts towards B_n
  double lo = 1.0, hi = 1.0;
  for (int d = m; d <= max_deg; ++d) {
    const double b = (d + static_cast<double>(m)) / (d + 1.0);
    lo = std::min(lo, b);
    if (d > m) hi = std::max(hi, b);
  }
  c.c1 = lo / peak;
  c.c2 = hi / peak;
  return c;
}

int max_degree_within(const Tree& tree, int depth) {
  int out = 0;
  const std::size_t end = tree.prefix_size(std::min(depth, tree.max_depth()));
  for (std::size_t v = 0; v < end; ++v) out = std::max(out, tree.degree(static_cast<Tree::Index>(v)));
  return out;
}

bool SandwichReport::ok(double tol) const {
  return path_violations == 0 && event_violations == 0 && identity_residual <= tol;
}

namespace {

// Sums for the paths below one first step, bucketed by the path maximum.
struct Branch {
  std::uint64_t paths = 0;
  double min_lo = std::numeric_limits<double>::infinity();
  double min_hi = std::numeric_limits<double>::infinity();
  long violations = 0;
  std::vector<double> brw_rn, lower, upper;
};

class Enumerator {
 public:
  Enumerator(const Tree& tree, long n, const SandwichConstants& c, std::uint64_t budget)
      : tree_(tree), n_(n), c_(c), budget_(budget), brw_(Kernel::brw(c.m)) {
    log_base_ = static_cast<double>(n) * std::log(c.M);
    log_c1_ = std::log(c.c1);
    log_c2_ = std::log(c.c2);
    log_m_n_ = -static_cast<double>(n) * std::log(static_cast<double>(c.m));
  }

  Branch run(Tree::Index first) const {
    Branch b;
    b.brw_rn.assign(static_cast<std::size_t>(n_) + 1, 0.0);
    b.lower = b.brw_rn;
    b.upper = b.brw_rn;
    const double p = transition_prob(tree_, Tree::root(), first, brw_);
    const long B = 1;  // the root at j = 0
    dfs(b, first, 1, std::log(p), std::log(rn_bracket(tree_, Tree::root(), c_.m)), B, tree_.depth(first));
    return b;
  }

 private:
  void dfs(Branch& b, Tree::Index x, long j, double log_brw, double log_bracket, long B, int maxd) const {
    const long steps = 2 * n_;
    if (j == steps) {
      if (x != Tree::root()) return;
      if (++b.paths > budget_) throw CapacityExceeded("verify_sandwich: path budget exceeded");
      const double log_rn = log_m_n_ + log_bracket;
      const double lo = log_base_ + static_cast<double>(B) * log_c1_;
      const double hi = log_base_ + static_cast<double>(B) * log_c2_;
      b.min_lo = std::min(b.min_lo, log_rn - lo);
      b.min_hi = std::min(b.min_hi, hi - log_rn);
      if (log_rn - lo < -1e-12 || hi - log_rn < -1e-12) ++b.violations;
      const double w = std::exp(log_brw);
      b.brw_rn[maxd] += std::exp(log_brw + log_rn);
      b.lower[maxd] += w * std::exp(lo);
      b.upper[maxd] += w * std::exp(hi);
      return;
    }
    // a return at time 2n needs depth <= remaining steps
    if (tree_.depth(x) > steps - j) return;
    const double lb = log_bracket + std::log(rn_bracket(tree_, x, c_.m));
    const long nb = B + ((x == Tree::root() || tree_.degree(x) > c_.m) ? 1 : 0);
    auto go = [&](Tree::Index y) {
      const double p = transition_prob(tree_, x, y, brw_);
      if (p <= 0.0) return;
      dfs(b, y, j + 1, log_brw + std::log(p), lb, nb, std::max(maxd, tree_.depth(y)));
    };
    if (x != Tree::root()) go(tree_.parent(x));
    for (int i = 0; i < tree_.degree(x); ++i) go(tree_.child(x, i));
  }

  const Tree& tree_;
  long n_;
  SandwichConstants c_;
  std::uint64_t budget_;
  Kernel brw_;
  double log_base_ = 0.0, log_c1_ = 0.0, log_c2_ = 0.0, log_m_n_ = 0.0;
};

}  // namespace

SandwichReport verify_sandwich(const Tree& tree, long n, const SandwichConstants& constants, std::uint64_t max_paths,
                               int workers) {
  if (n < 1) throw std::invalid_argument("verify_sandwich: n must be >= 1");
  const int m = constants.m;
  if (!tree.complete() && tree.depth_cap() <= n)
    throw std::invalid_argument("verify_sandwich: depth cap must exceed n");
  if (tree.max_depth() < n) throw std::invalid_argument("verify_sandwich: tree shallower than n");
  for (std::size_t v = 0; v < tree.prefix_size(static_cast<int>(n)); ++v) {
    const int d = tree.degree(static_cast<Tree::Index>(v));
    if (d < m)
      throw std::invalid_argument("verify_sandwich: vertex " + std::to_string(v) + " has fewer than m children");
    if (d > constants.max_deg_considered)
      throw std::invalid_argument("verify_sandwich: degree " + std::to_string(d) + " not covered by the constants");
  }

  const Enumerator en(tree, n, constants, max_paths);
  const int deg0 = tree.degree(Tree::root());
  std::vector<Branch> branches(static_cast<std::size_t>(deg0));
  const int nthreads = std::max(1, std::min(workers, deg0));
  if (nthreads == 1) {
    for (int i = 0; i < deg0; ++i) branches[i] = en.run(tree.child(Tree::root(), i));
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < deg0; i += nthreads) branches[i] = en.run(tree.child(Tree::root(), i));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SandwichReport r;
  r.n = n;
  r.m = m;
  r.min_slack_lower = r.min_slack_upper = std::numeric_limits<double>::infinity();
  const auto width = static_cast<std::size_t>(n) + 1;
  std::vector<double> brw_rn(width, 0.0), lower(width, 0.0), upper(width, 0.0);
  for (const auto& b : branches) {
    r.paths_checked += b.paths;
    if (r.paths_checked > max_paths) throw CapacityExceeded("verify_sandwich: path budget exceeded");
    r.min_slack_lower = std::min(r.min_slack_lower, b.min_lo);
    r.min_slack_upper = std::min(r.min_slack_upper, b.min_hi);
    r.path_violations += b.violations;
    for (std::size_t d = 0; d < width; ++d) {
      brw_rn[d] += b.brw_rn[d];
      lower[d] += b.lower[d];
      upper[d] += b.upper[d];
    }
  }

  double acc_rn = 0.0, acc_lo = 0.0, acc_hi = 0.0;
  for (int L = 0; L <= n; ++L) {
    acc_rn += brw_rn[L];
    acc_lo += lower[L];
    acc_hi += upper[L];
    const double srw = bridge_dp(tree, n, L).p_return;
    r.L.push_back(L);
    r.srw.push_back(srw);
    r.brw_rn.push_back(acc_rn);
    r.lower.push_back(acc_lo);
    r.upper.push_back(acc_hi);
    r.identity_residual = std::max(r.identity_residual, std::abs(acc_rn - srw));
    if (srw > 0.0) {
      const double sl = std::log(srw) - std::log(acc_lo);
      const double su = std::log(acc_hi) - std::log(srw);
      r.min_slack_lower = std::min(r.min_slack_lower, sl);
      r.min_slack_upper = std::min(r.min_slack_upper, su);
      if (sl < -1e-12 || su < -1e-12) ++r.event_violations;
    } else if (acc_lo > 0.0) {
      ++r.event_violations;
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const SandwichReport& r) {
  nlohmann::ordered_json j;
  j["paths_checked"] = r.paths_checked;
  j["min_slack_lower"] = r.min_slack_lower;
  j["min_slack_upper"] = r.min_slack_upper;
  j["identity_residual"] = r.identity_residual;
  j["n"] = r.n;
  j["m"] = r.m;
  j["path_violations"] = r.path_violations;
  j["event_violations"] = r.event_violations;
  j["L"] = r.L;
  j["srw"] = r.srw;
  j["brw_rn"] = r.brw_rn;
  return j;
}

}  // namespace gwbridge

namespace gwbridge {

std::vector<double> brw_bn_distribution(const Tree& tree, long n, int m, std::optional<int> L) {
  if (n < 0) throw std::invalid_argument("brw_bn_distribution: negative n");
  if (m < 1) throw std::invalid_argument("brw_bn_distribution: m must be >= 1");
  const int limit = static_cast<int>(std::min<long>(L.value_or(static_cast<int>(n)), n));
  if (limit < 0) throw std::invalid_argument("brw_bn_distribution: negative L");
  if (!tree.complete() && tree.depth_cap() <= limit)
    throw std::invalid_argument("brw_bn_distribution: tree must be expanded below the depth limit");
  const int top = std::min(limit, tree.max_depth());
  const std::size_t width = tree.prefix_size(top);
  const auto steps = static_cast<std::size_t>(2 * n);
  const std::size_t nb = steps + 1;
  std::vector<double> cur(width * nb, 0.0), next(width * nb, 0.0);
  cur[0] = 1.0;
  const Kernel brw = Kernel::brw(m);
  for (std::size_t t = 0; t < steps; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t v = 0; v < width; ++v) {
      const auto x = static_cast<Tree::Index>(v);
      const std::size_t bump = (x == Tree::root() || tree.degree(x) > m) ? 1 : 0;
      const double* src = &cur[v * nb];
      auto push = [&](Tree::Index y) {
        if (static_cast<std::size_t>(y) >= width) return;  // killed above the limit
        const double p = transition_prob(tree, x, y, brw);
        double* dst = &next[static_cast<std::size_t>(y) * nb];
        for (std::size_t b = 0; b + bump < nb; ++b)
          if (src[b] != 0.0) dst[b + bump] += src[b] * p;
      };
      if (x != Tree::root()) push(tree.parent(x));
      for (int c = 0; c < tree.degree(x); ++c) push(tree.child(x, c));
    }
    cur.swap(next);
  }
  return {cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(nb)};
}

double sandwich_side(const std::vector<double>& bn_dist, long n, double M, double c) {
  double s = 0.0;
  for (std::size_t b = 0; b < bn_dist.size(); ++b) s += bn_dist[b] * std::pow(c, static_cast<double>(b));
  return std::pow(M, static_cast<double>(n)) * s;
}

}  // namespace gwbridge
