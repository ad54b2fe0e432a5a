#include "gwbridge/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gwbridge {

namespace {

constexpr double kRescaleBelow = 1e-280;

// One SRW step restricted to depth <= limit. Only levels of the parity that
// can carry mass are touched; each buffer only ever holds one parity.
class Stepper {
 public:
  Stepper(const Tree& tree, int limit) : tree_(tree), limit_(limit) {
    width_ = tree.prefix_size(limit);
    inv_.resize(width_);
    par_.resize(width_);
    for (std::size_t u = 0; u < width_; ++u) {
      const int nb = tree.neighbours(static_cast<Tree::Index>(u));
      inv_[u] = nb > 0 ? 1.0 / nb : 0.0;
      par_[u] = tree.parent(static_cast<Tree::Index>(u));
    }
    top_ = std::min(limit, tree.max_depth());
    int max_nb = 1;
    for (std::size_t u = 0; u < width_; ++u) max_nb = std::max(max_nb, tree.neighbours(static_cast<Tree::Index>(u)));
    // the largest entry shrinks by at most 1/max_nb per step; checking every
    // check_every_ steps keeps it above 1e-300 between checks
    check_every_ = std::max(1, static_cast<int>(20.0 / std::log10(max_nb + 1.0)));
  }

  [[nodiscard]] int check_every() const { return check_every_; }

  // Largest entry of the parity class holding time t_next.
  double largest(const std::vector<double>& buf, long t_next) const {
    const int parity = static_cast<int>(t_next & 1);
    const long reach = std::min<long>(top_, t_next);
    double m[4] = {0.0, 0.0, 0.0, 0.0};
    for (int d = parity; d <= reach; d += 2) {
      Tree::Index v = tree_.level_begin(d);
      const Tree::Index hi = tree_.level_end(d);
      for (; v + 4 <= hi; v += 4)
        for (int j = 0; j < 4; ++j) m[j] = std::max(m[j], buf[v + j]);
      for (; v < hi; ++v) m[0] = std::max(m[0], buf[v]);
    }
    return std::max(std::max(m[0], m[1]), std::max(m[2], m[3]));
  }

  [[nodiscard]] std::size_t width() const { return width_; }
  [[nodiscard]] double inv_neighbours(Tree::Index u) const { return inv_[u]; }

  // Advances from time t (in `cur`) to t+1 (into `next`). Returns the mass
  // killed on entering depth limit+1.
  double advance(const std::vector<double>& cur, std::vector<double>& next, long t) const {
    const int src_parity = static_cast<int>(t & 1);
    double killed = 0.0;
    if (limit_ <= top_ && (limit_ & 1) == src_parity) {
      for (Tree::Index v = tree_.level_begin(limit_); v < tree_.level_end(limit_); ++v)
        killed += cur[v] * inv_[v] * tree_.degree(v);
    }
    const long reach = std::min<long>(top_, t + 1);
    // Two branch-free sweeps per level: a gather from the parent level and a
    // scatter from the child level. Parent indices are nondecreasing in level
    // order, so both run as forward streams.
    const Tree::Index* __restrict par = par_.data();
    const double* __restrict inv = inv_.data();
    const double* __restrict src = cur.data();
    double* __restrict dst = next.data();
    const int deepest = tree_.max_depth();
    for (int d = 1 - src_parity; d <= reach; d += 2) {
      const Tree::Index lo = tree_.level_begin(d), hi = tree_.level_end(d);
      if (d == 0) {
        dst[0] = 0.0;
      } else {
        for (Tree::Index v = lo; v < hi; ++v) dst[v] = src[par[v]] * inv[par[v]];
      }
      if (d < limit_ && d < deepest) {
        for (Tree::Index c = tree_.level_begin(d + 1), ce = tree_.level_end(d + 1); c < ce; ++c)
          dst[par[c]] += src[c] * inv[c];
      }
    }
    return killed;
  }

  // Multiplies the parity class holding time t+1 by `factor`.
  void scale(std::vector<double>& buf, long t_next, double factor) const {
    const int parity = static_cast<int>(t_next & 1);
    const long reach = std::min<long>(top_, t_next);
    for (int d = parity; d <= reach; d += 2)
      for (Tree::Index v = tree_.level_begin(d); v < tree_.level_end(d); ++v) buf[v] *= factor;
  }

 private:
  const Tree& tree_;
  int limit_;
  int top_;
  int check_every_ = 1;
  std::size_t width_;
  std::vector<double> inv_;
  std::vector<Tree::Index> par_;
};

int resolve_limit(const Tree& tree, long steps, std::optional<int> depth_limit) {
  if (depth_limit) {
    if (*depth_limit < 0) throw std::invalid_argument("occupancy_dp: negative depth limit");
    if (!tree.complete() && *depth_limit >= tree.depth_cap())
      throw std::invalid_argument("occupancy_dp: depth limit must be below the depth cap");
    return *depth_limit;
  }
  if (!tree.complete() && tree.depth_cap() < steps)
    throw std::invalid_argument("occupancy_dp: depth cap " + std::to_string(tree.depth_cap()) +
                                " is below the horizon " + std::to_string(steps) +
                                "; pass a depth limit instead");
  return tree.complete() ? tree.max_depth() : tree.depth_cap();
}

}  // namespace

double OccupancyTable::final_mass() const {
  return std::accumulate(last.begin(), last.end(), 0.0) * std::exp(last_log_scale);
}

BridgeResult occupancy_dp(const Tree& tree, long steps, std::optional<int> depth_limit, int stride) {
  if (steps < 0) throw std::invalid_argument("occupancy_dp: negative step count");
  if (stride < 0) throw std::invalid_argument("occupancy_dp: negative stride");
  if (steps > 0 && tree.degree(Tree::root()) == 0) throw std::domain_error("occupancy_dp: isolated root has no move");
  const int limit = resolve_limit(tree, steps, depth_limit);
  const Stepper stepper(tree, limit);

  BridgeResult res;
  OccupancyTable& tab = res.table;
  tab.horizon = steps;
  tab.depth_limit = depth_limit ? limit : -1;
  tab.width = stepper.width();
  tab.stride = stride;

  std::vector<double> even(tab.width, 0.0), odd(tab.width, 0.0);
  even[0] = 1.0;
  double log_scale = 0.0;
  double leaked = 0.0;
  if (stride > 0) {
    tab.slices.push_back(even);
    tab.slice_log_scale.push_back(0.0);
  }
  for (long t = 0; t < steps; ++t) {
    const auto& cur = (t & 1) ? odd : even;
    auto& next = (t & 1) ? even : odd;
    leaked += stepper.advance(cur, next, t) * std::exp(log_scale);
    const double mx = (t + 1) % stepper.check_every() == 0 || t + 1 == steps ? stepper.largest(next, t + 1) : 1.0;
    if (mx > 0.0 && mx < kRescaleBelow) {
      stepper.scale(next, t + 1, 1.0 / mx);
      log_scale += std::log(mx);
    }
    if (stride > 0 && (t + 1) % stride == 0) {
      tab.slices.push_back(next);
      tab.slice_log_scale.push_back(log_scale);
    }
  }
  tab.leaked_mass = leaked;
  tab.last = (steps & 1) ? odd : even;
  // the other parity class may hold stale values from two steps back
  {
    const int parity = static_cast<int>(steps & 1);
    for (std::size_t u = 0; u < tab.width; ++u)
      if ((tree.depth(static_cast<Tree::Index>(u)) & 1) != parity) tab.last[u] = 0.0;
  }
  tab.last_log_scale = log_scale;
  res.p_return = tab.last[0] * std::exp(log_scale);
  res.log_p_return = tab.last[0] > 0.0 ? std::log(tab.last[0]) + log_scale : -std::numeric_limits<double>::infinity();
  return res;
}

BridgeResult bridge_dp(const Tree& tree, long n, std::optional<int> depth_limit, int stride) {
  if (n < 0) throw std::invalid_argument("bridge_dp: negative n");
  return occupancy_dp(tree, 2 * n, depth_limit, stride);
}

DispProfile max_disp_profile(const Tree& tree, long n, const std::vector<int>& L_list) {
  if (L_list.empty()) throw std::invalid_argument("max_disp_profile: empty L list");
  if (!std::is_sorted(L_list.begin(), L_list.end())) throw std::invalid_argument("max_disp_profile: L list not sorted");
  DispProfile out;
  out.L = L_list;
  for (int L : L_list) {
    // L >= 2n cannot bind, so that column is the unconstrained DP
    const std::optional<int> lim = L >= 2 * n ? std::nullopt : std::optional<int>(L);
    auto r = bridge_dp(tree, n, lim);
    out.joint.push_back(r.p_return);
    out.log_joint.push_back(r.log_p_return);
    out.leaked.push_back(L >= 2 * n ? 0.0 : r.table.leaked_mass);
  }
  if (tree.complete() || tree.depth_cap() >= 2 * n) {
    auto full = bridge_dp(tree, n);
    out.p_ref = full.p_return;
    out.log_p_ref = full.log_p_return;
    out.p_ref_exact = true;
  } else {
    out.p_ref = out.joint.back();
    out.log_p_ref = out.log_joint.back();
  }
  for (double lj : out.log_joint) out.cdf.push_back(std::isfinite(lj) ? std::exp(lj - out.log_p_ref) : 0.0);
  return out;
}

double truncation_bound(const Tree& tree, long n, int L) {
  if (L >= 2 * n) return 0.0;
  return bridge_dp(tree, n, L).table.leaked_mass;
}

WalkPath sample_bridge(const Tree& tree, long n, const OccupancyTable& table, CounterRng& rng) {
  if (table.stride <= 0) throw std::invalid_argument("sample_bridge: table was built without slices");
  if (table.horizon != 2 * n) throw std::invalid_argument("sample_bridge: table horizon is not 2n");
  if (!(table.last.size() > 0 && table.last[0] > 0.0)) throw std::domain_error("sample_bridge: return probability is 0");
  const int limit = table.depth_limit >= 0 ? table.depth_limit : (tree.complete() ? tree.max_depth() : tree.depth_cap());
  const int s = table.stride;
  // building a stepper costs O(width); only the recomputing path needs one
  std::optional<Stepper> stepper;
  if (s > 1) stepper.emplace(tree, limit);

  WalkPath path;
  path.kernel = Kernel::srw();
  path.vertices.assign(static_cast<std::size_t>(2 * n) + 1, Tree::root());
  std::vector<std::vector<double>> block;
  long block_start = -1;
  std::vector<Tree::Index> cand;
  std::vector<double> weight;

  for (long t = 2 * n - 1; t >= 0; --t) {
    const long k = t / s;
    if (s > 1 && k * s != block_start) {
      // rebuild slices k*s .. min(k*s + s - 1, 2n - 1) from the stored one
      block_start = k * s;
      const long end = std::min<long>(block_start + s - 1, 2 * n - 1);
      block.resize(static_cast<std::size_t>(s));
      block[0] = table.slices[static_cast<std::size_t>(k)];
      for (long u = block_start; u < end; ++u) {
        auto& dst = block[static_cast<std::size_t>(u - block_start + 1)];
        // buffers are reused across blocks, so clear entries beyond the reach
        dst.assign(table.width, 0.0);
        stepper->advance(block[static_cast<std::size_t>(u - block_start)], dst, u);
        const double mx = (u + 1) % stepper->check_every() == 0 ? stepper->largest(dst, u + 1) : 1.0;
        if (mx > 0.0 && mx < kRescaleBelow) stepper->scale(dst, u + 1, 1.0 / mx);
      }
    }
    const auto& mass = s > 1 ? block[static_cast<std::size_t>(t - block_start)] : table.slices[static_cast<std::size_t>(t)];
    const Tree::Index w = path.vertices[static_cast<std::size_t>(t + 1)];
    cand.clear();
    weight.clear();
    double total = 0.0;
    auto consider = [&](Tree::Index u) {
      if (static_cast<std::size_t>(u) >= table.width) return;
      const double wt = mass[u] / tree.neighbours(u);
      if (wt <= 0.0) return;
      cand.push_back(u);
      weight.push_back(wt);
      total += wt;
    };
    if (w != Tree::root()) consider(tree.parent(w));
    for (int c = 0; c < tree.degree(w); ++c) consider(tree.child(w, c));
    if (cand.empty()) throw std::runtime_error("sample_bridge: no admissible predecessor");
    double u = rng.uniform() * total;
    std::size_t pick = 0;
    while (pick + 1 < cand.size() && u >= weight[pick]) u -= weight[pick++];
    path.vertices[static_cast<std::size_t>(t)] = cand[pick];
  }
  return path;
}

}  // namespace gwbridge
