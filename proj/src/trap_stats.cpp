#include "gwbridge/trap_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace gwbridge {

TrapStats trap_stats(const Tree& tree, int k, TrapMode mode, int m) {
  if (k < 1) throw std::invalid_argument("trap_stats: k must be >= 1");
  if (mode != TrapMode::Pipe && m < 1) throw std::invalid_argument("trap_stats: m must be >= 1");
  const std::size_t n = tree.size();
  TrapStats out;
  out.mode = mode;
  out.k = k;
  out.m = mode == TrapMode::Pipe ? 1 : m;
  out.vertex_value.assign(n, 0);
  out.vertex_censored.assign(n, 0);
  const int want = out.m;

  for (std::size_t i = n; i-- > 0;) {
    const auto v = static_cast<Tree::Index>(i);
    if (tree.is_open(v)) {
      out.vertex_censored[i] = 1;
      continue;
    }
    if (tree.degree(v) != want) continue;
    const Tree::Index c0 = tree.first_child(v);
    const int deg = tree.degree(v);
    switch (mode) {
      case TrapMode::Pipe:
        out.vertex_value[i] = 1 + out.vertex_value[c0];
        out.vertex_censored[i] = out.vertex_censored[c0];
        break;
      case TrapMode::MAry: {
        int best = std::numeric_limits<int>::max();
        bool exact_at_min = false;
        for (int c = 0; c < deg; ++c) {
          const int val = out.vertex_value[c0 + c];
          const bool exact = !out.vertex_censored[c0 + c];
          if (val < best) {
            best = val;
            exact_at_min = exact;
          } else if (val == best) {
            exact_at_min |= exact;
          }
        }
        out.vertex_value[i] = 1 + best;
        out.vertex_censored[i] = !exact_at_min;
        break;
      }
      case TrapMode::LeafPipe: {
        // only a child whose siblings are all leaves continues the pipe; an
        // open child might or might not be a leaf
        int inner = 0, open = 0;
        Tree::Index last_inner = Tree::npos;
        for (int c = 0; c < deg; ++c) {
          if (tree.is_open(c0 + c)) {
            ++open;
          } else if (!tree.is_leaf(c0 + c)) {
            ++inner;
            last_inner = c0 + c;
          }
        }
        if (inner >= 2) break;  // exact 0
        if (inner == 1) {
          out.vertex_value[i] = 1 + out.vertex_value[last_inner];
          out.vertex_censored[i] = open > 0 || out.vertex_censored[last_inner];
        } else {
          out.vertex_value[i] = 1;
          out.vertex_censored[i] = open > 0;
        }
        break;
      }
    }
  }

  const int levels = tree.max_depth() + 1;
  out.level_max.assign(levels, 0);
  out.level_censored.assign(levels, 0);
  out.level_eligible.assign(levels, 0);
  std::vector<std::uint8_t> eligible(n, 0);
  eligible[0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<Tree::Index>(i);
    if (i > 0) {
      const Tree::Index p = tree.parent(v);
      eligible[i] = eligible[p] && tree.degree(p) <= k;
    }
    if (!eligible[i]) continue;
    const int d = tree.depth(v);
    ++out.level_eligible[d];
    out.level_max[d] = std::max(out.level_max[d], out.vertex_value[i]);
    out.level_censored[d] |= out.vertex_censored[i];
  }
  return out;
}

double PathProducts::max_product(int level) const { return std::exp(log_max_product.at(level)); }

PathProducts path_products(const Tree& tree) {
  const std::size_t n = tree.size();
  std::vector<double> log_prod(n, 0.0);
  PathProducts out;
  out.branch_count.assign(n, 0);
  out.log_max_product.assign(tree.max_depth() + 1, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<Tree::Index>(i);
    if (i > 0) {
      const Tree::Index p = tree.parent(v);
      log_prod[i] = log_prod[p] + std::log(static_cast<double>(tree.degree(p)));
      out.branch_count[i] = out.branch_count[p] + (tree.degree(p) >= 2 ? 1 : 0);
    }
    auto& slot = out.log_max_product[tree.depth(v)];
    slot = std::max(slot, log_prod[i]);
  }
  return out;
}

}  // namespace gwbridge

namespace gwbridge {

double trap_tail(const OffspringDist& dist, TrapMode mode, int m, int ell) {
  if (ell <= 0) return 1.0;
  if (mode == TrapMode::Pipe) m = 1;
  if (m < 1) throw std::invalid_argument("trap_tail: m must be >= 1");
  const double pm = dist.prob(m);
  switch (mode) {
    case TrapMode::Pipe:
      return std::pow(pm, ell);
    case TrapMode::MAry: {
      if (pm >= 1.0) return 1.0;
      if (pm <= 0.0) return 0.0;
      const double count = m == 1 ? ell : (std::pow(static_cast<double>(m), ell) - 1.0) / (m - 1);
      return std::exp(count * std::log(pm));
    }
    case TrapMode::LeafPipe: {
      const double p0 = dist.p_zero();
      const double lone = m * std::pow(p0, m - 1);
      const double g1 = pm * (std::pow(p0, m) + lone * (1.0 - p0));
      return g1 * std::pow(pm * lone, ell - 1);
    }
  }
  return 0.0;
}

namespace {

// Binomial(count, p) for counts held in a double. Exact below 2^53, where the
// normal approximation error is far below the count's own resolution.
double binomial_draw(double count, double p, CounterRng& rng, bool& approx) {
  if (count <= 0.0 || p <= 0.0) return 0.0;
  if (p >= 1.0) return count;
  if (count < 9.0e15) {
    std::binomial_distribution<long long> bin(static_cast<long long>(count), p);
    return static_cast<double>(bin(rng));
  }
  approx = true;
  std::normal_distribution<double> gauss(count * p, std::sqrt(count * p * (1.0 - p)));
  return std::clamp(std::round(gauss(rng)), 0.0, count);
}

}  // namespace

LevelClassCounts level_class_counts(const OffspringDist& dist, int n, CounterRng& rng) {
  if (n < 0) throw std::invalid_argument("level_class_counts: negative n");
  const int D = dist.max_support();
  const auto& p = dist.pmf();
  LevelClassCounts out;
  out.count.assign(static_cast<std::size_t>(n) + 1, std::vector<double>(static_cast<std::size_t>(D) + 1, 0.0));
  out.count[0][0] = 1.0;
  for (int t = 0; t < n; ++t) {
    auto& next = out.count[t + 1];
    bool approx = false;
    for (int c = 0; c <= D; ++c) {
      double rem = out.count[t][c];
      double mass = 1.0;
      // multinomial split of the class-c vertices by degree, one binomial at a time
      for (int d = 0; d <= D && rem > 0.0; ++d) {
        const double take = d == D || mass <= p[d] ? rem : binomial_draw(rem, p[d] / mass, rng, approx);
        if (d > 0) next[std::max(c, d)] += take * d;
        rem -= take;
        mass -= p[d];
      }
    }
    if (approx && out.first_approx < 0) out.first_approx = t + 1;
  }
  return out;
}

double LevelClassCounts::eligible(int level, int k) const {
  double s = 0.0;
  const auto& row = count.at(static_cast<std::size_t>(level));
  for (int c = 0; c < static_cast<int>(row.size()) && c <= k; ++c) s += row[c];
  return s;
}

LevelSizes eligible_level_sizes(const OffspringDist& dist, int k, int n, CounterRng& rng) {
  if (k < 1) throw std::invalid_argument("eligible_level_sizes: k must be >= 1");
  const auto counts = level_class_counts(dist, n, rng);
  LevelSizes out;
  out.first_approx = counts.first_approx;
  for (int t = 0; t <= n; ++t) out.size.push_back(counts.eligible(t, k));
  return out;
}

LevelMaxDraw sample_level_max(const OffspringDist& dist, TrapMode mode, int m, double count, CounterRng& rng) {
  LevelMaxDraw out;
  if (count <= 0.0) return out;
  if (trap_tail(dist, mode, m, 1) >= 1.0 && trap_tail(dist, mode, m, 2) >= 1.0) {
    out.unbounded = true;
    out.value = kUnbounded;
    return out;
  }
  // max >= ell + 1 unless (1 - tail(ell + 1))^count > U
  const double log_u = std::log(1.0 - rng.uniform());
  int ell = 0;
  while (ell < 100'000'000) {
    const double t = trap_tail(dist, mode, m, ell + 1);
    if (t <= 0.0 || count * std::log1p(-t) > log_u) break;
    ++ell;
  }
  out.value = ell;
  return out;
}

}  // namespace gwbridge

namespace gwbridge {

std::vector<LevelMaxDraw> sample_nested_level_max(const OffspringDist& dist, TrapMode mode, int m,
                                                  const std::vector<double>& class_count, const std::vector<int>& ks,
                                                  CounterRng& rng) {
  if (!std::is_sorted(ks.begin(), ks.end())) throw std::invalid_argument("sample_nested_level_max: k list not sorted");
  std::vector<LevelMaxDraw> out;
  LevelMaxDraw running;
  int done = -1;  // classes <= done are already included
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("sample_nested_level_max: k must be >= 1");
    double added = 0.0;
    for (int c = done + 1; c < static_cast<int>(class_count.size()) && c <= k; ++c) added += class_count[c];
    done = std::max(done, static_cast<int>(std::min<long>(k, static_cast<long>(class_count.size()) - 1)));
    const auto fresh = sample_level_max(dist, mode, m, added, rng);
    if (fresh.unbounded) running = fresh;
    else if (!running.unbounded) running.value = std::max(running.value, fresh.value);
    out.push_back(running);
  }
  return out;
}

}  // namespace gwbridge
