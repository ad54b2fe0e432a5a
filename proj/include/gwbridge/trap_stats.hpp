#pragma once

#include <climits>
#include <cstdint>
#include <vector>

#include "gwbridge/offspring.hpp"
#include "gwbridge/rng.hpp"
#include "gwbridge/tree.hpp"

namespace gwbridge {

enum class TrapMode {
  Pipe,      ///< d(v): run of degree-1 vertices starting at v
  LeafPipe,  ///< h(v): run of degree-m vertices whose off-path children are leaves
  MAry,      ///< w(v): generations below v that are entirely m-ary
};

/// k value meaning "no restriction on ancestor degrees".
inline constexpr int kUnbounded = INT_MAX;

struct TrapStats {
  TrapMode mode = TrapMode::Pipe;
  int k = kUnbounded;
  int m = 1;
  std::vector<int> vertex_value;               ///< per node; a lower bound when censored
  std::vector<std::uint8_t> vertex_censored;   ///< statistic cut off by the depth cap
  std::vector<int> level_max;                  ///< per level: max over eligible vertices (0 if none)
  std::vector<std::uint8_t> level_censored;    ///< some eligible vertex on the level is censored
  std::vector<std::int64_t> level_eligible;    ///< count of eligible vertices per level
};

/// Per-level maxima of the chosen statistic over vertices all of whose strict
/// ancestors have degree <= k. `m` is the minimal positive offspring value
/// (ignored in Pipe mode).
TrapStats trap_stats(const Tree& tree, int k, TrapMode mode, int m = 1);

struct PathProducts {
  std::vector<double> log_max_product;  ///< per level: log of max over v of prod_{u<v} deg(u)
  std::vector<int> branch_count;        ///< per node: strict ancestors with degree >= 2
  [[nodiscard]] double max_product(int level) const;
};

PathProducts path_products(const Tree& tree);

/// P(stat(v) >= ell) for a vertex of an unbounded GW tree of this law:
/// Pipe p1^ell; MAry pm^((m^ell - 1)/(m - 1)); LeafPipe g1 rho^(ell-1) with
/// g1 = pm (p0^m + m p0^(m-1) (1 - p0)) and rho = pm m p0^(m-1).
double trap_tail(const OffspringDist& dist, TrapMode mode, int m, int ell);

/// Vertex counts per level split by class, the largest degree among the
/// strict ancestors (0 for the root). A vertex is eligible for k exactly when
/// its class is <= k, so one draw serves every k at once.
struct LevelClassCounts {
  std::vector<std::vector<double>> count;  ///< count[level][class]
  int first_approx = -1;                   ///< first level using the normal approximation, -1 if none
  [[nodiscard]] double eligible(int level, int k) const;
};

/// Generation chain of the class counts down to level n. Binomial splits are
/// exact below 2^53 vertices and normal beyond.
LevelClassCounts level_class_counts(const OffspringDist& dist, int n, CounterRng& rng);

struct LevelSizes {
  std::vector<double> size;  ///< eligible vertices per level 0..n
  int first_approx = -1;
};

/// Level sizes of the vertices whose strict ancestors all have degree <= k,
/// a GW process with offspring Z 1{Z <= k}.
LevelSizes eligible_level_sizes(const OffspringDist& dist, int k, int n, CounterRng& rng);

struct LevelMaxDraw {
  int value = 0;
  bool unbounded = false;  ///< the statistic is a.s. infinite (tail identically 1)
};

/// Maximum of `count` i.i.d. copies of the statistic, by inversion of
/// (1 - tail(ell))^count. Level statistics of an unbounded tree are i.i.d.
/// given the level size, so this replaces growing the tree below level n.
LevelMaxDraw sample_level_max(const OffspringDist& dist, TrapMode mode, int m, double count, CounterRng& rng);

/// Level maxima for an ascending list of k on one level. Each class block is
/// drawn once, so the results are nondecreasing in k as on a real tree.
std::vector<LevelMaxDraw> sample_nested_level_max(const OffspringDist& dist, TrapMode mode, int m,
                                                  const std::vector<double>& class_count, const std::vector<int>& ks,
                                                  CounterRng& rng);

}  // namespace gwbridge
