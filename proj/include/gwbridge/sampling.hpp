#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gwbridge/backbone.hpp"
#include "gwbridge/offspring.hpp"
#include "gwbridge/rng.hpp"
#include "gwbridge/tree.hpp"

namespace gwbridge {

/// Plain GW tree grown to `depth_cap` generations; nodes on the last
/// generation stay unexpanded.
Tree sample_gw(const OffspringDist& dist, int depth_cap, CounterRng& rng,
               std::size_t node_cap = Tree::kDefaultNodeCap);

struct SurvivalSample {
  Tree tree;
  BackboneMarks marks;
};

/// GW tree conditioned on non-extinction, built from the backbone/bush
/// decomposition. Backbone vertices draw Z, keep each child as a survivor
/// with probability 1-q and redraw until at least one survives; the other
/// children root independent trees of the extinction-conditioned law. A
/// single bush larger than `bush_cap` nodes throws CapacityExceeded.
SurvivalSample sample_gw_survival(const OffspringDist& dist, int depth_cap, CounterRng& rng,
                                  std::size_t node_cap = Tree::kDefaultNodeCap,
                                  std::size_t bush_cap = std::size_t{1} << 22);

enum class SpineLaw {
  UniformDescent,  ///< spine vertices draw Z, then one child is chosen uniformly
  SizeBiased,      ///< spine vertices draw the size-biased law k p_k / mu
};

struct SpineSample {
  Tree tree;
  std::vector<Tree::Index> spine;  ///< v_0 = root, ..., v_n
};

/// Tree with a distinguished non-backtracking path of length n from the root.
/// Off-spine vertices grow as plain GW down to max(depth_cap, n).
SpineSample sample_spine(const OffspringDist& dist, int n, CounterRng& rng,
                         SpineLaw law = SpineLaw::UniformDescent, int depth_cap = -1,
                         std::size_t node_cap = Tree::kDefaultNodeCap);

}  // namespace gwbridge
