#include "gwbridge/sampling.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace gwbridge {

Tree sample_gw(const OffspringDist& dist, int depth_cap, CounterRng& rng, std::size_t node_cap) {
  if (depth_cap < 0) throw std::invalid_argument("sample_gw: depth_cap must be >= 0");
  return Tree::grow(depth_cap, [&](Tree::Index) { return dist.sample(rng); }, node_cap);
}

SurvivalSample sample_gw_survival(const OffspringDist& dist, int depth_cap, CounterRng& rng,
                                  std::size_t node_cap, std::size_t bush_cap) {
  if (!dist.supercritical()) throw std::invalid_argument("sample_gw_survival: law must be supercritical");
  if (depth_cap < 0) throw std::invalid_argument("sample_gw_survival: depth_cap must be >= 0");
  const double q = dist.extinction_q();
  const bool has_bushes = q > 0.0;
  const OffspringDist dual = has_bushes ? dual_distribution(dist) : dist;

  // bush_of[v]: -1 for backbone, else index of the bush root above v.
  std::vector<Tree::Index> bush_of{-1};
  std::vector<std::size_t> bush_size;
  std::vector<int> survive;

  Tree tree = Tree::grow(
      depth_cap,
      [&](Tree::Index v) {
        const Tree::Index bush = bush_of[v];
        if (bush >= 0) {
          const int k = dual.sample(rng);
          if ((bush_size[bush] += k) > bush_cap)
            throw CapacityExceeded("bush exceeds cap of " + std::to_string(bush_cap) + " nodes");
          for (int i = 0; i < k; ++i) bush_of.push_back(bush);
          return k;
        }
        for (;;) {
          const int k = dist.sample(rng);
          survive.assign(static_cast<std::size_t>(k), 0);
          int survivors = 0;
          for (int i = 0; i < k; ++i) {
            survive[i] = !has_bushes || rng.bernoulli(1.0 - q);
            survivors += survive[i];
          }
          if (survivors == 0) continue;
          for (int i = 0; i < k; ++i) {
            if (survive[i]) {
              bush_of.push_back(-1);
            } else {
              bush_of.push_back(static_cast<Tree::Index>(bush_size.size()));
              bush_size.push_back(1);
            }
          }
          return k;
        }
      },
      node_cap);

  std::vector<std::uint8_t> flags(tree.size());
  for (std::size_t v = 0; v < tree.size(); ++v) flags[v] = bush_of[v] < 0;
  BackboneMarks marks = marks_from_flags(tree, std::move(flags));
  return {std::move(tree), std::move(marks)};
}

SpineSample sample_spine(const OffspringDist& dist, int n, CounterRng& rng, SpineLaw law, int depth_cap,
                         std::size_t node_cap) {
  if (dist.p_zero() > 0.0) throw std::invalid_argument("sample_spine: law must have P(Z=0) = 0");
  if (n < 1) throw std::invalid_argument("sample_spine: n must be >= 1");
  const int cap = std::max(depth_cap, n);

  std::map<int, double> biased;
  for (int k = 1; k <= dist.max_support(); ++k)
    if (dist.prob(k) > 0.0) biased[k] = k * dist.prob(k) / dist.mean();
  const OffspringDist spine_law = law == SpineLaw::SizeBiased ? make_offspring(biased) : dist;

  std::vector<std::uint8_t> on_spine{1};
  std::vector<Tree::Index> spine{0};
  std::vector<int> depth{0};
  Tree tree = Tree::grow(
      cap,
      [&](Tree::Index v) {
        const bool s = on_spine[v] && depth[v] < n;
        const int k = s ? spine_law.sample(rng) : dist.sample(rng);
        const int pick = s ? static_cast<int>(rng.below(static_cast<std::uint64_t>(k))) : -1;
        const auto first = static_cast<Tree::Index>(on_spine.size());
        for (int i = 0; i < k; ++i) {
          on_spine.push_back(i == pick);
          depth.push_back(depth[v] + 1);
        }
        if (pick >= 0) spine.push_back(first + pick);
        return k;
      },
      node_cap);
  return {std::move(tree), std::move(spine)};
}

}  // namespace gwbridge
