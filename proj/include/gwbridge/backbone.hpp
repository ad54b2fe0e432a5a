#pragma once

#include <cstdint>
#include <vector>

#include "gwbridge/tree.hpp"

namespace gwbridge {

/// Backbone/bush split of a tree. Per-node arrays are indexed by arena index;
/// fields that only make sense on one side hold 0 on the other.
struct BackboneMarks {
  bool extinct = false;                  ///< no backbone at all
  std::vector<std::uint8_t> backbone;    ///< 1 = backbone, 0 = bush
  std::vector<int> z_i;                  ///< children in the backbone
  std::vector<int> z_f;                  ///< children in bushes
  std::vector<double> r;                 ///< |T^f(v)| / Z^i(v); NaN for backbone leaves at the cap
  std::vector<std::int64_t> s;           ///< largest bush hanging directly below v
  std::vector<int> dist_to_backbone;     ///< graph distance to the nearest backbone vertex
  std::vector<int> bush_height;          ///< per level: highest finite subtree rooted on that level

  [[nodiscard]] bool is_backbone(Tree::Index v) const { return backbone[v] != 0; }
  /// Vertices that branch inside the backbone, plus the root.
  [[nodiscard]] bool in_v_tilde(Tree::Index v) const { return v == 0 || (backbone[v] && z_i[v] >= 2); }
};

/// Marks v as backbone iff some descendant (or v itself) sits at the depth
/// cap. A tree with no such vertex comes back with `extinct` set and every
/// node marked bush.
BackboneMarks backbone_decompose(const Tree& tree);

/// Fills every derived field from a given backbone indicator. The flagged set
/// must contain the root and be closed under taking parents.
BackboneMarks marks_from_flags(const Tree& tree, std::vector<std::uint8_t> backbone);

}  // namespace gwbridge
