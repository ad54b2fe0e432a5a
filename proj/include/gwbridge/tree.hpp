#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gwbridge/errors.hpp"

namespace gwbridge {

/// Rooted finite tree in a level-order arena.
///
/// Node 0 is the root. Children of a node are contiguous, and the nodes of
/// each generation occupy one contiguous index range, so "everything within
/// depth L" is a prefix of the arena. When the tree is a depth-capped sample
/// of a larger tree, nodes at depth == depth_cap() were never expanded; they
/// are reported by is_open() and have degree 0 here.
class Tree {
 public:
  using Index = std::int32_t;
  static constexpr Index npos = -1;
  static constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 27;

  Tree();  // single root, complete

  [[nodiscard]] std::size_t size() const { return parent_.size(); }
  [[nodiscard]] static constexpr Index root() { return 0; }
  [[nodiscard]] Index parent(Index v) const { return parent_[v]; }
  [[nodiscard]] int degree(Index v) const { return child_count_[v]; }
  [[nodiscard]] Index first_child(Index v) const { return first_child_[v]; }
  [[nodiscard]] Index child(Index v, int i) const { return first_child_[v] + i; }
  [[nodiscard]] int depth(Index v) const { return depth_[v]; }

  /// Generation at which sampling stopped, or -1 when the tree is complete.
  [[nodiscard]] int depth_cap() const { return depth_cap_; }
  [[nodiscard]] bool complete() const { return depth_cap_ < 0; }
  [[nodiscard]] bool is_open(Index v) const { return depth_cap_ >= 0 && depth_[v] == depth_cap_; }
  [[nodiscard]] bool is_leaf(Index v) const { return child_count_[v] == 0 && !is_open(v); }

  [[nodiscard]] int max_depth() const { return static_cast<int>(level_start_.size()) - 2; }
  [[nodiscard]] Index level_begin(int d) const { return level_start_[d]; }
  [[nodiscard]] Index level_end(int d) const { return level_start_[d + 1]; }
  /// Number of nodes with depth <= d.
  [[nodiscard]] std::size_t prefix_size(int d) const;

  /// SRW neighbour count: children plus parent (the root has no parent).
  [[nodiscard]] int neighbours(Index v) const { return child_count_[v] + (v == 0 ? 0 : 1); }

  /// Parent array in arena order, root entry -1.
  [[nodiscard]] std::vector<Index> parents() const { return parent_; }

  /// Builds from an arbitrary parent array (exactly one entry -1). Nodes are
  /// renumbered into level order, siblings keeping their relative order.
  /// `old_to_new`, if given, receives the renumbering.
  static Tree from_parents(std::span<const Index> parents, int depth_cap = -1,
                           std::vector<Index>* old_to_new = nullptr);

  /// Grows a tree generation by generation. `children(v)` is called once for
  /// each node v with depth < depth_cap (every node when depth_cap < 0), in
  /// arena order, and returns its child count; the children become the next
  /// indices handed out. Throws CapacityExceeded past `node_cap` nodes.
  template <class ChildCount>
  static Tree grow(int depth_cap, ChildCount&& children, std::size_t node_cap = kDefaultNodeCap);

  void write(std::ostream& out) const;
  static Tree read(std::istream& in);
  [[nodiscard]] std::string to_string() const;
  static Tree from_string(const std::string& text);

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.depth_cap_ == b.depth_cap_ && a.parent_ == b.parent_;
  }

 private:
  void reserve_child(Index v, int k, std::size_t node_cap);
  void finish();

  std::vector<Index> parent_;
  std::vector<Index> first_child_;
  std::vector<int> child_count_;
  std::vector<int> depth_;
  std::vector<Index> level_start_;
  int depth_cap_ = -1;
};

template <class ChildCount>
Tree Tree::grow(int depth_cap, ChildCount&& children, std::size_t node_cap) {
  Tree t;
  t.depth_cap_ = depth_cap;
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto idx = static_cast<Index>(v);
    if (depth_cap >= 0 && t.depth_[v] >= depth_cap) continue;
    const int k = children(idx);
    t.reserve_child(idx, k, node_cap);
  }
  t.finish();
  return t;
}

/// Handy fixed shapes.
Tree make_path(int length);                       ///< root plus `length` descendants in a line
Tree make_regular(int degree, int depth);         ///< complete d-ary tree of the given depth
Tree make_star(int leaves);                       ///< root with `leaves` leaf children

}  // namespace gwbridge
