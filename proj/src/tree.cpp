#include "gwbridge/tree.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gwbridge {

Tree::Tree() : parent_{npos}, first_child_{npos}, child_count_{0}, depth_{0} { finish(); }

std::size_t Tree::prefix_size(int d) const {
  if (d < 0) return 0;
  if (d > max_depth()) return size();
  return static_cast<std::size_t>(level_start_[d + 1]);
}

void Tree::reserve_child(Index v, int k, std::size_t node_cap) {
  if (k < 0) throw std::invalid_argument("Tree::grow: negative child count");
  if (k == 0) return;
  if (size() + static_cast<std::size_t>(k) > node_cap)
    throw CapacityExceeded("tree exceeds node cap of " + std::to_string(node_cap));
  first_child_[v] = static_cast<Index>(size());
  child_count_[v] = k;
  const int d = depth_[v] + 1;
  for (int i = 0; i < k; ++i) {
    parent_.push_back(v);
    first_child_.push_back(npos);
    child_count_.push_back(0);
    depth_.push_back(d);
  }
}

void Tree::finish() {
  level_start_.clear();
  int d = -1;
  for (std::size_t v = 0; v < size(); ++v) {
    while (depth_[v] > d) {
      level_start_.push_back(static_cast<Index>(v));
      ++d;
    }
  }
  level_start_.push_back(static_cast<Index>(size()));
}

Tree Tree::from_parents(std::span<const Index> parents, int depth_cap, std::vector<Index>* old_to_new) {
  const std::size_t n = parents.size();
  if (n == 0) throw std::invalid_argument("from_parents: empty parent array");
  Index root = npos;
  std::vector<std::vector<Index>> kids(n);
  for (std::size_t v = 0; v < n; ++v) {
    const Index p = parents[v];
    if (p == npos) {
      if (root != npos) throw std::invalid_argument("from_parents: more than one root");
      root = static_cast<Index>(v);
    } else {
      if (p < 0 || static_cast<std::size_t>(p) >= n)
        throw std::invalid_argument("from_parents: parent index out of range");
      kids[p].push_back(static_cast<Index>(v));
    }
  }
  if (root == npos) throw std::invalid_argument("from_parents: no root");

  std::vector<Index> order{root};
  std::vector<Index> renum(n, npos);
  renum[root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Index c : kids[order[i]]) {
      renum[c] = static_cast<Index>(order.size());
      order.push_back(c);
    }
  }
  if (order.size() != n) throw std::invalid_argument("from_parents: parent array has a cycle");

  std::size_t cursor = 0;
  Tree t = grow(-1, [&](Index) { return static_cast<int>(kids[order[cursor++]].size()); }, n);
  if (depth_cap >= 0) {
    if (t.max_depth() > depth_cap) throw std::invalid_argument("from_parents: node deeper than depth_cap");
    for (std::size_t v = 0; v < t.size(); ++v)
      if (t.depth_[v] == depth_cap && t.child_count_[v] != 0)
        throw std::invalid_argument("from_parents: node at depth_cap has children");
    t.depth_cap_ = depth_cap;
  }
  if (old_to_new) *old_to_new = std::move(renum);
  return t;
}

void Tree::write(std::ostream& out) const {
  out << size() << ' ' << depth_cap_ << '\n';
  for (Index p : parent_) out << p << '\n';
}

Tree Tree::read(std::istream& in) {
  std::size_t n = 0;
  int cap = 0;
  if (!(in >> n >> cap)) throw std::invalid_argument("Tree::read: bad header");
  std::vector<Index> parents(n);
  for (auto& p : parents)
    if (!(in >> p)) throw std::invalid_argument("Tree::read: truncated parent list");
  return from_parents(parents, cap);
}

std::string Tree::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

Tree Tree::from_string(const std::string& text) {
  std::istringstream is(text);
  return read(is);
}

Tree make_path(int length) {
  if (length < 0) throw std::invalid_argument("make_path: negative length");
  return Tree::grow(-1, [&](Tree::Index v) { return v < length ? 1 : 0; });
}

Tree make_regular(int degree, int depth) {
  if (degree < 1 || depth < 0) throw std::invalid_argument("make_regular: bad shape");
  std::vector<int> level_of{0};
  return Tree::grow(-1, [&](Tree::Index v) {
    const int d = level_of[v];
    const int k = d < depth ? degree : 0;
    for (int i = 0; i < k; ++i) level_of.push_back(d + 1);
    return k;
  });
}

Tree make_star(int leaves) {
  if (leaves < 0) throw std::invalid_argument("make_star: negative leaf count");
  return Tree::grow(-1, [&](Tree::Index v) { return v == 0 ? leaves : 0; });
}

}  // namespace gwbridge
