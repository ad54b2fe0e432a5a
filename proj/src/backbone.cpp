#include "gwbridge/backbone.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gwbridge {

BackboneMarks backbone_decompose(const Tree& tree) {
  if (tree.complete()) throw std::invalid_argument("backbone_decompose: tree has no depth cap");
  const std::size_t n = tree.size();
  std::vector<std::uint8_t> reach(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    const auto v = static_cast<Tree::Index>(i);
    if (tree.depth(v) == tree.depth_cap()) {
      reach[i] = 1;
      continue;
    }
    for (int c = 0; c < tree.degree(v); ++c) reach[i] |= reach[tree.child(v, c)];
  }
  if (!reach[0]) {
    BackboneMarks out;
    out.extinct = true;
    out.backbone.assign(n, 0);
    out.z_i.assign(n, 0);
    out.z_f.assign(n, 0);
    out.r.assign(n, 0.0);
    out.s.assign(n, 0);
    out.dist_to_backbone.assign(n, std::numeric_limits<int>::max());
    out.bush_height.assign(static_cast<std::size_t>(tree.depth_cap()) + 1, 0);
    return out;
  }
  return marks_from_flags(tree, std::move(reach));
}

BackboneMarks marks_from_flags(const Tree& tree, std::vector<std::uint8_t> backbone) {
  const std::size_t n = tree.size();
  if (backbone.size() != n) throw std::invalid_argument("marks_from_flags: size mismatch");
  if (!backbone[0]) throw std::invalid_argument("marks_from_flags: root must be backbone");
  for (std::size_t v = 1; v < n; ++v)
    if (backbone[v] && !backbone[tree.parent(static_cast<Tree::Index>(v))])
      throw std::invalid_argument("marks_from_flags: backbone is not closed under parents");

  BackboneMarks out;
  out.backbone = std::move(backbone);
  out.z_i.assign(n, 0);
  out.z_f.assign(n, 0);
  out.r.assign(n, 0.0);
  out.s.assign(n, 0);
  out.dist_to_backbone.assign(n, 0);

  std::vector<std::int64_t> size(n, 1);
  std::vector<int> height(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    const auto v = static_cast<Tree::Index>(i);
    for (int c = 0; c < tree.degree(v); ++c) {
      const Tree::Index u = tree.child(v, c);
      if (out.backbone[u]) {
        ++out.z_i[i];
        continue;
      }
      ++out.z_f[i];
      size[i] += size[u];
      height[i] = std::max(height[i], height[u] + 1);
      out.s[i] = std::max(out.s[i], size[u]);
    }
    if (!out.backbone[i]) {
      out.z_i[i] = 0;
      out.z_f[i] = 0;
      out.s[i] = 0;
    }
  }
  // For backbone v, size[v] now counts v plus its bushes: |T^f(v)|.
  const int levels = tree.complete() ? tree.max_depth() + 1 : tree.depth_cap() + 1;
  out.bush_height.assign(static_cast<std::size_t>(levels), 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (out.backbone[v]) {
      out.r[v] = out.z_i[v] > 0 ? static_cast<double>(size[v]) / out.z_i[v]
                                : std::numeric_limits<double>::quiet_NaN();
      auto& h = out.bush_height[static_cast<std::size_t>(tree.depth(static_cast<Tree::Index>(v)))];
      h = std::max(h, height[v]);
    } else {
      out.dist_to_backbone[v] = out.dist_to_backbone[tree.parent(static_cast<Tree::Index>(v))] + 1;
    }
  }
  return out;
}

}  // namespace gwbridge
