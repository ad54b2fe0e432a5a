#include "gwbridge/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace gwbridge {

Kernel Kernel::brw(int m) {
  if (m < 1) throw std::invalid_argument("Kernel::brw: m must be >= 1");
  return {Kind::BRW, m};
}

double parent_prob(const Tree& tree, Tree::Index v, const Kernel& kernel) {
  if (v == Tree::root()) return 0.0;
  if (tree.is_open(v) || tree.degree(v) == 0) return 1.0;
  const int deg = tree.degree(v);
  if (kernel.kind == Kernel::Kind::SRW) return 1.0 / (deg + 1);
  return static_cast<double>(kernel.m) / (deg + kernel.m);
}

double transition_prob(const Tree& tree, Tree::Index from, Tree::Index to, const Kernel& kernel) {
  if (from != Tree::root() && tree.parent(from) == to) return parent_prob(tree, from, kernel);
  if (to == Tree::root() || tree.parent(to) != from) return 0.0;
  const int deg = tree.degree(from);
  if (from == Tree::root()) return 1.0 / deg;
  if (kernel.kind == Kernel::Kind::SRW) return 1.0 / (deg + 1);
  return 1.0 / (deg + kernel.m);
}

Tree::Index step_kernel(const Tree& tree, Tree::Index v, const Kernel& kernel, CounterRng& rng) {
  const int deg = tree.degree(v);
  if (v == Tree::root()) {
    if (deg == 0) throw std::domain_error("step_kernel: isolated root has no move");
    return tree.child(v, static_cast<int>(rng.below(static_cast<std::uint64_t>(deg))));
  }
  if (deg == 0) return tree.parent(v);
  const int parent_weight = kernel.kind == Kernel::Kind::SRW ? 1 : kernel.m;
  const auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(deg + parent_weight)));
  return pick < deg ? tree.child(v, pick) : tree.parent(v);
}

std::vector<int> WalkPath::depths(const Tree& tree) const {
  std::vector<int> out;
  out.reserve(vertices.size());
  for (auto v : vertices) out.push_back(tree.depth(v));
  return out;
}

WalkPath sample_path(const Tree& tree, const Kernel& kernel, long steps, CounterRng& rng, Tree::Index start) {
  if (steps < 0) throw std::invalid_argument("sample_path: negative step count");
  WalkPath path;
  path.kernel = kernel;
  path.vertices.reserve(static_cast<std::size_t>(steps) + 1);
  Tree::Index v = start;
  path.vertices.push_back(v);
  path.cap_touched = tree.is_open(v);
  for (long t = 0; t < steps; ++t) {
    v = step_kernel(tree, v, kernel, rng);
    path.cap_touched |= tree.is_open(v);
    path.vertices.push_back(v);
  }
  return path;
}

double path_log_prob(const Tree& tree, const WalkPath& path, const Kernel& kernel) {
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < path.vertices.size(); ++j) {
    const double p = transition_prob(tree, path.vertices[j], path.vertices[j + 1], kernel);
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(p);
  }
  return acc;
}

namespace {

CoupledPaths couple_from_root(const Tree& tree, long steps, CounterRng& rng) {
  CoupledPaths out;
  out.tree_path.kernel = Kernel::srw();
  out.tree_path.vertices.reserve(static_cast<std::size_t>(steps) + 1);
  out.line.reserve(static_cast<std::size_t>(steps) + 1);
  Tree::Index v = Tree::root();
  long z = 0;
  out.tree_path.vertices.push_back(v);
  out.line.push_back(z);
  for (long t = 0; t < steps; ++t) {
    const long height = tree.depth(v);
    Tree::Index next;
    bool up;
    if (tree.is_open(v)) {
      next = tree.parent(v);
      up = false;
      out.cap_touched = true;
    } else if (tree.degree(v) == 0) {
      throw std::domain_error("couple_to_line: leaf encountered; the tree must be leafless");
    } else {
      next = step_kernel(tree, v, out.tree_path.kernel, rng);
      up = next != Tree::root() && tree.parent(next) == v;
    }
    if (z == 0) {
      z = 1;  // reflection; at the root this is also the coupled move
    } else if (z < height) {
      z += rng.sign();
    } else if (!up) {
      z -= 1;
    } else {
      const int deg = tree.degree(v);
      z += rng.bernoulli(static_cast<double>(deg + 1) / (2.0 * deg)) ? 1 : -1;
    }
    v = next;
    out.tree_path.vertices.push_back(v);
    out.line.push_back(z);
  }
  out.tree_path.cap_touched = out.cap_touched;
  return out;
}

CoupledPaths couple_from_vertex(const Tree& tree, long steps, Tree::Index v, Tree::Index v_o, CounterRng& rng) {
  // toward[u] for strict ancestors u of v inside T(v_o): the child leading to v
  std::unordered_map<Tree::Index, Tree::Index> toward;
  {
    Tree::Index u = v;
    while (u != v_o) {
      if (u == Tree::root()) throw std::invalid_argument("couple_to_line: v is not a descendant of v_o");
      toward[tree.parent(u)] = u;
      u = tree.parent(u);
    }
  }
  if (v != v_o && tree.degree(v_o) < 2)
    throw std::domain_error("couple_to_line: v_o needs at least two children");

  CoupledPaths out;
  out.tree_path.kernel = Kernel::srw();
  Tree::Index u = v;
  long dist = 0, z = 0;
  out.tree_path.vertices.push_back(u);
  out.line.push_back(z);
  for (long t = 0; t < steps; ++t) {
    const int deg = tree.degree(u);
    Tree::Index next;
    int total, away;
    const auto it = toward.find(u);
    const bool ancestor = it != toward.end();
    if (tree.is_open(u)) {
      next = tree.parent(u);
      total = 1;
      away = 0;
      out.cap_touched = true;
    } else if (deg == 0) {
      throw std::domain_error("couple_to_line: leaf encountered inside T(v_o)");
    } else if (u == v_o) {
      // the parent edge of v_o is collapsed: the trace moves to a uniform child
      next = tree.child(u, static_cast<int>(rng.below(static_cast<std::uint64_t>(deg))));
      total = deg;
      away = ancestor ? deg - 1 : deg;
    } else {
      next = step_kernel(tree, u, out.tree_path.kernel, rng);
      total = deg + 1;
      away = u == v ? deg + 1 : deg;
    }
    const bool is_toward = ancestor ? next == it->second : (u != v && next == tree.parent(u));
    if (z == 0 || std::labs(z) < dist) {
      z += rng.sign();
    } else if (is_toward) {
      z += z > 0 ? -1 : 1;
    } else {
      const bool out_step = rng.bernoulli(static_cast<double>(total) / (2.0 * away));
      z += (z > 0) == out_step ? 1 : -1;
    }
    dist += is_toward ? -1 : 1;
    u = next;
    out.tree_path.vertices.push_back(u);
    out.line.push_back(z);
  }
  out.tree_path.cap_touched = out.cap_touched;
  return out;
}

}  // namespace

CoupledPaths couple_to_line(const Tree& tree, long steps, const CouplingVariant& variant, CounterRng& rng) {
  if (steps < 0) throw std::invalid_argument("couple_to_line: negative step count");
  if (const auto* fv = std::get_if<FromVertex>(&variant)) return couple_from_vertex(tree, steps, fv->v, fv->v_o, rng);
  return couple_from_root(tree, steps, rng);
}

std::vector<double> escape_table(const Tree& tree, double beta_cap) {
  std::vector<double> beta(tree.size(), 0.0);
  for (std::size_t i = tree.size(); i-- > 0;) {
    const auto u = static_cast<Tree::Index>(i);
    if (tree.is_open(u)) {
      beta[i] = beta_cap;
      continue;
    }
    double s = 0.0;
    for (int c = 0; c < tree.degree(u); ++c) s += beta[tree.child(u, c)];
    beta[i] = s / (1.0 + s);
  }
  return beta;
}

double certified_escape_floor(int min_degree) {
  return min_degree >= 2 ? 1.0 - 1.0 / min_degree : 0.0;
}

namespace {

double escape_from(const Tree& tree, const std::vector<double>& beta, Tree::Index v, Tree::Index v_prime) {
  double s = 0.0;
  for (int c = 0; c < tree.degree(v); ++c) {
    const Tree::Index u = tree.child(v, c);
    if (u != v_prime) s += beta[u];
  }
  return s / (tree.degree(v) + 1);
}

}  // namespace

EscapeBracket escape_prob(const Tree& tree, Tree::Index v, Tree::Index v_prime, const EscapeBoundary& boundary) {
  if (v == Tree::root()) throw std::invalid_argument("escape_prob: v must not be the root");
  if (v_prime == Tree::root() || tree.parent(v_prime) != v)
    throw std::invalid_argument("escape_prob: v' is not a child of v");
  const auto lo = escape_table(tree, boundary.lower_cap);
  const auto hi = escape_table(tree, boundary.upper_cap);
  return {escape_from(tree, lo, v, v_prime), escape_from(tree, hi, v, v_prime)};
}

EscapeBracket escape_prob_spherical(const std::vector<int>& level_degree, int depth, const EscapeBoundary& boundary) {
  const int cap = static_cast<int>(level_degree.size());
  if (depth < 1 || depth >= cap) throw std::invalid_argument("escape_prob_spherical: need 1 <= depth < cap");
  auto solve = [&](double beta_cap) {
    double beta = beta_cap;  // at depth cap
    for (int k = cap - 1; k > depth; --k) {
      const double s = level_degree[k] * beta;
      beta = s / (1.0 + s);
    }
    const int d = level_degree[depth];
    return d >= 1 ? (d - 1) * beta / (d + 1) : 0.0;
  };
  return {solve(boundary.lower_cap), solve(boundary.upper_cap)};
}

int n_p_count(const Tree& tree, Tree::Index v, double p, const EscapeBoundary& boundary) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("n_p_count: p must lie in (0, 1]");
  const auto lo = escape_table(tree, boundary.lower_cap);
  int count = 0;
  // path v_0 = root, ..., v_n = v; examine pairs (v_j, v_{j+1}) with 1 <= j < n
  Tree::Index child = v;
  Tree::Index u = v == Tree::root() ? Tree::npos : tree.parent(v);
  while (u != Tree::npos && u != Tree::root()) {
    count += escape_from(tree, lo, u, child) >= p;
    child = u;
    u = tree.parent(u);
  }
  return count;
}

BackboneObservables backbone_observe(const Tree& tree, const BackboneMarks& marks, const WalkPath& path, long n) {
  if (path.vertices.empty() || path.vertices.front() != Tree::root())
    throw std::invalid_argument("backbone_observe: path must start at the root");
  BackboneObservables out;
  out.cap_touched = path.cap_touched;
  for (std::size_t j = 0; j < path.vertices.size(); ++j) {
    const Tree::Index x = path.vertices[j];
    out.cap_touched |= tree.is_open(x);
    if (!marks.is_backbone(x)) continue;
    out.Y.push_back(x);
    out.N.push_back(static_cast<long>(j));
  }
  const std::size_t len = out.Y.size();
  out.S.assign(len + 1, 0.0);
  out.W.assign(len + 1, 0);
  out.Phi.assign(len, 0);
  out.PhiPrime.assign(len, 0);
  for (std::size_t i = 0; i < len; ++i) {
    const Tree::Index y = out.Y[i];
    out.S[i + 1] = out.S[i] + marks.r[y];
    out.W[i + 1] = out.W[i] + (marks.in_v_tilde(y) ? 1 : 0);
    if (i + 1 < len) {
      const long dz = tree.depth(out.Y[i + 1]) - tree.depth(y);
      out.Phi[i + 1] = out.Phi[i] + (marks.in_v_tilde(y) ? 0 : dz);
      out.PhiPrime[i + 1] = out.PhiPrime[i] + (marks.in_v_tilde(y) ? dz : 0);
    }
    if (out.t_n < 0 && out.N[i] > 2 * n) out.t_n = static_cast<long>(i);
  }
  return out;
}

PathStats path_statistics(const Tree& tree, const WalkPath& path, int m, Tree::Index v_o, long n) {
  PathStats out;
  std::unordered_map<Tree::Index, long> visits;
  for (std::size_t j = 0; j < path.vertices.size(); ++j) {
    const Tree::Index x = path.vertices[j];
    out.max_disp = std::max(out.max_disp, tree.depth(x));
    if (static_cast<long>(j) < 2 * n && (x == Tree::root() || tree.degree(x) > m)) ++out.B_n;
    ++visits[x];
  }
  const int base = tree.depth(v_o);
  for (const auto& [x, count] : visits) {
    if (tree.depth(x) <= base) continue;
    Tree::Index u = x;
    while (tree.depth(u) > base) u = tree.parent(u);
    if (u == v_o) out.max_local_time_below = std::max(out.max_local_time_below, count);
  }
  const auto two_n = static_cast<std::size_t>(2 * n);
  out.returned_at_2n = two_n < path.vertices.size() && path.vertices[two_n] == Tree::root();
  return out;
}

}  // namespace gwbridge
