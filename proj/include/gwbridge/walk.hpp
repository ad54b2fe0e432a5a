#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "gwbridge/backbone.hpp"
#include "gwbridge/rng.hpp"
#include "gwbridge/tree.hpp"

namespace gwbridge {

/// Nearest-neighbour kernel on a tree. SRW is uniform over parent and
/// children. BRW(m) goes to the parent with probability m/(deg+m) and to each
/// child with 1/(deg+m); at the root both pick a uniform child.
struct Kernel {
  enum class Kind { SRW, BRW } kind = Kind::SRW;
  int m = 1;

  static Kernel srw() { return {Kind::SRW, 1}; }
  static Kernel brw(int m);
};

/// One-step transition probability; 0 unless `to` is adjacent to `from`.
/// Unexpanded nodes of a capped tree reflect to their parent.
double transition_prob(const Tree& tree, Tree::Index from, Tree::Index to, const Kernel& kernel);

/// Probability of moving to the parent (0 at the root).
double parent_prob(const Tree& tree, Tree::Index v, const Kernel& kernel);

Tree::Index step_kernel(const Tree& tree, Tree::Index v, const Kernel& kernel, CounterRng& rng);

struct WalkPath {
  std::vector<Tree::Index> vertices;
  Kernel kernel;
  bool cap_touched = false;  ///< some X_j sat at the depth cap

  [[nodiscard]] std::size_t steps() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  [[nodiscard]] std::vector<int> depths(const Tree& tree) const;
};

WalkPath sample_path(const Tree& tree, const Kernel& kernel, long steps, CounterRng& rng,
                     Tree::Index start = Tree::root());

/// Product of one-step probabilities in log space (-inf if some step is impossible).
double path_log_prob(const Tree& tree, const WalkPath& path, const Kernel& kernel);

struct FromRoot {};
/// Observe the walk inside T(v_o) only, started from v, a descendant of v_o
/// (or v_o itself).
struct FromVertex {
  Tree::Index v;
  Tree::Index v_o;
};
using CouplingVariant = std::variant<FromRoot, FromVertex>;

struct CoupledPaths {
  WalkPath tree_path;       ///< X^(1), or its trace inside T(v_o) for FromVertex
  std::vector<long> line;   ///< X^(2)
  bool cap_touched = false;
};

/// Joint sample of a tree walk and a walk on the integers such that the
/// integer walk never exceeds the tree distance (from the root, or from v).
/// FromRoot uses a walk on {0,1,...} reflected at 0; FromVertex a walk on Z
/// compared in absolute value. A true leaf in the relevant subtree throws
/// std::domain_error, as the coupling needs every vertex to have a child.
CoupledPaths couple_to_line(const Tree& tree, long steps, const CouplingVariant& variant, CounterRng& rng);

/// Never-return probabilities beta(u) = P(walk from u never hits parent(u)),
/// computed bottom-up from beta = s / (1 + s), s the sum over children.
/// Unexpanded nodes take the boundary value `beta_cap`; true leaves 0.
std::vector<double> escape_table(const Tree& tree, double beta_cap);

struct EscapeBracket {
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] double width() const { return upper - lower; }
};

/// Boundary values used at the depth cap. `lower_cap` must be a certified
/// lower bound on the escape probability of whatever grows below an
/// unexpanded node; `upper_cap` = 1 is always valid.
struct EscapeBoundary {
  double lower_cap = 0.0;
  double upper_cap = 1.0;
};

/// Floor on the escape probability into a GW subtree of this law: when every
/// vertex has at least m >= 2 children the depth process dominates a walk
/// stepping up with probability m/(m+1), which escapes with probability
/// >= 1 - 1/m. Otherwise 0.
double certified_escape_floor(int min_degree);

/// Bracket on P(X_1 is a child of v other than v', and the walk never comes
/// back to v), for SRW started at v.
EscapeBracket escape_prob(const Tree& tree, Tree::Index v, Tree::Index v_prime,
                          const EscapeBoundary& boundary = {});

/// Same quantity for a spherically symmetric tree given by its level degrees
/// (every vertex at depth k has level_degree[k] children), truncated at
/// depth `cap` = level_degree.size(). `depth` is |v|.
EscapeBracket escape_prob_spherical(const std::vector<int>& level_degree, int depth,
                                    const EscapeBoundary& boundary = {});

/// Number of j in [1, |v|) for which the certified lower escape bound at
/// (v_j, v_{j+1}) along the root-to-v path is at least p.
int n_p_count(const Tree& tree, Tree::Index v, double p, const EscapeBoundary& boundary = {});

struct BackboneObservables {
  std::vector<Tree::Index> Y;   ///< backbone positions X_{N_j}
  std::vector<long> N;          ///< indices of backbone visits
  std::vector<double> S;        ///< S(i) = sum_{t<i} r(Y_t), i = 0..|Y|
  std::vector<long> W;          ///< W(i) = #{j<i : Y_j in V~}, i = 0..|Y|
  std::vector<long> Phi;        ///< net depth change from steps out of V~ complement
  std::vector<long> PhiPrime;   ///< net depth change from steps out of V~
  long t_n = -1;                ///< min{j : N_j > 2n}, -1 if the path is too short
  bool cap_touched = false;
};

BackboneObservables backbone_observe(const Tree& tree, const BackboneMarks& marks, const WalkPath& path, long n);

struct PathStats {
  int max_disp = 0;
  long B_n = 0;                   ///< #{j < 2n : X_j = root or deg(X_j) > m}
  long max_local_time_below = 0;  ///< max visits to a strict descendant of v_o
  bool returned_at_2n = false;
};

PathStats path_statistics(const Tree& tree, const WalkPath& path, int m, Tree::Index v_o, long n);

}  // namespace gwbridge
