#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "gwbridge/sampling.hpp"
#include "gwbridge/walk.hpp"

using namespace gwbridge;

namespace {

// Two-sample chi-square homogeneity test on integer-valued samples.
double two_sample_p(const std::map<long, long>& a, const std::map<long, long>& b) {
  std::map<long, std::pair<long, long>> cells;
  long na = 0, nb = 0;
  for (auto [k, c] : a) {
    cells[k].first += c;
    na += c;
  }
  for (auto [k, c] : b) {
    cells[k].second += c;
    nb += c;
  }
  // pool sparse cells
  std::vector<std::pair<double, double>> pooled;
  std::pair<double, double> acc{0, 0};
  for (auto& [k, c] : cells) {
    acc.first += c.first;
    acc.second += c.second;
    if (acc.first + acc.second >= 40) {
      pooled.push_back(acc);
      acc = {0, 0};
    }
  }
  if (acc.first + acc.second > 0) {
    if (pooled.empty()) pooled.push_back(acc);
    else {
      pooled.back().first += acc.first;
      pooled.back().second += acc.second;
    }
  }
  double stat = 0.0;
  const double total = static_cast<double>(na + nb);
  for (auto [ca, cb] : pooled) {
    const double row = ca + cb;
    const double ea = row * na / total, eb = row * nb / total;
    stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  if (pooled.size() < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(pooled.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

std::vector<Tree> sample_trees(const OffspringDist& dist, int count, int cap, std::uint64_t seed) {
  std::vector<Tree> out;
  for (int r = 0; r < count; ++r) {
    auto rng = replica_stream(seed, r);
    out.push_back(sample_gw(dist, cap, rng));
  }
  return out;
}

}  // namespace

TEST_CASE("kernels are stochastic and match their definitions") {
  auto dist = make_offspring({{0, 0.2}, {1, 0.3}, {2, 0.3}, {4, 0.2}});
  for (const auto& t : sample_trees(dist, 20, 7, 3)) {
    if (t.size() < 2) continue;
    for (auto kernel : {Kernel::srw(), Kernel::brw(1), Kernel::brw(2), Kernel::brw(3)}) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto v = static_cast<Tree::Index>(i);
        double total = 0.0;
        if (v != 0) total += transition_prob(t, v, t.parent(v), kernel);
        for (int c = 0; c < t.degree(v); ++c) total += transition_prob(t, v, t.child(v, c), kernel);
        if (v == 0 && t.degree(0) == 0) continue;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }
  auto bin = make_regular(2, 3);
  CHECK(transition_prob(bin, 0, 1, Kernel::srw()) == 0.5);
  auto t3 = Tree::from_parents(std::vector<Tree::Index>{-1, 0, 1, 1, 1});
  CHECK(transition_prob(t3, 1, 0, Kernel::brw(2)) == doctest::Approx(0.4));
  CHECK(transition_prob(t3, 1, 2, Kernel::brw(2)) == doctest::Approx(0.2));
  CHECK(transition_prob(t3, 1, 2, Kernel::srw()) == 0.25);
  CHECK(transition_prob(t3, 2, 3, Kernel::srw()) == 0.0);
  // depth-symmetric at degree-m vertices, exactly
  for (int m = 1; m <= 6; ++m) {
    auto reg = make_regular(m, 3);
    const Tree::Index v = reg.child(0, 0);
    CHECK(parent_prob(reg, v, Kernel::brw(m)) == 0.5);
  }
  Tree lone;
  CounterRng rng(1);
  CHECK_THROWS_AS(step_kernel(lone, 0, Kernel::srw(), rng), std::domain_error);
}

TEST_CASE("empirical step frequencies match the kernel") {
  auto t3 = Tree::from_parents(std::vector<Tree::Index>{-1, 0, 1, 1, 1});
  CounterRng rng(8);
  std::map<Tree::Index, int> counts;
  const int reps = 200000;
  for (int r = 0; r < reps; ++r) ++counts[step_kernel(t3, 1, Kernel::brw(2), rng)];
  for (auto [u, c] : counts) {
    const double p = transition_prob(t3, 1, u, Kernel::brw(2));
    CHECK(std::abs(c / double(reps) - p) < 4 * std::sqrt(p * (1 - p) / reps));
  }
}

TEST_CASE("sample_path basics") {
  CounterRng rng(2);
  auto line = make_path(50);
  CHECK(sample_path(line, Kernel::srw(), 0, rng).vertices == std::vector<Tree::Index>{0});
  auto p = sample_path(line, Kernel::srw(), 40, rng);
  auto d = p.depths(line);
  for (std::size_t j = 0; j < d.size(); ++j) CHECK(d[j] % 2 == static_cast<int>(j % 2));
  CHECK(std::isfinite(path_log_prob(line, p, Kernel::srw())));

  auto bin = make_regular(2, 4);
  int back = 0;
  const int reps = 1000000;
  for (int r = 0; r < reps; ++r) {
    Tree::Index v = step_kernel(bin, 0, Kernel::srw(), rng);
    back += step_kernel(bin, v, Kernel::srw(), rng) == 0;
  }
  const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / reps);
  CHECK(std::abs(back / double(reps) - 1.0 / 3) < 3 * sigma);

  CounterRng r2(5);
  auto capped = sample_gw(make_offspring({{1, 1.0}}), 3, r2);
  CHECK(sample_path(capped, Kernel::srw(), 10, r2).cap_touched);
}

TEST_CASE("coupling from the root") {
  CounterRng rng(4);
  auto line = make_path(100);
  // on the half-line the two walks coincide away from the far end
  auto c = couple_to_line(line, 60, FromRoot{}, rng);
  for (std::size_t j = 0; j < c.line.size(); ++j) CHECK(c.line[j] == line.depth(c.tree_path.vertices[j]));

  auto dist = make_offspring({{1, 0.75}, {2, 0.2}, {3, 0.05}});
  for (const auto& t : sample_trees(dist, 10, 40, 12)) {
    for (int r = 0; r < 300; ++r) {
      auto cp = couple_to_line(t, 30, FromRoot{}, rng);
      for (std::size_t j = 0; j < cp.line.size(); ++j) {
        CHECK(cp.line[j] >= 0);
        CHECK(cp.line[j] <= t.depth(cp.tree_path.vertices[j]));
      }
    }
  }
  auto leafy = Tree::from_parents(std::vector<Tree::Index>{-1, 0});
  CHECK_THROWS_AS(couple_to_line(leafy, 5, FromRoot{}, rng), std::domain_error);
}

TEST_CASE("coupled line walk has the reflected SRW marginal") {
  auto dist = make_offspring({{1, 0.7}, {2, 0.2}, {4, 0.1}});
  CounterRng trng(17);
  auto t = sample_gw(dist, 30, trng);
  const long steps = 25;
  const int reps = 100000;
  std::map<long, long> coupled, direct;
  CounterRng rng(18), rng2(19);
  for (int r = 0; r < reps; ++r) {
    ++coupled[couple_to_line(t, steps, FromRoot{}, rng).line.back()];
    long z = 0;
    for (long s = 0; s < steps; ++s) z = z == 0 ? 1 : z + rng2.sign();
    ++direct[z];
  }
  CHECK(two_sample_p(coupled, direct) > 0.001);
}

TEST_CASE("coupling from a vertex") {
  auto dist = make_offspring({{2, 0.6}, {3, 0.4}});
  CounterRng rng(6);
  for (const auto& t : sample_trees(dist, 5, 14, 44)) {
    const Tree::Index v_o = t.child(0, 0);
    Tree::Index v = t.child(t.child(v_o, 1), 0);
    for (int r = 0; r < 200; ++r) {
      auto cp = couple_to_line(t, 60, FromVertex{v, v_o}, rng);
      for (std::size_t j = 0; j < cp.line.size(); ++j) {
        const Tree::Index u = cp.tree_path.vertices[j];
        // graph distance u <-> v
        Tree::Index a = u, b = v;
        int d = 0;
        while (a != b) {
          if (t.depth(a) >= t.depth(b)) a = t.parent(a);
          else b = t.parent(b);
          ++d;
        }
        CHECK(std::labs(cp.line[j]) <= d);
        if (u == v) CHECK(cp.line[j] == 0);
        // the trace stays inside T(v_o)
        Tree::Index w = u;
        while (t.depth(w) > t.depth(v_o)) w = t.parent(w);
        CHECK(w == v_o);
      }
    }
  }
}

TEST_CASE("escape probabilities") {
  SUBCASE("single child gives zero") {
    auto line = make_path(10);
    auto b = escape_prob(line, 3, 4);
    CHECK(b.lower == 0.0);
    CHECK(b.upper == 0.0);
    CHECK_THROWS(escape_prob(line, 3, 5));
    CHECK_THROWS(escape_prob(line, 0, 1));
  }
  SUBCASE("finite subtrees give an upper bound of zero") {
    auto t = make_regular(3, 4);
    CHECK(escape_prob(t, 1, t.child(1, 0)).upper == 0.0);
  }
  SUBCASE("binary tree converges to 1/6") {
    const EscapeBoundary boundary{certified_escape_floor(2), 1.0};
    auto sph = escape_prob_spherical(std::vector<int>(30, 2), 1, boundary);
    CHECK(sph.lower <= 1.0 / 6 + 1e-15);
    CHECK(sph.upper >= 1.0 / 6 - 1e-15);
    CHECK(sph.width() < 1e-6);

    CounterRng rng(1);
    auto t = sample_gw(make_offspring({{2, 1.0}}), 16, rng);
    auto gen = escape_prob(t, 1, t.child(1, 0), boundary);
    auto ref = escape_prob_spherical(std::vector<int>(16, 2), 1, boundary);
    CHECK(gen.lower == doctest::Approx(ref.lower).epsilon(1e-14));
    CHECK(gen.upper == doctest::Approx(ref.upper).epsilon(1e-14));
  }
  SUBCASE("brackets nest as the cap grows") {
    auto dist = make_offspring({{1, 0.3}, {2, 0.4}, {3, 0.3}});
    CounterRng rng(9);
    auto big = sample_gw(dist, 14, rng);
    double prev_lo = -1, prev_hi = 2;
    for (int cap = 4; cap <= 14; ++cap) {
      // restrict the big tree to depth <= cap
      auto parents = big.parents();
      parents.resize(big.prefix_size(cap));
      auto t = Tree::from_parents(parents, cap);
      const Tree::Index v = t.child(0, 0);
      if (t.degree(v) < 1) break;
      const EscapeBoundary boundary{0.1, 1.0};
      auto b = escape_prob(t, v, t.child(v, 0), boundary);
      CHECK(b.lower >= prev_lo - 1e-15);
      CHECK(b.upper <= prev_hi + 1e-15);
      CHECK(b.lower <= b.upper);
      prev_lo = b.lower;
      prev_hi = b.upper;
    }
  }
}

TEST_CASE("N_p counts") {
  auto line = make_path(12);
  CHECK(n_p_count(line, 10, 0.01) == 0);
  CounterRng rng(1);
  auto t = sample_gw(make_offspring({{2, 1.0}}), 18, rng);
  const EscapeBoundary boundary{certified_escape_floor(2), 1.0};
  for (int d = 1; d <= 8; ++d) {
    const Tree::Index v = t.level_begin(d);
    CHECK(n_p_count(t, v, 1.0 / 7, boundary) == d - 1);
    CHECK(n_p_count(t, v, 1.0, boundary) == 0);
  }
}

TEST_CASE("backbone observables") {
  SUBCASE("hand trace") {
    // root(0) - a(1) - b(2) - c(3, cap), leaf(4) under a
    auto t = Tree::from_parents(std::vector<Tree::Index>{-1, 0, 1, 2, 1}, 3);
    auto marks = backbone_decompose(t);
    const Tree::Index a = t.child(0, 0);
    Tree::Index leaf = Tree::npos, b = Tree::npos;
    for (int c = 0; c < t.degree(a); ++c) (t.is_leaf(t.child(a, c)) ? leaf : b) = t.child(a, c);
    WalkPath p;
    p.vertices = {0, a, leaf, a, b};
    auto obs = backbone_observe(t, marks, p, 1);
    CHECK(obs.N == std::vector<long>{0, 1, 3, 4});
    CHECK(obs.Y == std::vector<Tree::Index>{0, a, a, b});
    CHECK(obs.t_n == 2);
    CHECK(obs.S[1] == 1.0);       // r(root) = 1/1
    CHECK(obs.S[2] == 3.0);       // r(a) = |{a, leaf}| / 1
    CHECK(obs.W.back() == 1);     // only the root is in V~
  }
  SUBCASE("no bushes: Y is X") {
    CounterRng rng(3);
    auto t = sample_gw(make_offspring({{2, 1.0}}), 10, rng);
    auto marks = backbone_decompose(t);
    auto p = sample_path(t, Kernel::srw(), 8, rng);
    auto obs = backbone_observe(t, marks, p, 4);
    CHECK(obs.Y == p.vertices);
    for (std::size_t j = 0; j < obs.N.size(); ++j) CHECK(obs.N[j] == static_cast<long>(j));
    for (std::size_t i = 0; i < obs.Y.size(); ++i) CHECK(obs.S[i + 1] - obs.S[i] == 0.5);
  }
  SUBCASE("identities on sampled paths") {
    auto dist = make_offspring({{0, 0.2}, {1, 0.3}, {2, 0.3}, {3, 0.2}});
    for (int r = 0; r < 30; ++r) {
      auto rng = replica_stream(71, r);
      auto s = sample_gw_survival(dist, 30, rng);
      auto p = sample_path(s.tree, Kernel::srw(), 200, rng);
      auto obs = backbone_observe(s.tree, s.marks, p, 50);
      for (std::size_t j = 0; j < obs.Y.size(); ++j) {
        CHECK(obs.Phi[j] + obs.PhiPrime[j] == s.tree.depth(obs.Y[j]));
        CHECK(obs.W[j] <= static_cast<long>(j));
        if (j > 0) CHECK(obs.N[j] > obs.N[j - 1]);
      }
    }
  }
}

TEST_CASE("path statistics") {
  auto star = make_star(4);
  CounterRng rng(2);
  auto p = sample_path(star, Kernel::srw(), 20, rng);
  auto s = path_statistics(star, p, 1, 0, 10);
  CHECK(s.max_disp == 1);
  CHECK(s.returned_at_2n);

  auto reg = make_regular(3, 8);
  auto q = sample_path(reg, Kernel::srw(), 40, rng);
  auto st = path_statistics(reg, q, 3, 0, 20);
  long root_visits = 0;
  for (int j = 0; j < 40; ++j) root_visits += q.vertices[j] == 0;
  CHECK(st.B_n == root_visits);
  CHECK(st.B_n <= 40);
}
