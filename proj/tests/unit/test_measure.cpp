#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "gwbridge/bridge.hpp"
#include "gwbridge/errors.hpp"
#include "gwbridge/measure.hpp"
#include "gwbridge/sampling.hpp"

using namespace gwbridge;

namespace {

// Number of closed walks of the given length at the root, from integer
// powers of the adjacency matrix.
std::uint64_t closed_walks(const Tree& t, int len) {
  const auto N = static_cast<std::size_t>(t.size());
  std::vector<std::uint64_t> v(N, 0), w(N, 0);
  v[0] = 1;
  for (int s = 0; s < len; ++s) {
    std::fill(w.begin(), w.end(), 0);
    for (std::size_t u = 1; u < N; ++u) {
      const auto p = static_cast<std::size_t>(t.parent(static_cast<Tree::Index>(u)));
      w[p] += v[u];
      w[u] += v[p];
    }
    v.swap(w);
  }
  return v[0];
}

WalkPath down_and_up(const Tree& t, int n) {
  WalkPath p;
  Tree::Index x = 0;
  p.vertices.push_back(x);
  for (int i = 0; i < n; ++i) p.vertices.push_back(x = t.child(x, 0));
  for (int i = 0; i < n; ++i) p.vertices.push_back(x = t.parent(x));
  return p;
}

}  // namespace

TEST_CASE("rn derivative values") {
  for (int m = 1; m <= 5; ++m) {
    auto t = make_regular(m, 5);
    auto one = down_and_up(t, 1);
    CHECK(rn_derivative(t, one, m) == doctest::Approx(2.0 / (m + 1)).epsilon(1e-14));
    for (int n = 1; n <= 4; ++n) {
      const double want = std::pow(m, -n) * std::pow(2.0 * m / (m + 1), 2 * n - 1);
      CHECK(rn_derivative(t, down_and_up(t, n), m) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  auto t = make_regular(2, 3);
  CHECK(rn_derivative(t, down_and_up(t, 1), 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  WalkPath open;
  open.vertices = {0, 1};
  CHECK_THROWS_AS(rn_derivative(t, open, 2), std::invalid_argument);
  open.vertices = {0, 1, 3};
  CHECK_THROWS_AS(rn_derivative(t, open, 2), std::invalid_argument);
  open.vertices = {1, 0, 1};
  CHECK_THROWS_AS(rn_derivative(t, open, 2), std::invalid_argument);
}

TEST_CASE("rn derivative is the ratio of path probabilities") {
  CounterRng rng(5);
  int checked = 0;
  for (int rep = 0; rep < 30; ++rep) {
    auto s = sample_gw_survival(make_offspring({{1, 0.3}, {2, 0.5}, {4, 0.2}}), 12, rng, 1 << 16);
    const long n = 6;
    auto tab = bridge_dp(s.tree, n, std::nullopt, 1).table;
    for (int m = 1; m <= 3; ++m) {
      for (int r = 0; r < 20; ++r) {
        auto p = sample_bridge(s.tree, n, tab, rng);
        const double ratio = path_log_prob(s.tree, p, Kernel::srw()) - path_log_prob(s.tree, p, Kernel::brw(m));
        CHECK(std::abs(log_rn_derivative(s.tree, p, m) - ratio) <= 1e-12);

        long recount = 0;
        for (long j = 0; j < 2 * n; ++j) {
          const Tree::Index x = p.vertices[j];
          recount += x == 0 || s.tree.degree(x) > m;
        }
        CHECK(path_statistics(s.tree, p, m, 0, n).B_n == recount);
        ++checked;
      }
    }
  }
  CHECK(checked == 30 * 3 * 20);
}

TEST_CASE("sandwich constants") {
  auto c = sandwich_constants(2, 10);
  CHECK(c.M == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(c.c1 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(c.c2 == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
  CHECK(c.max_deg_considered == 10);

  auto one = sandwich_constants(1, 7);
  CHECK(one.M == 1.0);
  CHECK(one.c1 == 1.0);
  CHECK(one.c2 == 1.0);

  for (int m = 2; m <= 8; ++m) {
    for (int md = m + 1; md <= m + 12; ++md) {
      auto k = sandwich_constants(m, md);
      CHECK(k.c1 > 0.0);
      CHECK(k.c1 <= k.c2);
      CHECK(k.c2 < 1.0);
      CHECK(k.M < 1.0);
      CHECK(k.c1 == doctest::Approx((m + 1.0) / (2.0 * m)).epsilon(1e-14));
      const double at_next = (2.0 * m + 1) / (m + 2.0) * (m + 1.0) / (2.0 * m);
      CHECK(k.c2 == doctest::Approx(at_next).epsilon(1e-14));
    }
    // with no degree above m only the root is counted by B_n
    CHECK(sandwich_constants(m, m).c2 == sandwich_constants(m, m).c1);
  }
  CHECK_THROWS_AS(sandwich_constants(3, 2), std::invalid_argument);
  CHECK_THROWS_AS(sandwich_constants(0, 2), std::invalid_argument);
}

TEST_CASE("sandwich on regular trees") {
  for (int m = 2; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      auto t = make_regular(m, n + 1);
      auto rep = verify_sandwich(t, n, sandwich_constants(m, m + 1));
      CHECK(rep.ok());
      CHECK(rep.paths_checked == closed_walks(t, 2 * n));
      CHECK(rep.identity_residual <= 1e-12);
      CHECK(rep.min_slack_lower >= -1e-12);
      CHECK(rep.min_slack_upper >= -1e-12);
      CHECK(rep.brw_rn.back() == doctest::Approx(bridge_dp(t, n).p_return).epsilon(1e-12));
    }
  }
  // root -> child -> root with m = 2: M c1 = 2/3 = RN, so the lower bound is tight
  auto rep = verify_sandwich(make_regular(2, 2), 1, sandwich_constants(2, 3));
  CHECK(rep.paths_checked == 2);
  CHECK(std::abs(rep.min_slack_lower) <= 1e-12);
}

TEST_CASE("sandwich on random trees") {
  CounterRng rng(17);
  const auto law = make_offspring({{2, 0.6}, {3, 0.3}, {4, 0.1}});
  for (int n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      auto t = sample_gw(law, n + 1, rng);
      const auto c = sandwich_constants(2, std::max(3, max_degree_within(t, n)));
      auto r = verify_sandwich(t, n, c);
      CHECK(r.ok());
      CHECK(r.paths_checked == closed_walks(t, 2 * n));
      for (std::size_t i = 0; i < r.L.size(); ++i) {
        CHECK(r.lower[i] <= r.srw[i] * (1 + 1e-12));
        CHECK(r.srw[i] <= r.upper[i] * (1 + 1e-12));
        if (i > 0) CHECK(r.srw[i] >= r.srw[i - 1]);
      }
      auto par = verify_sandwich(t, n, c, 100'000'000, 3);
      CHECK(par.paths_checked == r.paths_checked);
      CHECK(par.brw_rn == r.brw_rn);
      CHECK(par.min_slack_lower == r.min_slack_lower);
    }
  }
}

TEST_CASE("sandwich preconditions and budget") {
  CHECK_THROWS_AS(verify_sandwich(make_path(5), 2, sandwich_constants(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(verify_sandwich(make_regular(2, 2), 2, sandwich_constants(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(verify_sandwich(make_regular(4, 3), 2, sandwich_constants(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(verify_sandwich(make_regular(2, 4), 3, sandwich_constants(2, 3), 10), CapacityExceeded);
  auto r = verify_sandwich(make_path(4), 2, sandwich_constants(1, 1));
  CHECK(r.paths_checked == 2);
  CHECK(r.ok());
  auto j = to_json(r);
  CHECK(j.contains("paths_checked"));
  CHECK(j.contains("min_slack_lower"));
  CHECK(j.contains("min_slack_upper"));
  CHECK(j.contains("identity_residual"));
}

TEST_CASE("B_n distribution under BRW") {
  CounterRng rng(23);
  const auto law = make_offspring({{2, 0.5}, {3, 0.5}});
  for (int n = 1; n <= 3; ++n) {
    auto t = sample_gw(law, n + 1, rng);
    const auto c = sandwich_constants(2, 3);
    auto rep = verify_sandwich(t, n, c);
    for (int L = 0; L <= n; ++L) {
      auto dist = brw_bn_distribution(t, n, 2, L);
      CHECK(sandwich_side(dist, n, c.M, c.c1) == doctest::Approx(rep.lower[L]).epsilon(1e-12));
      CHECK(sandwich_side(dist, n, c.M, c.c2) == doctest::Approx(rep.upper[L]).epsilon(1e-12));
    }
    auto plain = brw_bn_distribution(t, n, 2);
    // B_n >= 1 always (the root at time 0)
    CHECK(plain[0] == 0.0);
    double total = 0;
    for (double x : plain) total += x;
    CHECK(total > 0.0);
    CHECK(total <= 1.0);
  }
  CHECK_THROWS_AS(brw_bn_distribution(sample_gw(law, 2, rng), 2, 2), std::invalid_argument);
}
