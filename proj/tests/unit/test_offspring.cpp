#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gwbridge/offspring.hpp"

using namespace gwbridge;

namespace {

// All trees of depth <= d under `law`, as (probability, vertex count) pairs,
// listed one tree at a time.
std::vector<std::pair<double, int>> enumerate_trees(const OffspringDist& law, int d) {
  if (d == 0) return {{1.0, 1}};
  const auto sub = enumerate_trees(law, d - 1);
  std::vector<std::pair<double, int>> out;
  for (int k = 0; k <= law.max_support(); ++k) {
    const double pk = law.prob(k);
    if (pk == 0.0) continue;
    std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
    for (;;) {
      double w = pk;
      int size = 1;
      for (auto i : pick) {
        w *= sub[i].first;
        size += sub[i].second;
      }
      out.emplace_back(w, size);
      std::size_t pos = 0;
      while (pos < pick.size() && ++pick[pos] == sub.size()) pick[pos++] = 0;
      if (pos == pick.size()) break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("make_offspring derives mean, minimal support and case tag") {
  auto a = make_offspring({{1, 0.5}, {2, 0.5}});
  CHECK(a.mean() == doctest::Approx(1.5));
  CHECK(a.min_positive_support() == 1);
  CHECK(a.case_tag() == CaseTag::Case1a);

  auto b = make_offspring({{0, 0.25}, {2, 0.75}});
  CHECK(b.mean() == doctest::Approx(1.5));
  CHECK(b.min_positive_support() == 2);
  CHECK(b.case_tag() == CaseTag::Case1b);

  auto c = make_offspring({{2, 0.5}, {3, 0.5}});
  CHECK(c.mean() == doctest::Approx(2.5));
  CHECK(c.min_positive_support() == 2);
  CHECK(c.case_tag() == CaseTag::Case2);
}

TEST_CASE("make_offspring rejects bad input") {
  CHECK_THROWS_AS(make_offspring({}), std::invalid_argument);
  CHECK_THROWS_AS(make_offspring({{0, -0.1}, {2, 1.1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_offspring({{0, 0.5}, {2, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(make_offspring({{-1, 0.5}, {2, 0.5}}), std::invalid_argument);
  CHECK_NOTHROW(make_offspring({{0, 0.25}, {2, 0.75 + 5e-10}}));
}

TEST_CASE("pgf values") {
  auto b = make_offspring({{0, 0.25}, {2, 0.75}});
  CHECK(pgf_eval(b, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pgf_eval(b, 0.5) == doctest::Approx(0.4375).epsilon(1e-15));
  CHECK(pgf_eval(b, b.extinction_q()) == doctest::Approx(b.extinction_q()).epsilon(1e-12));
  CHECK(pgf_derivative(b, 1.0) == doctest::Approx(1.5));
}

TEST_CASE("extinction probability") {
  // smaller root of 0.75 q^2 - q + 0.25 = 0
  const double root = (1.0 - std::sqrt(1.0 - 4 * 0.75 * 0.25)) / (2 * 0.75);
  auto b = make_offspring({{0, 0.25}, {2, 0.75}});
  CHECK(std::abs(b.extinction_q() - root) < 1e-10);
  CHECK(std::abs(b.extinction_q() - 1.0 / 3.0) < 1e-10);
  CHECK(make_offspring({{2, 0.5}, {3, 0.5}}).extinction_q() == 0.0);
  CHECK(make_offspring({{0, 0.6}, {2, 0.4}}).extinction_q() == 1.0);
  CHECK_THROWS(extinction_prob(b, 0.0));
}

TEST_CASE("dual law") {
  auto b = make_offspring({{0, 0.25}, {2, 0.75}});
  auto d = dual_distribution(b);
  CHECK(d.prob(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(d.prob(2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d.mean() == doctest::Approx(0.5).epsilon(1e-12));

  auto sub = make_offspring({{0, 0.6}, {2, 0.4}});
  CHECK(dual_distribution(sub).pmf() == sub.pmf());
  CHECK_THROWS_AS(dual_distribution(make_offspring({{2, 1.0}})), std::domain_error);

  // h(x) = f(qx)/q pointwise
  for (double x : {0.0, 0.3, 0.9, 1.0, 1.4})
    CHECK(pgf_eval(d, x) == doctest::Approx(pgf_eval(b, b.extinction_q() * x) / b.extinction_q()));
}

TEST_CASE("dual of a supercritical law is subcritical over a random family") {
  CounterRng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::map<int, double> pmf;
    double total = 0.0;
    const int top = 2 + static_cast<int>(rng.below(5));
    for (int k = 0; k <= top; ++k) {
      pmf[k] = rng.uniform();
      total += pmf[k];
    }
    for (auto& [k, p] : pmf) p /= total;
    auto dist = make_offspring(pmf);
    // convexity and monotonicity of the pgf on a grid
    double prev = pgf_eval(dist, 0.0), prev_slope = -1.0;
    for (int i = 1; i <= 20; ++i) {
      const double x = i / 20.0, fx = pgf_eval(dist, x);
      const double slope = (fx - prev) * 20.0;
      CHECK(fx >= prev);
      CHECK(slope >= prev_slope - 1e-12);
      prev = fx;
      prev_slope = slope;
    }
    CHECK(std::abs(pgf_eval(dist, dist.extinction_q()) - dist.extinction_q()) <= 1e-10);
    if (!dist.supercritical()) {
      CHECK(dist.extinction_q() == 1.0);
      continue;
    }
    CHECK(dist.extinction_q() < 1.0);
    // no fixed point below q
    for (int i = 0; i < 50; ++i) {
      const double x = dist.extinction_q() * i / 50.0;
      CHECK(pgf_eval(dist, x) > x);
    }
    CHECK(dual_distribution(dist).mean() < 1.0);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("extinct size generating function") {
  auto b = make_offspring({{0, 0.25}, {2, 0.75}});
  for (int n : {0, 1, 5, 40}) CHECK(extinct_size_gf(b, 1.0, n).value == doctest::Approx(1.0));
  CHECK(extinct_size_gf(b, 1.05, 0).value == 1.05);

  // h(x) = 0.75 + 0.25 x^2: x/h(x) peaks at sqrt(3) with value 2/sqrt(3)
  auto r = extinct_size_gf(b, 1.01, 0);
  CHECK(r.radius_witness == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
  CHECK(r.certified_bound == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.certified);

  double prev = 0.0;
  for (int n = 0; n <= 200; ++n) {
    const double v = extinct_size_gf(b, 1.01, n).value;
    CHECK(v >= prev);
    CHECK(v <= r.radius_witness);
    prev = v;
  }
  // fixed point of F = x h(F): 0.25 x F^2 - F + 0.75 x = 0, smaller root
  const double x = 1.01;
  const double limit = (1.0 - std::sqrt(1.0 - 0.75 * x * x)) / (0.5 * x);
  CHECK(prev == doctest::Approx(limit).epsilon(1e-12));

  CHECK_THROWS_AS(extinct_size_gf(b, 1.5, 200), std::domain_error);
}

TEST_CASE("extinct size gf agrees with enumeration of small trees") {
  for (auto pmf : {std::map<int, double>{{0, 0.25}, {2, 0.75}}, std::map<int, double>{{0, 0.3}, {1, 0.2}, {3, 0.5}}}) {
    auto dist = make_offspring(pmf);
    auto law = dual_distribution(dist);
    for (int n = 0; n <= 4; ++n) {
      if (n == 4 && law.max_support() > 2) continue;
      const auto trees = enumerate_trees(law, n);
      for (double x : {0.5, 1.0, 1.02}) {
        double brute = 0.0;
        for (auto [w, size] : trees) brute += w * std::pow(x, size);
        CHECK(extinct_size_gf(dist, x, n).value == doctest::Approx(brute).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("trap constants") {
  auto a = make_offspring({{1, 0.5}, {2, 0.5}});
  auto tc = trap_constants(a, 2);
  CHECK(tc.rho == 0.5);
  CHECK(tc.sigma == doctest::Approx(std::log(1 / 1.5) / std::log(0.5)));
  CHECK(tc.sigma == doctest::Approx(0.585).epsilon(1e-3));
  CHECK(trap_constants(a, 1).mu_tilde_k == 0.5);

  auto b = make_offspring({{0, 0.25}, {2, 0.75}});
  CHECK(trap_constants(b, 2).rho == doctest::Approx(0.375));
  CHECK_THROWS_AS(trap_constants(make_offspring({{2, 0.5}, {3, 0.5}}), 3), std::domain_error);
  CHECK_THROWS_AS(trap_constants(make_offspring({{0, 0.6}, {2, 0.4}}), 2), std::invalid_argument);

  auto c = make_offspring({{1, 0.2}, {2, 0.3}, {4, 0.1}, {7, 0.4}});
  double prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double v = truncated_mean(c, k);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(prev == doctest::Approx(c.mean()));
}

TEST_CASE("json round trip") {
  const std::string text = R"({"pmf":{"0":0.25,"2":0.75}})";
  auto d = offspring_from_json(nlohmann::json::parse(text));
  CHECK(d.prob(2) == 0.75);
  CHECK(offspring_to_json(d).dump() == text);
  auto e = offspring_from_json(nlohmann::json::parse(R"({"pmf":{"10":0.5,"2":0.5}})"));
  CHECK(offspring_to_json(e).dump() == R"({"pmf":{"2":0.5,"10":0.5}})");
  CHECK_THROWS(offspring_from_json(nlohmann::json::parse(R"({"pmf":{"a":1.0}})")));
  CHECK_THROWS(offspring_from_json(nlohmann::json::parse(R"({"pmf":{"1":"x"}})")));
}
