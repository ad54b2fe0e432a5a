#include "gwbridge/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gwbridge {

std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::Case1a: return "Case1a";
    case CaseTag::Case1b: return "Case1b";
    case CaseTag::Case2: return "Case2";
  }
  return "?";
}

int OffspringDist::sample(CounterRng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return max_support();
  return static_cast<int>(it - cdf_.begin());
}

OffspringDist make_offspring(const std::map<int, double>& pmf) {
  if (pmf.empty()) throw std::invalid_argument("offspring pmf is empty");
  double total = 0.0;
  int top = 0;
  for (const auto& [k, p] : pmf) {
    if (k < 0) throw std::invalid_argument("offspring pmf has a negative child count");
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("offspring pmf has negative or non-finite mass at k=" + std::to_string(k));
    total += p;
    if (p > 0.0) top = std::max(top, k);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("offspring pmf sums to " + std::to_string(total) + ", not 1");

  OffspringDist d;
  d.listed_ = pmf;
  d.pmf_.assign(static_cast<std::size_t>(top) + 1, 0.0);
  const double scale = std::abs(total - 1.0) > 1e-12 ? 1.0 / total : 1.0;
  for (const auto& [k, p] : pmf)
    if (k <= top) d.pmf_[static_cast<std::size_t>(k)] = p * scale;

  d.cdf_.resize(d.pmf_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < d.pmf_.size(); ++k) {
    acc += d.pmf_[k];
    d.cdf_[k] = acc;
    d.mean_ += static_cast<double>(k) * d.pmf_[k];
  }
  d.cdf_.back() = 1.0;

  d.min_support_m_ = 0;
  for (std::size_t k = 1; k < d.pmf_.size(); ++k) {
    if (d.pmf_[k] > 0.0) {
      d.min_support_m_ = static_cast<int>(k);
      break;
    }
  }
  if (d.prob(0) > 0.0)
    d.tag_ = CaseTag::Case1b;
  else if (d.prob(1) > 0.0)
    d.tag_ = CaseTag::Case1a;
  else
    d.tag_ = CaseTag::Case2;

  d.q_ = extinction_prob(d);
  return d;
}

double pgf_eval(const OffspringDist& dist, double x) {
  const auto& p = dist.pmf();
  double acc = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
  return acc;
}

double pgf_derivative(const OffspringDist& dist, double x) {
  const auto& p = dist.pmf();
  double acc = 0.0;
  for (std::size_t k = p.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * p[k];
  return acc;
}

double extinction_prob(const OffspringDist& dist, double tol, long max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("extinction_prob: tol must be positive");
  if (dist.p_zero() == 0.0) return 0.0;
  // Within rounding of criticality the iteration crawls at rate 1/n; q is 1 there.
  if (dist.mean() <= 1.0 + 1e-12) return 1.0;
  // Monotone increasing iterates converge to the smallest root from below.
  double x = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    const double next = pgf_eval(dist, x);
    if (std::abs(next - x) < tol) {
      // Polish with Newton on f(x) - x, which is well conditioned away from criticality.
      double y = next;
      for (int i = 0; i < 8; ++i) {
        const double g = pgf_eval(dist, y) - y;
        const double dg = pgf_derivative(dist, y) - 1.0;
        if (dg == 0.0) break;
        const double step = g / dg;
        y -= step;
        if (std::abs(step) < 1e-16) break;
      }
      return (y >= 0.0 && y < 1.0 && std::abs(y - next) < 1e-6) ? y : next;
    }
    x = next;
  }
  throw std::runtime_error("extinction_prob: no convergence within iteration cap");
}

OffspringDist dual_distribution(const OffspringDist& dist) {
  const double q = dist.extinction_q();
  if (q <= 0.0) throw std::domain_error("dual_distribution: extinction probability is 0");
  if (q >= 1.0) return dist;
  std::map<int, double> pmf;
  double total = 0.0;
  for (int k = 0; k <= dist.max_support(); ++k) {
    const double pk = dist.prob(k);
    if (pk == 0.0) continue;
    pmf[k] = pk * std::pow(q, k - 1);
    total += pmf[k];
  }
  // q is a root of f(x) = x only to ~1e-15, so renormalise the residue away.
  for (auto& [k, p] : pmf) p /= total;
  return make_offspring(pmf);
}

namespace {

// Maximiser of x / h(x) on (1, inf). Its derivative has the sign of
// g(x) = h(x) - x h'(x), and g' = -x h'' <= 0, so the stationary point is the
// unique root of g; bisecting g is far sharper than searching the flat peak.
double radius_witness(const OffspringDist& law) {
  bool has_two = false;
  for (int k = 2; k <= law.max_support(); ++k) has_two |= law.prob(k) > 0.0;
  if (!has_two) return std::numeric_limits<double>::infinity();
  auto g = [&](double x) { return pgf_eval(law, x) - x * pgf_derivative(law, x); };
  double lo = 1.0, hi = 2.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ExtinctSizeGf extinct_size_gf(const OffspringDist& dist, double x, int n_gens) {
  if (!(x >= 0.0)) throw std::invalid_argument("extinct_size_gf: x must be non-negative");
  if (n_gens < 0) throw std::invalid_argument("extinct_size_gf: n_gens must be non-negative");
  const OffspringDist law = dual_distribution(dist);

  ExtinctSizeGf out;
  out.radius_witness = radius_witness(law);
  if (std::isinf(out.radius_witness)) {
    // h is affine: x / h(x) increases to 1 / p'_1.
    const double p1 = law.prob(1);
    out.certified_bound = p1 > 0.0 ? 1.0 / p1 : std::numeric_limits<double>::infinity();
  } else {
    out.certified_bound = out.radius_witness / pgf_eval(law, out.radius_witness);
  }
  out.certified = x < out.certified_bound;

  double f = x;
  for (int n = 0; n < n_gens; ++n) {
    f = x * pgf_eval(law, f);
    if (!out.certified && x > 1.0 && f > out.radius_witness)
      throw std::domain_error("extinct_size_gf: iterate left the certified radius (divergence)");
  }
  out.value = f;
  return out;
}

double truncated_mean(const OffspringDist& dist, int k) {
  double acc = 0.0;
  for (int j = 1; j <= std::min(k, dist.max_support()); ++j) acc += j * dist.prob(j);
  return acc;
}

TrapConstants trap_constants(const OffspringDist& dist, int k) {
  if (!(dist.mean() > 1.0)) throw std::invalid_argument("trap_constants: law must be supercritical");
  const int m = dist.min_positive_support();
  if (k < m) throw std::invalid_argument("trap_constants: k must be at least the minimal positive support");
  TrapConstants tc;
  tc.k = k;
  switch (dist.case_tag()) {
    case CaseTag::Case1a:
      tc.rho = dist.prob(1);
      break;
    case CaseTag::Case1b:
    case CaseTag::Case2:
      tc.rho = dist.prob(m) * m * std::pow(dist.p_zero(), m - 1);
      break;
  }
  if (tc.rho <= 0.0) throw std::domain_error("trap_constants: rho = 0, no traps under this law");
  if (tc.rho >= 1.0) throw std::invalid_argument("trap_constants: rho must be below 1");
  tc.sigma = std::log(1.0 / dist.mean()) / std::log(tc.rho);
  tc.mu_tilde_k = truncated_mean(dist, k);
  return tc;
}

OffspringDist offspring_from_json(const nlohmann::json& j) {
  const auto& pmf_json = j.contains("pmf") ? j.at("pmf") : j;
  if (!pmf_json.is_object()) throw std::invalid_argument("offspring JSON: expected an object of k -> p");
  std::map<int, double> pmf;
  for (const auto& [key, value] : pmf_json.items()) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size()) throw std::invalid_argument("offspring JSON: bad key '" + key + "'");
    if (!value.is_number()) throw std::invalid_argument("offspring JSON: non-numeric mass for '" + key + "'");
    pmf[k] = value.get<double>();
  }
  return make_offspring(pmf);
}

nlohmann::ordered_json offspring_to_json(const OffspringDist& dist) {
  nlohmann::ordered_json pmf = nlohmann::ordered_json::object();
  for (const auto& [k, p] : dist.listed_) pmf[std::to_string(k)] = p;
  nlohmann::ordered_json out;
  out["pmf"] = pmf;
  return out;
}

}  // namespace gwbridge
