#pragma once

#include <map>
#include <string_view>
#include <vector>

#include "gwbridge/rng.hpp"
#include "json.hpp"

namespace gwbridge {

/// Which regime of the bridge theory an offspring law falls into.
enum class CaseTag {
  Case1a,  ///< P(Z=1) > 0 and P(Z=0) = 0
  Case1b,  ///< P(Z=0) > 0
  Case2,   ///< P(Z>=2) = 1
};

std::string_view to_string(CaseTag tag);

/// Finitely supported offspring law with its derived constants.
///
/// Immutable once built; construct through make_offspring().
class OffspringDist {
 public:
  [[nodiscard]] double prob(int k) const {
    return (k >= 0 && k < static_cast<int>(pmf_.size())) ? pmf_[k] : 0.0;
  }
  [[nodiscard]] const std::vector<double>& pmf() const { return pmf_; }
  [[nodiscard]] int max_support() const { return static_cast<int>(pmf_.size()) - 1; }
  [[nodiscard]] double mean() const { return mean_; }
  /// Smallest k > 0 with positive mass; 0 if the law is a point mass at 0.
  [[nodiscard]] int min_positive_support() const { return min_support_m_; }
  [[nodiscard]] double p_zero() const { return prob(0); }
  [[nodiscard]] double extinction_q() const { return q_; }
  [[nodiscard]] CaseTag case_tag() const { return tag_; }
  [[nodiscard]] bool supercritical() const { return mean_ > 1.0; }

  /// Draw a child count by inversion.
  int sample(CounterRng& rng) const;

 private:
  friend OffspringDist make_offspring(const std::map<int, double>& pmf);
  friend nlohmann::ordered_json offspring_to_json(const OffspringDist& dist);
  std::map<int, double> listed_;  // entries as supplied, for serialization
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  int min_support_m_ = 0;
  double q_ = 1.0;
  CaseTag tag_ = CaseTag::Case1b;
};

/// Validates and builds a distribution. Rejects empty input, negative mass and
/// totals further than 1e-9 from one.
OffspringDist make_offspring(const std::map<int, double>& pmf);

/// Probability generating function sum_k p_k x^k.
double pgf_eval(const OffspringDist& dist, double x);
double pgf_derivative(const OffspringDist& dist, double x);

/// Smallest fixed point of the PGF on [0,1], by iterating x <- f(x) from 0.
double extinction_prob(const OffspringDist& dist, double tol = 1e-12, long max_iter = 1'000'000);

/// Offspring law conditioned on extinction: p'_k = p_k q^(k-1).
OffspringDist dual_distribution(const OffspringDist& dist);

struct ExtinctSizeGf {
  double value = 0.0;            ///< F_n(x)
  double radius_witness = 0.0;   ///< x_o, the maximiser of x / h(x) on (1, inf)
  double certified_bound = 0.0;  ///< x_o / h(x_o); x below this keeps sup_n F_n(x) <= x_o
  bool certified = false;        ///< x < certified_bound
};

/// PGF of the size of the first n generations of a tree grown from the
/// extinction-conditioned law of `dist`: F_0(x) = x, F_n(x) = x h(F_{n-1}(x)).
/// Throws std::domain_error when an uncertified x drives F_n above x_o.
ExtinctSizeGf extinct_size_gf(const OffspringDist& dist, double x, int n_gens);

struct TrapConstants {
  double rho = 0.0;
  double sigma = 0.0;
  int k = 0;
  double mu_tilde_k = 0.0;
};

/// Trap density rho (chosen by case tag), sigma = log(1/mu)/log(rho) and the
/// truncated mean sum_{j=1..k} j P(Z=j).
TrapConstants trap_constants(const OffspringDist& dist, int k);

/// Truncated mean sum_{j=1..k} j P(Z=j); no preconditions.
double truncated_mean(const OffspringDist& dist, int k);

OffspringDist offspring_from_json(const nlohmann::json& j);
nlohmann::ordered_json offspring_to_json(const OffspringDist& dist);

}  // namespace gwbridge
