#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "gwbridge/offspring.hpp"
#include "gwbridge/rng.hpp"
#include "gwbridge/trap_stats.hpp"
#include "gwbridge/tree.hpp"

namespace gwbridge {

enum class ExperimentKind { Case1Scaling, Case2Diagnostics, TrapScaling, ExcursionRates, OracleSuite };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);

/// Depth limit as a function of n: ceil(c * n^(1/3)) + offset, ceil(c * n) +
/// offset, or a fixed value.
struct DepthCapPolicy {
  enum class Kind { Cbrt, Linear, Fixed } kind = Kind::Cbrt;
  double c = 6.0;
  int offset = 0;
  int value = 0;
  [[nodiscard]] int resolve(long n) const;
};

/// Kill levels for the Case-2 diagnostic: floor(n^gamma) per gamma, and
/// optionally n and 2n (which cannot bind).
struct LGridPolicy {
  std::vector<double> gammas{0.8};
  bool include_free = true;
  [[nodiscard]] std::vector<int> resolve(long n) const;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::OracleSuite;
  OffspringDist offspring = make_offspring({{1, 0.9}, {2, 0.1}});
  std::vector<long> n_grid;
  int replicas = 1;
  DepthCapPolicy depth_cap;
  LGridPolicy L_grid;
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  int workers = 1;

  std::vector<int> k_grid{kUnbounded};  ///< trap scaling
  std::vector<double> deltas{0.1, 0.01};  ///< excursion rates
  int paths_per_tree = 2000;              ///< excursion rates
  int bootstrap_resamples = 200;
  double saturation_threshold = 0.95;     ///< case 1: min conditional mass below 0.9 L_max
  std::size_t node_cap = Tree::kDefaultNodeCap;
  bool record_timing = false;             ///< wall_ms stays 0 otherwise, so output is reproducible
};

/// Defaults for each experiment; `from_json` starts from these.
ExperimentConfig default_config(ExperimentKind kind);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// One CSV row. replica = -1 marks an aggregate over replicas.
struct ExperimentRecord {
  std::string experiment;
  long replica = 0;
  long n = 0;
  long k_or_L = 0;
  std::string stat;
  double value = 0.0;
  std::string flag;  ///< '|'-joined flags; empty when clean
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

inline constexpr std::string_view kCsvHeader = "experiment,replica,n,k_or_L,stat,value,flag,seed,wall_ms";
std::string to_csv_row(const ExperimentRecord& record);

struct RunOutput {
  std::vector<ExperimentRecord> records;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  bool ok = true;
};

RunOutput run_case1_scaling(const ExperimentConfig& config);
RunOutput run_case2_diagnostics(const ExperimentConfig& config);
RunOutput run_trap_scaling(const ExperimentConfig& config);
RunOutput run_excursion_rates(const ExperimentConfig& config);
RunOutput run_oracle_suite(const ExperimentConfig& config);
RunOutput run_experiment(const ExperimentConfig& config);

/// Writes <experiment>.csv and manifest.json (config echo, summary, git
/// describe, library versions) into `dir`.
void write_outputs(const ExperimentConfig& config, const RunOutput& output, const std::filesystem::path& dir);

/// Runs cell(i) for i < count on `workers` threads and hands each result to
/// `sink` on the calling thread in index order.
void run_cells(std::size_t count, int workers, const std::function<std::vector<ExperimentRecord>(std::size_t)>& cell,
               const std::function<void(std::size_t, std::vector<ExperimentRecord>&&)>& sink);

// statistics helpers

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of y on x. Needs two distinct x values.
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct SlopeInterval {
  double slope = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int resamples = 0;
};

/// Least-squares slope over every (x, y) point, with a percentile interval
/// from resampling whole clusters (replicas) with replacement.
SlopeInterval cluster_bootstrap_slope(const std::vector<std::vector<std::pair<double, double>>>& clusters,
                                      int resamples, CounterRng rng, double level = 0.95);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(double successes, double trials, double z = 1.96);

}  // namespace gwbridge
