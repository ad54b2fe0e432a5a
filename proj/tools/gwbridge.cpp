#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gwbridge/experiments.hpp"
#include "gwbridge/oracle_suite.hpp"

using namespace gwbridge;

namespace {

int cmd_run(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<int> workers, bool timing) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "gwbridge: cannot open " << config_path << '\n';
    return 2;
  }
  ExperimentConfig config = config_from_json(nlohmann::json::parse(in));
  if (seed) config.master_seed = *seed;
  if (workers) config.workers = *workers;
  if (timing) config.record_timing = true;
  if (!out.empty()) config.out_dir = out;
  const RunOutput result = run_experiment(config);
  write_outputs(config, result, config.out_dir);
  std::cout << to_string(config.experiment) << ": " << result.records.size() << " records -> " << config.out_dir
            << '\n';
  std::cout << result.summary.dump(2) << '\n';
  return result.ok ? 0 : 1;
}

int cmd_verify(std::uint64_t seed, const std::string& out) {
  ExperimentConfig config = default_config(ExperimentKind::OracleSuite);
  config.master_seed = seed;
  const RunOutput result = run_oracle_suite(config);
  for (const auto& c : result.summary["checks"]) {
    std::printf("%-26s %s  residual %.6g (tol %.3g, n=%ld)  %s\n", c["name"].get<std::string>().c_str(),
                c["passed"].get<bool>() ? "PASS" : "FAIL", c["residual"].get<double>(), c["tolerance"].get<double>(),
                c["count"].get<long>(), c["detail"].get<std::string>().c_str());
  }
  if (!out.empty()) write_outputs(config, result, out);
  return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walk bridges on Galton-Watson trees"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool timing = false;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (overrides out_dir)");
  run->add_option("--seed", seed, "Master seed (overrides master_seed)");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--record-timing", timing, "Fill the wall_ms column");

  auto* verify = app.add_subcommand("verify", "Run the oracle suite; nonzero exit on any failure");
  std::uint64_t verify_seed = 1;
  std::string verify_out;
  verify->add_option("--seed", verify_seed, "Seed for the randomized checks");
  verify->add_option("--out", verify_out, "Also write OracleSuite.csv and manifest.json here");

  auto* defaults = app.add_subcommand("defaults", "Print the default config of an experiment");
  std::string kind;
  defaults->add_option("experiment", kind, "Case1Scaling, Case2Diagnostics, TrapScaling, ExcursionRates or OracleSuite")
      ->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, out, seed, workers, timing);
    if (*verify) return cmd_verify(verify_seed, verify_out);
    if (*defaults) {
      std::cout << config_to_json(default_config(experiment_from_string(kind))).dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "gwbridge: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
