#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "gwbridge/experiments.hpp"

#ifndef GWBRIDGE_VERSION
#define GWBRIDGE_VERSION "0.0.0"
#endif
#ifndef GWBRIDGE_GIT_DESCRIBE
#define GWBRIDGE_GIT_DESCRIBE "unknown"
#endif

namespace gwbridge {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kNames[] = {
    {ExperimentKind::Case1Scaling, "Case1Scaling"},
    {ExperimentKind::Case2Diagnostics, "Case2Diagnostics"},
    {ExperimentKind::TrapScaling, "TrapScaling"},
    {ExperimentKind::ExcursionRates, "ExcursionRates"},
    {ExperimentKind::OracleSuite, "OracleSuite"},
};

int k_from_json(const nlohmann::json& v) {
  if (v.is_null() || (v.is_string() && (v == "inf" || v == "unbounded"))) return kUnbounded;
  const int k = v.get<int>();
  if (k < 1) throw std::invalid_argument("config: k values must be >= 1");
  return k;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (const auto& [k, s] : kNames)
    if (s == name) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

int DepthCapPolicy::resolve(long n) const {
  switch (kind) {
    case Kind::Cbrt:
      return static_cast<int>(std::ceil(c * std::cbrt(static_cast<double>(n)) - 1e-9)) + offset;
    case Kind::Linear:
      return static_cast<int>(std::ceil(c * static_cast<double>(n) - 1e-9)) + offset;
    case Kind::Fixed:
      return value;
  }
  return value;
}

std::vector<int> LGridPolicy::resolve(long n) const {
  std::vector<int> out;
  for (double g : gammas) out.push_back(static_cast<int>(std::floor(std::pow(static_cast<double>(n), g) + 1e-9)));
  if (include_free) {
    out.push_back(static_cast<int>(n));
    out.push_back(static_cast<int>(2 * n));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Case1Scaling:
      c.offspring = make_offspring({{1, 0.9}, {2, 0.1}});
      c.n_grid = {512, 1024, 2048, 4096, 8192};
      c.replicas = 20;
      c.depth_cap = {DepthCapPolicy::Kind::Cbrt, 6.0, 0, 0};
      break;
    case ExperimentKind::Case2Diagnostics:
      c.offspring = make_offspring({{2, 0.8}, {3, 0.2}});
      c.n_grid = {4, 6, 8};
      c.replicas = 5;
      break;
    case ExperimentKind::TrapScaling:
      c.offspring = make_offspring({{1, 0.5}, {2, 0.5}});
      c.n_grid = {25, 50, 100, 200};
      c.replicas = 100;
      c.k_grid = {1, 2, kUnbounded};
      break;
    case ExperimentKind::ExcursionRates:
      c.offspring = make_offspring({{0, 0.1}, {1, 0.6}, {2, 0.3}});
      c.n_grid = {25, 50, 100, 200};
      c.replicas = 10;
      c.depth_cap = {DepthCapPolicy::Kind::Fixed, 0.0, 0, 60};
      break;
    case ExperimentKind::OracleSuite:
      c.replicas = 1;
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  if (!j.contains("experiment")) throw std::invalid_argument("config: missing 'experiment'");
  ExperimentConfig c = default_config(experiment_from_string(j.at("experiment").get<std::string>()));
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") continue;
    if (key == "offspring") {
      c.offspring = offspring_from_json(v);
    } else if (key == "n_grid") {
      c.n_grid = v.get<std::vector<long>>();
    } else if (key == "replicas") {
      c.replicas = v.get<int>();
    } else if (key == "depth_cap") {
      DepthCapPolicy p;
      const auto kind = v.value("kind", std::string("cbrt"));
      if (kind == "cbrt") p.kind = DepthCapPolicy::Kind::Cbrt;
      else if (kind == "linear") p.kind = DepthCapPolicy::Kind::Linear;
      else if (kind == "fixed") p.kind = DepthCapPolicy::Kind::Fixed;
      else throw std::invalid_argument("config: unknown depth_cap kind '" + kind + "'");
      p.c = v.value("c", p.c);
      p.offset = v.value("offset", 0);
      p.value = v.value("value", 0);
      c.depth_cap = p;
    } else if (key == "L_grid") {
      c.L_grid.gammas = v.value("gammas", c.L_grid.gammas);
      c.L_grid.include_free = v.value("include_free", true);
    } else if (key == "master_seed") {
      c.master_seed = v.get<std::uint64_t>();
    } else if (key == "out_dir") {
      c.out_dir = v.get<std::string>();
    } else if (key == "workers") {
      c.workers = v.get<int>();
    } else if (key == "k_grid") {
      c.k_grid.clear();
      for (const auto& k : v) c.k_grid.push_back(k_from_json(k));
    } else if (key == "deltas") {
      c.deltas = v.get<std::vector<double>>();
    } else if (key == "paths_per_tree") {
      c.paths_per_tree = v.get<int>();
    } else if (key == "bootstrap_resamples") {
      c.bootstrap_resamples = v.get<int>();
    } else if (key == "saturation_threshold") {
      c.saturation_threshold = v.get<double>();
    } else if (key == "node_cap") {
      c.node_cap = v.get<std::size_t>();
    } else if (key == "record_timing") {
      c.record_timing = v.get<bool>();
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!std::is_sorted(c.n_grid.begin(), c.n_grid.end())) throw std::invalid_argument("config: n_grid must be ascending");
  if (c.replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
  if (c.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  std::sort(c.k_grid.begin(), c.k_grid.end());
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["offspring"] = offspring_to_json(c.offspring);
  j["n_grid"] = c.n_grid;
  j["replicas"] = c.replicas;
  nlohmann::ordered_json cap;
  switch (c.depth_cap.kind) {
    case DepthCapPolicy::Kind::Cbrt: cap["kind"] = "cbrt"; break;
    case DepthCapPolicy::Kind::Linear: cap["kind"] = "linear"; break;
    case DepthCapPolicy::Kind::Fixed: cap["kind"] = "fixed"; break;
  }
  cap["c"] = c.depth_cap.c;
  cap["offset"] = c.depth_cap.offset;
  cap["value"] = c.depth_cap.value;
  j["depth_cap"] = cap;
  j["L_grid"] = {{"gammas", c.L_grid.gammas}, {"include_free", c.L_grid.include_free}};
  j["master_seed"] = c.master_seed;
  j["out_dir"] = c.out_dir;
  j["workers"] = c.workers;
  auto ks = nlohmann::ordered_json::array();
  for (int k : c.k_grid) {
    if (k == kUnbounded) ks.push_back("inf");
    else ks.push_back(k);
  }
  j["k_grid"] = ks;
  j["deltas"] = c.deltas;
  j["paths_per_tree"] = c.paths_per_tree;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["saturation_threshold"] = c.saturation_threshold;
  j["node_cap"] = c.node_cap;
  j["record_timing"] = c.record_timing;
  return j;
}

std::string to_csv_row(const ExperimentRecord& r) {
  std::string s = r.experiment;
  s += ',' + std::to_string(r.replica);
  s += ',' + std::to_string(r.n);
  s += ',' + std::to_string(r.k_or_L);
  s += ',' + r.stat;
  s += ',' + format_double(r.value);
  s += ',' + r.flag;
  s += ',' + std::to_string(r.seed);
  s += ',' + format_double(r.wall_ms);
  return s;
}

RunOutput run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::Case1Scaling: return run_case1_scaling(config);
    case ExperimentKind::Case2Diagnostics: return run_case2_diagnostics(config);
    case ExperimentKind::TrapScaling: return run_trap_scaling(config);
    case ExperimentKind::ExcursionRates: return run_excursion_rates(config);
    case ExperimentKind::OracleSuite: return run_oracle_suite(config);
  }
  throw std::logic_error("run_experiment: unhandled kind");
}

void write_outputs(const ExperimentConfig& config, const RunOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string name(to_string(config.experiment));
  {
    std::ofstream csv(dir / (name + ".csv"), std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / (name + ".csv")).string());
    csv << kCsvHeader << '\n';
    for (const auto& r : output.records) csv << to_csv_row(r) << '\n';
  }
  nlohmann::ordered_json m;
  m["experiment"] = name;
  m["config"] = config_to_json(config);
  m["summary"] = output.summary;
  m["ok"] = output.ok;
  m["csv"] = name + ".csv";
  m["records"] = output.records.size();
  m["git_describe"] = GWBRIDGE_GIT_DESCRIBE;
  m["versions"] = {{"gwbridge", GWBRIDGE_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"cplusplus", static_cast<long>(__cplusplus)}};
  // several experiments may share a directory; keep one manifest entry each
  const auto path = dir / "manifest.json";
  nlohmann::ordered_json all = nlohmann::ordered_json::object();
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    try {
      all = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception&) {
      all = nlohmann::ordered_json::object();
    }
    if (!all.is_object() || !all.contains("experiments")) all = nlohmann::ordered_json::object();
  }
  all["experiments"][name] = m;
  std::ofstream out(path, std::ios::binary);
  out << all.dump(2) << '\n';
}

void run_cells(std::size_t count, int workers, const std::function<std::vector<ExperimentRecord>(std::size_t)>& cell,
               const std::function<void(std::size_t, std::vector<ExperimentRecord>&&)>& sink) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) sink(i, cell(i));
    return;
  }
  std::vector<std::optional<std::vector<ExperimentRecord>>> done(count);
  std::vector<std::exception_ptr> errors(count);
  std::vector<char> finished(count, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || abort.load()) return;
      std::vector<ExperimentRecord> out;
      std::exception_ptr err;
      try {
        out = cell(i);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        if (err) errors[i] = err;
        else done[i] = std::move(out);
        finished[i] = 1;
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  const auto nthreads = static_cast<std::size_t>(std::min<long>(workers, static_cast<long>(count)));
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  std::exception_ptr failure;
  for (std::size_t i = 0; i < count && !failure; ++i) {
    std::vector<ExperimentRecord> batch;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return finished[i] != 0; });
      if (errors[i]) {
        failure = errors[i];
        abort = true;
        break;
      }
      batch = std::move(*done[i]);
      done[i].reset();
    }
    sink(i, std::move(batch));
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("least_squares: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

SlopeInterval cluster_bootstrap_slope(const std::vector<std::vector<std::pair<double, double>>>& clusters,
                                      int resamples, CounterRng rng, double level) {
  auto fit = [](const std::vector<const std::vector<std::pair<double, double>>*>& pick) {
    std::vector<double> x, y;
    for (const auto* c : pick)
      for (const auto& [a, b] : *c) {
        x.push_back(a);
        y.push_back(b);
      }
    return least_squares(x, y).slope;
  };
  std::vector<const std::vector<std::pair<double, double>>*> all;
  for (const auto& c : clusters) all.push_back(&c);
  SlopeInterval out;
  out.slope = fit(all);
  std::vector<double> slopes;
  std::vector<const std::vector<std::pair<double, double>>*> pick(clusters.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& p : pick) p = &clusters[rng.below(clusters.size())];
    try {
      slopes.push_back(fit(pick));
    } catch (const std::invalid_argument&) {
      // a resample with a single n value has no slope
    }
  }
  out.resamples = static_cast<int>(slopes.size());
  if (slopes.empty()) {
    out.lo = out.hi = out.slope;
    return out;
  }
  std::sort(slopes.begin(), slopes.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    return i + 1 < slopes.size() ? slopes[i] * (1 - frac) + slopes[i + 1] * frac : slopes[i];
  };
  out.lo = quantile((1.0 - level) / 2);
  out.hi = quantile((1.0 + level) / 2);
  return out;
}

Interval wilson_interval(double successes, double trials, double z) {
  if (trials <= 0.0) return {0.0, 1.0};
  const double p = successes / trials;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / trials;
  const double centre = (p + z2 / (2 * trials)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace gwbridge
