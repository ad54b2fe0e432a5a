#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gwbridge/bridge.hpp"
#include "gwbridge/experiments.hpp"
#include "gwbridge/offspring.hpp"
#include "gwbridge/oracle_suite.hpp"
#include "gwbridge/oracles.hpp"
#include "gwbridge/sampling.hpp"

namespace py = pybind11;
using namespace gwbridge;

namespace {

py::dict record_dict(const ExperimentRecord& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["replica"] = r.replica;
  d["n"] = r.n;
  d["k_or_L"] = r.k_or_L;
  d["stat"] = r.stat;
  d["value"] = r.value;
  d["flag"] = r.flag;
  d["seed"] = r.seed;
  d["wall_ms"] = r.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gwbridge, m) {
  m.doc() = "Galton-Watson trees, walk bridges and the experiment harness";
  m.attr("CSV_HEADER") = std::string(kCsvHeader);

  py::class_<OffspringDist>(m, "Offspring")
      .def(py::init([](const std::map<int, double>& pmf) { return make_offspring(pmf); }), py::arg("pmf"))
      .def_property_readonly("pmf", &OffspringDist::pmf)
      .def_property_readonly("mean", &OffspringDist::mean)
      .def_property_readonly("extinction_q", &OffspringDist::extinction_q)
      .def_property_readonly("min_positive_support", &OffspringDist::min_positive_support)
      .def_property_readonly("case_tag", [](const OffspringDist& d) { return std::string(to_string(d.case_tag())); })
      .def("__repr__", [](const OffspringDist& d) { return "Offspring(" + offspring_to_json(d).dump() + ")"; });

  m.def("extinction_prob", [](const OffspringDist& d) { return extinction_prob(d); }, py::arg("offspring"));
  m.def("pgf", &pgf_eval, py::arg("offspring"), py::arg("x"));

  py::class_<CounterRng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
      .def("split", &CounterRng::split, py::arg("index"))
      .def("uniform", &CounterRng::uniform);

  py::class_<Tree>(m, "Tree")
      .def_static("path", &make_path, py::arg("length"))
      .def_static("regular", &make_regular, py::arg("degree"), py::arg("depth"))
      .def_static("star", &make_star, py::arg("leaves"))
      .def_static("from_parents",
                  [](const std::vector<Tree::Index>& parents, int cap) { return Tree::from_parents(parents, cap); },
                  py::arg("parents"), py::arg("depth_cap") = -1)
      .def_static("from_string", &Tree::from_string)
      .def("to_string", &Tree::to_string)
      .def("__len__", &Tree::size)
      .def_property_readonly("max_depth", &Tree::max_depth)
      .def_property_readonly("depth_cap", &Tree::depth_cap)
      .def("parents", &Tree::parents)
      .def("depth", &Tree::depth, py::arg("v"))
      .def("degree", &Tree::degree, py::arg("v"));

  m.def(
      "sample_gw",
      [](const OffspringDist& d, int cap, CounterRng& rng) { return sample_gw(d, cap, rng); }, py::arg("offspring"),
      py::arg("depth_cap"), py::arg("rng"));
  m.def(
      "sample_gw_survival",
      [](const OffspringDist& d, int cap, CounterRng& rng) { return sample_gw_survival(d, cap, rng).tree; },
      py::arg("offspring"), py::arg("depth_cap"), py::arg("rng"));

  m.def(
      "bridge_dp",
      [](const Tree& t, long n, std::optional<int> L) {
        const auto r = bridge_dp(t, n, L);
        return py::make_tuple(r.p_return, r.log_p_return);
      },
      py::arg("tree"), py::arg("n"), py::arg("depth_limit") = py::none(),
      "(p_return, log p_return) after 2n steps, optionally killed above depth_limit");
  m.def(
      "return_prob", [](const Tree& t, long steps, std::optional<int> L) { return return_prob<double>(t, steps, L); },
      py::arg("tree"), py::arg("steps"), py::arg("depth_limit") = py::none());

  m.def("z_confinement", &z_confinement, py::arg("n"), py::arg("x"));
  m.def("z_first_return_pmf", &z_first_return_pmf, py::arg("k_max"));

  m.def(
      "default_config",
      [](const std::string& name) { return config_to_json(default_config(experiment_from_string(name))).dump(); },
      py::arg("experiment"), "Default config as a JSON string");
  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir) {
        const auto c = config_from_json(nlohmann::json::parse(config_json));
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = run_experiment(c);
          if (!out_dir.empty()) write_outputs(c, out, out_dir);
        }
        py::list rows;
        for (const auto& r : out.records) rows.append(record_dict(r));
        return py::make_tuple(rows, out.summary.dump(), out.ok);
      },
      py::arg("config_json"), py::arg("out_dir") = "",
      "Runs an experiment; returns (records, summary JSON, ok) and writes CSV + manifest when out_dir is set");
  m.def(
      "run_checks",
      [](std::uint64_t seed) {
        std::vector<CheckResult> res;
        {
          py::gil_scoped_release release;
          res = run_all_checks(seed);
        }
        py::list out;
        for (const auto& r : res) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["residual"] = r.residual;
          d["tolerance"] = r.tolerance;
          d["count"] = r.count;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1);
}
