// Copyright 2026 The SFCM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "sfcm/baselines.hpp"
#include "sfcm/cluster.hpp"
#include "sfcm/config.hpp"
#include "sfcm/errors.hpp"
#include "sfcm/harness.hpp"
#include "sfcm/optimizer.hpp"
#include "sfcm/report.hpp"
#include "sfcm/sustain.hpp"
#include "sfcm/workload.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

template <typename T>
std::string repr_objectives(const T &v) {
  std::ostringstream os;
  os << "ObjectiveVector(slo_violation_rate=" << v.slo_violation_rate
     << ", carbon_g=" << v.carbon_g << ", water_l=" << v.water_l << ")";
  return os.str();
}

sfcm::EnvSchedule as_schedule(const py::object &env) {
  if (env.is_none()) return {};
  if (py::isinstance<sfcm::EnvironmentState>(env)) {
    return sfcm::EnvSchedule{{env.cast<sfcm::EnvironmentState>()}};
  }
  return sfcm::EnvSchedule{env.cast<std::vector<sfcm::EnvironmentState>>()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Serverless scheduling simulator with an SLO/carbon/water plan optimizer.";

  auto base = py::register_exception<sfcm::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<sfcm::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<sfcm::SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<sfcm::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<sfcm::CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<sfcm::EvaluationError>(m, "EvaluationError", base.ptr());
  py::register_exception<sfcm::UsageError>(m, "UsageError", base.ptr());

  // workload
  py::class_<sfcm::FunctionSpec>(m, "FunctionSpec")
      .def(py::init<>())
      .def(py::init([](std::string id, double runtime_s, double deadline_s, std::int64_t mem_mb,
                       double cpu_base_cores, double cpu_per_request_cores) {
             return sfcm::FunctionSpec{std::move(id), runtime_s, deadline_s, mem_mb,
                                       cpu_base_cores, cpu_per_request_cores};
           }),
           "id"_a, "runtime_s"_a, "deadline_s"_a, "mem_mb"_a = 256, "cpu_base_cores"_a = 0.25,
           "cpu_per_request_cores"_a = 0.5)
      .def_readwrite("id", &sfcm::FunctionSpec::id)
      .def_readwrite("runtime_s", &sfcm::FunctionSpec::runtime_s)
      .def_readwrite("deadline_s", &sfcm::FunctionSpec::deadline_s)
      .def_readwrite("mem_mb", &sfcm::FunctionSpec::mem_mb)
      .def_readwrite("cpu_base_cores", &sfcm::FunctionSpec::cpu_base_cores)
      .def_readwrite("cpu_per_request_cores", &sfcm::FunctionSpec::cpu_per_request_cores)
      .def(py::self == py::self);

  py::class_<sfcm::EpochWorkload>(m, "EpochWorkload")
      .def(py::init<>())
      .def(py::init([](std::map<std::string, std::int64_t> arrivals, std::size_t epoch_index) {
             return sfcm::EpochWorkload{epoch_index, std::move(arrivals)};
           }),
           "arrivals"_a, "epoch_index"_a = 0)
      .def_readwrite("epoch_index", &sfcm::EpochWorkload::epoch_index)
      .def_readwrite("arrivals", &sfcm::EpochWorkload::arrivals)
      .def("total_arrivals", &sfcm::EpochWorkload::total_arrivals)
      .def("distinct_ids", &sfcm::EpochWorkload::distinct_ids);

  py::class_<sfcm::Trace>(m, "Trace")
      .def(py::init<>())
      .def_readwrite("functions", &sfcm::Trace::functions)
      .def_readwrite("epochs", &sfcm::Trace::epochs)
      .def(py::self == py::self);

  py::class_<sfcm::TraceConfig>(m, "TraceConfig")
      .def(py::init<>())
      .def_readwrite("n_function_ids", &sfcm::TraceConfig::n_function_ids)
      .def_readwrite("epochs", &sfcm::TraceConfig::epochs)
      .def_readwrite("epoch_length_s", &sfcm::TraceConfig::epoch_length_s)
      .def_readwrite("short_fraction", &sfcm::TraceConfig::short_fraction)
      .def_readwrite("min_ids_per_epoch", &sfcm::TraceConfig::min_ids_per_epoch)
      .def_readwrite("max_ids_per_epoch", &sfcm::TraceConfig::max_ids_per_epoch)
      .def_readwrite("arrivals_mean_min", &sfcm::TraceConfig::arrivals_mean_min)
      .def_readwrite("arrivals_mean_max", &sfcm::TraceConfig::arrivals_mean_max)
      .def_readwrite("slack_factor", &sfcm::TraceConfig::slack_factor)
      .def_readwrite("seed", &sfcm::TraceConfig::seed);

  m.def("generate_trace", &sfcm::generate_trace, "config"_a = sfcm::TraceConfig{});
  m.def("ingest_trace",
        py::overload_cast<const std::filesystem::path &, double>(&sfcm::ingest_trace), "dir"_a,
        "epoch_length_s"_a = 900.0);
  m.def("write_trace", &sfcm::write_trace, "trace"_a, "dir"_a, "epoch_length_s"_a = 900.0);

  // cluster
  py::class_<sfcm::NodeSpec>(m, "NodeSpec")
      .def(py::init<>())
      .def_readwrite("cores", &sfcm::NodeSpec::cores)
      .def_readwrite("mem_mb", &sfcm::NodeSpec::mem_mb)
      .def_readwrite("p_idle_w", &sfcm::NodeSpec::p_idle_w)
      .def_readwrite("p_max_w", &sfcm::NodeSpec::p_max_w);
  py::class_<sfcm::OverheadSpec>(m, "OverheadSpec")
      .def(py::init<>())
      .def_readwrite("cold_start_s", &sfcm::OverheadSpec::cold_start_s)
      .def_readwrite("shutdown_s", &sfcm::OverheadSpec::shutdown_s)
      .def_readwrite("startup_energy_j", &sfcm::OverheadSpec::startup_energy_j);
  py::class_<sfcm::ClusterSpec>(m, "ClusterSpec")
      .def(py::init<>())
      .def(py::init([](std::size_t n_nodes) {
             sfcm::ClusterSpec c;
             c.n_nodes = n_nodes;
             return c;
           }),
           "n_nodes"_a)
      .def_readwrite("n_nodes", &sfcm::ClusterSpec::n_nodes)
      .def_readwrite("node", &sfcm::ClusterSpec::node)
      .def_readwrite("overhead", &sfcm::ClusterSpec::overhead);

  py::class_<sfcm::ContainerAlloc>(m, "ContainerAlloc")
      .def(py::init<>())
      .def(py::init([](std::string function_id, std::size_t node_id, int cores,
                       std::int64_t mem_mb, std::int64_t assigned_requests, bool is_new) {
             return sfcm::ContainerAlloc{std::move(function_id), node_id, cores, mem_mb,
                                         assigned_requests, is_new};
           }),
           "function_id"_a, "node_id"_a, "cores"_a, "mem_mb"_a, "assigned_requests"_a,
           "is_new"_a = true)
      .def_readwrite("function_id", &sfcm::ContainerAlloc::function_id)
      .def_readwrite("node_id", &sfcm::ContainerAlloc::node_id)
      .def_readwrite("cores", &sfcm::ContainerAlloc::cores)
      .def_readwrite("mem_mb", &sfcm::ContainerAlloc::mem_mb)
      .def_readwrite("assigned_requests", &sfcm::ContainerAlloc::assigned_requests)
      .def_readwrite("is_new", &sfcm::ContainerAlloc::is_new)
      .def(py::self == py::self);

  py::class_<sfcm::Plan>(m, "Plan")
      .def(py::init<>())
      .def(py::init([](std::vector<sfcm::ContainerAlloc> a) { return sfcm::Plan{std::move(a)}; }),
           "allocations"_a)
      .def_readwrite("allocations", &sfcm::Plan::allocations)
      .def("to_json", &sfcm::plan_to_json)
      .def_static("from_json", [](const std::string &text) { return sfcm::plan_from_json(text); })
      .def("__len__", [](const sfcm::Plan &p) { return p.allocations.size(); })
      .def(py::self == py::self);

  m.def(
      "feasible",
      [](const sfcm::Plan &plan, const sfcm::ClusterSpec &cluster,
         const sfcm::EpochWorkload &workload, const std::vector<sfcm::FunctionSpec> &specs) {
        const auto report = sfcm::feasible(plan, cluster, workload, sfcm::SpecTable(specs));
        std::vector<std::string> messages;
        for (const auto &v : report.violations) messages.push_back(v.message);
        return messages;
      },
      "plan"_a, "cluster"_a, "workload"_a, "specs"_a,
      "List of violation messages; empty when the plan is feasible.");
  m.def(
      "random_plan",
      [](const sfcm::ClusterSpec &cluster, const std::vector<sfcm::FunctionSpec> &specs,
         const sfcm::EpochWorkload &workload, std::uint64_t seed) {
        return sfcm::random_plan(cluster, sfcm::SpecTable(specs), workload, seed);
      },
      "cluster"_a, "specs"_a, "workload"_a, "seed"_a);
  m.def("parallel_slots", &sfcm::parallel_slots, "spec"_a, "cores"_a);
  m.def("min_cores_for_slots", &sfcm::min_cores_for_slots, "spec"_a, "slots"_a);

  // sustain
  py::class_<sfcm::EnvironmentState>(m, "EnvironmentState")
      .def(py::init<>())
      .def_readwrite("carbon_intensity_g_per_kwh",
                     &sfcm::EnvironmentState::carbon_intensity_g_per_kwh)
      .def_readwrite("wue_l_per_kwh", &sfcm::EnvironmentState::wue_l_per_kwh)
      .def_readwrite("ewif_l_per_kwh", &sfcm::EnvironmentState::ewif_l_per_kwh)
      .def_readwrite("carbon_per_liter_water_g", &sfcm::EnvironmentState::carbon_per_liter_water_g)
      .def_readwrite("cop_base", &sfcm::EnvironmentState::cop_base)
      .def_readwrite("hotspot_util_threshold", &sfcm::EnvironmentState::hotspot_util_threshold)
      .def_readwrite("hotspot_cop_penalty", &sfcm::EnvironmentState::hotspot_cop_penalty);

  py::class_<sfcm::ObjectiveVector>(m, "ObjectiveVector")
      .def(py::init<>())
      .def(py::init([](double s, double c, double w) { return sfcm::ObjectiveVector{s, c, w}; }),
           "slo_violation_rate"_a, "carbon_g"_a, "water_l"_a)
      .def_readwrite("slo_violation_rate", &sfcm::ObjectiveVector::slo_violation_rate)
      .def_readwrite("carbon_g", &sfcm::ObjectiveVector::carbon_g)
      .def_readwrite("water_l", &sfcm::ObjectiveVector::water_l)
      .def("astuple",
           [](const sfcm::ObjectiveVector &v) {
             return py::make_tuple(v.slo_violation_rate, v.carbon_g, v.water_l);
           })
      .def("__repr__", &repr_objectives<sfcm::ObjectiveVector>)
      .def(py::self == py::self);

  m.def(
      "evaluate",
      [](const sfcm::Plan &plan, const std::vector<sfcm::FunctionSpec> &specs,
         const sfcm::EpochWorkload &workload, const sfcm::ClusterSpec &cluster,
         const sfcm::EnvironmentState &env, double epoch_length_s,
         const std::optional<sfcm::Plan> &previous) {
        return sfcm::evaluate(plan, sfcm::SpecTable(specs), workload, cluster, env,
                              epoch_length_s, previous ? &*previous : nullptr);
      },
      "plan"_a, "specs"_a, "workload"_a, "cluster"_a = sfcm::ClusterSpec{},
      "env"_a = sfcm::EnvironmentState{}, "epoch_length_s"_a = 900.0,
      "previous"_a = std::nullopt);
  m.def(
      "slo_completions",
      [](const sfcm::Plan &plan, const std::vector<sfcm::FunctionSpec> &specs,
         const sfcm::EpochWorkload &workload, const sfcm::OverheadSpec &overhead,
         double epoch_length_s) {
        auto r = sfcm::eval_slo(plan, sfcm::SpecTable(specs), workload, overhead,
                                epoch_length_s, true);
        return py::make_tuple(r.rate, r.violations, r.completions);
      },
      "plan"_a, "specs"_a, "workload"_a, "overhead"_a = sfcm::OverheadSpec{},
      "epoch_length_s"_a = 900.0, "Returns (rate, violations, completions per container).");

  // optimizer
  py::class_<sfcm::Weights>(m, "Weights")
      .def(py::init<>())
      .def(py::init([](double s, double c, double w) { return sfcm::Weights{s, c, w}; }),
           "slo"_a, "carbon"_a, "water"_a)
      .def_readwrite("slo", &sfcm::Weights::slo)
      .def_readwrite("carbon", &sfcm::Weights::carbon)
      .def_readwrite("water", &sfcm::Weights::water);
  m.def("weighted_sum", &sfcm::weighted_sum, "objectives"_a, "weights"_a, "norms"_a);
  m.def("dominates", &sfcm::dominates, "a"_a, "b"_a);

  py::class_<sfcm::SearchBudget>(m, "SearchBudget")
      .def(py::init<>())
      .def_readwrite("population_size", &sfcm::SearchBudget::population_size)
      .def_readwrite("local_steps_per_round", &sfcm::SearchBudget::local_steps_per_round)
      .def_readwrite("rounds", &sfcm::SearchBudget::rounds)
      .def_readwrite("ls_fraction", &sfcm::SearchBudget::ls_fraction)
      .def_readwrite("seed", &sfcm::SearchBudget::seed)
      .def_readwrite("warm_start", &sfcm::SearchBudget::warm_start);

  py::class_<sfcm::ArchiveEntry>(m, "ArchiveEntry")
      .def_readonly("plan_id", &sfcm::ArchiveEntry::plan_id)
      .def_readonly("plan", &sfcm::ArchiveEntry::plan)
      .def_readonly("objectives", &sfcm::ArchiveEntry::objectives);

  m.def(
      "optimize_epoch",
      [](const std::vector<sfcm::FunctionSpec> &specs, const sfcm::EpochWorkload &workload,
         const sfcm::ClusterSpec &cluster, const sfcm::EnvironmentState &env,
         const sfcm::SearchBudget &budget, double epoch_length_s,
         const std::optional<sfcm::Plan> &previous) {
        const sfcm::SpecTable table(specs);
        const sfcm::EpochProblem problem{table, workload, cluster, env, epoch_length_s,
                                         previous ? &*previous : nullptr};
        sfcm::OptimizeResult result;
        {
          py::gil_scoped_release release;
          result = sfcm::optimize_epoch(problem, budget);
        }
        py::dict selected;
        for (const auto &v : result.variants) {
          selected[py::str(v.name)] = result.archive.entries()[v.archive_index];
        }
        return py::dict("archive"_a = result.archive.entries(), "norms"_a = result.norms,
                        "selected"_a = selected);
      },
      "specs"_a, "workload"_a, "cluster"_a = sfcm::ClusterSpec{},
      "env"_a = sfcm::EnvironmentState{}, "budget"_a = sfcm::SearchBudget{},
      "epoch_length_s"_a = 900.0, "previous"_a = std::nullopt,
      "Returns a dict with the Pareto archive, the normalization vector and the archive entry "
      "chosen by each variant (sfcm-slo, sfcm-carbon, sfcm-water, sfcm-balance).");

  // baselines
  m.def(
      "score_schedule",
      [](const sfcm::EpochWorkload &w, const std::vector<sfcm::FunctionSpec> &specs,
         const sfcm::ClusterSpec &cluster, const std::optional<sfcm::Plan> &previous) {
        return sfcm::score_schedule(w, sfcm::SpecTable(specs), cluster,
                                    previous ? &*previous : nullptr);
      },
      "workload"_a, "specs"_a, "cluster"_a = sfcm::ClusterSpec{}, "previous"_a = std::nullopt);
  m.def(
      "hybrid_schedule",
      [](const sfcm::EpochWorkload &w, const std::vector<sfcm::FunctionSpec> &specs,
         const sfcm::ClusterSpec &cluster, const std::optional<sfcm::Plan> &previous) {
        return sfcm::hybrid_schedule(w, sfcm::SpecTable(specs), cluster,
                                     previous ? &*previous : nullptr);
      },
      "workload"_a, "specs"_a, "cluster"_a = sfcm::ClusterSpec{}, "previous"_a = std::nullopt);

  // harness
  m.def(
      "run_horizon",
      [](const sfcm::Trace &trace, const std::vector<std::string> &policies,
         const sfcm::ClusterSpec &cluster, const py::object &env,
         const sfcm::SearchBudget &budget, std::optional<std::size_t> max_epochs,
         double epoch_length_s) {
        std::vector<sfcm::PolicyKind> kinds;
        for (const auto &p : policies) kinds.push_back(sfcm::parse_policy(p));
        sfcm::HorizonOptions options;
        options.budget = budget;
        options.max_epochs = max_epochs;
        options.epoch_length_s = epoch_length_s;
        const auto schedule = as_schedule(env);
        sfcm::HorizonResult result;
        {
          py::gil_scoped_release release;
          result = sfcm::run_horizon(trace, kinds, cluster, schedule, options);
        }
        py::dict out;
        for (const auto &p : result.policies) {
          py::list epochs;
          for (const auto &e : p.epochs) {
            epochs.append(py::dict("epoch"_a = e.epoch, "objectives"_a = e.objectives,
                                   "violations"_a = e.violations, "arrivals"_a = e.arrivals,
                                   "failed"_a = e.failed));
          }
          const auto &a = p.aggregate;
          out[py::str(std::string(sfcm::policy_name(p.policy)))] = py::dict(
              "epochs"_a = epochs,
              "aggregate"_a = py::dict("slo_rate"_a = a.slo_rate, "carbon_g"_a = a.carbon_g,
                                       "water_l"_a = a.water_l, "violations"_a = a.violations,
                                       "arrivals"_a = a.arrivals));
        }
        return out;
      },
      "trace"_a, "policies"_a, "cluster"_a = sfcm::ClusterSpec{}, "env"_a = py::none(),
      "budget"_a = sfcm::SearchBudget{}, "max_epochs"_a = std::nullopt,
      "epoch_length_s"_a = 900.0,
      "Runs the named policies; env is an EnvironmentState, a list of them, or None.");
  m.def(
      "pareto_front",
      [](const std::vector<sfcm::ObjectiveVector> &points) { return sfcm::pareto_front(points); },
      "points"_a);
  m.def(
      "project_front",
      [](const std::vector<sfcm::ObjectiveVector> &front, const std::string &x,
         const std::string &y) {
        std::vector<py::tuple> out;
        for (const auto &p : sfcm::project_front(front, sfcm::parse_axis(x), sfcm::parse_axis(y))) {
          out.push_back(py::make_tuple(p.index, p.x, p.y));
        }
        return out;
      },
      "front"_a, "x"_a, "y"_a, "Returns (index, x, y) tuples of the 2-D front.");

  m.def(
      "cli",
      [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          std::vector<std::string> argv{"sfcm"};
          argv.insert(argv.end(), args.begin(), args.end());
          code = sfcm::cli::run(argv, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "args"_a, "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
