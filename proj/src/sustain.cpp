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

#include "sfcm/sustain.hpp"

#include <algorithm>
#include <cmath>

#include "sfcm/errors.hpp"

namespace sfcm {
namespace {

constexpr double kJoulesPerKwh = 3.6e6;

double cold_delay(const ContainerAlloc &c, const OverheadSpec &overhead) {
  return c.is_new ? overhead.cold_start_s : 0.0;
}

// Core-seconds spent by in-flight requests of one container inside
// [0, epoch_length_s].
double request_core_seconds(const ContainerAlloc &c, const FunctionSpec &spec,
                            double cold, double epoch_length_s) {
  const int slots = parallel_slots(spec, c.cores);
  const std::int64_t batches = batch_count(c.assigned_requests, slots);
  double in_flight_s = 0.0;
  for (std::int64_t j = 1; j <= batches; ++j) {
    const double start = cold + static_cast<double>(j - 1) * spec.runtime_s;
    if (start >= epoch_length_s) break;
    const double end = std::min(cold + static_cast<double>(j) * spec.runtime_s, epoch_length_s);
    const std::int64_t in_batch =
        std::min<std::int64_t>(slots, c.assigned_requests - (j - 1) * slots);
    in_flight_s += static_cast<double>(in_batch) * (end - start);
  }
  return spec.cpu_per_request_cores * in_flight_s;
}

}  // namespace

void validate(const EnvironmentState &env) {
  const bool ok = env.carbon_intensity_g_per_kwh >= 0.0 && env.wue_l_per_kwh >= 0.0 &&
                  env.ewif_l_per_kwh >= 0.0 && env.carbon_per_liter_water_g >= 0.0 &&
                  env.cop_base > 0.0 && env.hotspot_util_threshold > 0.0 &&
                  env.hotspot_util_threshold <= 1.0 && env.hotspot_cop_penalty > 0.0 &&
                  env.hotspot_cop_penalty <= 1.0;
  if (!ok) {
    throw ConfigError(
        "env: rates must be >= 0, cop_base > 0, threshold and penalty in (0, 1]");
  }
}

const EnvironmentState &EnvSchedule::at(std::size_t epoch) const {
  if (states.empty()) throw ConfigError("env schedule is empty");
  if (states.size() == 1) return states.front();
  if (epoch >= states.size()) {
    throw ConfigError("env schedule has no entry for epoch " + std::to_string(epoch));
  }
  return states[epoch];
}

bool EnvSchedule::covers(std::size_t epochs) const {
  return states.size() == 1 || states.size() >= epochs;
}

SloResult eval_slo(const Plan &plan, const SpecTable &specs,
                   const EpochWorkload &workload, const OverheadSpec &overhead,
                   double epoch_length_s, bool record_completions) {
  SloResult result;
  result.total_requests = workload.total_arrivals();
  if (record_completions) result.completions.resize(plan.allocations.size());

  for (std::size_t ci = 0; ci < plan.allocations.size(); ++ci) {
    const auto &c = plan.allocations[ci];
    const auto &spec = specs.at(c.function_id);
    const int slots = parallel_slots(spec, c.cores);
    const double cold = cold_delay(c, overhead);
    const double limit = std::min(spec.deadline_s, epoch_length_s);
    const std::int64_t batches = batch_count(c.assigned_requests, slots);
    std::int64_t on_time = 0;
    for (std::int64_t j = 1; j <= batches; ++j) {
      const double done = cold + static_cast<double>(j) * spec.runtime_s;
      const std::int64_t in_batch =
          std::min<std::int64_t>(slots, c.assigned_requests - (j - 1) * slots);
      if (done <= limit) on_time += in_batch;
      if (record_completions) {
        result.completions[ci].insert(result.completions[ci].end(),
                                      static_cast<std::size_t>(in_batch), done);
      } else if (done > limit) {
        break;
      }
    }
    result.violations += c.assigned_requests - on_time;
  }
  result.rate = result.total_requests == 0
                    ? 0.0
                    : static_cast<double>(result.violations) /
                          static_cast<double>(result.total_requests);
  return result;
}

EnergyBreakdown eval_energy(const Plan &plan, const SpecTable &specs,
                            const ClusterSpec &cluster, const EnvironmentState &env,
                            double epoch_length_s,
                            std::span<const ContainerAlloc> retired) {
  const std::size_t n = cluster.n_nodes;
  std::vector<double> busy(n, 0.0);
  for (const auto &c : plan.allocations) {
    const auto &spec = specs.at(c.function_id);
    const double cold = cold_delay(c, cluster.overhead);
    double core_s = spec.cpu_base_cores * epoch_length_s +
                    request_core_seconds(c, spec, cold, epoch_length_s);
    core_s = std::min(core_s, static_cast<double>(c.cores) * epoch_length_s);
    busy[c.node_id] += core_s;
  }
  const double shutdown_s = std::min(cluster.overhead.shutdown_s, epoch_length_s);
  for (const auto &c : retired) {
    if (c.node_id >= n) continue;
    if (const auto *spec = specs.find(c.function_id)) {
      busy[c.node_id] += spec->cpu_base_cores * shutdown_s;
    }
  }

  EnergyBreakdown out;
  out.node_utilization.resize(n);
  out.node_it_kwh.resize(n);
  const double capacity_core_s = static_cast<double>(cluster.node.cores) * epoch_length_s;
  const double dynamic_w = cluster.node.p_max_w - cluster.node.p_idle_w;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::min(1.0, busy[i] / capacity_core_s);
    out.node_utilization[i] = u;
    out.node_it_kwh[i] = (cluster.node.p_idle_w + dynamic_w * u) * epoch_length_s / kJoulesPerKwh;
    out.it_kwh += out.node_it_kwh[i];
    out.hotspot = out.hotspot || u > env.hotspot_util_threshold;
  }
  const double cop = out.hotspot ? env.cop_base * env.hotspot_cop_penalty : env.cop_base;
  out.cooling_kwh = out.it_kwh / cop;

  std::int64_t starts = 0;
  for (const auto &c : plan.allocations) starts += c.is_new ? 1 : 0;
  out.startup_kwh = cluster.overhead.startup_energy_j * static_cast<double>(starts) / kJoulesPerKwh;
  out.total_kwh = out.it_kwh + out.cooling_kwh + out.startup_kwh;
  return out;
}

double eval_water(const EnergyBreakdown &energy, const EnvironmentState &env) {
  return env.wue_l_per_kwh * energy.it_kwh + env.ewif_l_per_kwh * energy.total_kwh;
}

double eval_carbon(const EnergyBreakdown &energy, double water_l,
                   const EnvironmentState &env) {
  return env.carbon_intensity_g_per_kwh * energy.total_kwh +
         env.carbon_per_liter_water_g * water_l;
}

Evaluation evaluate_detailed(const Plan &plan, const SpecTable &specs,
                             const EpochWorkload &workload, const ClusterSpec &cluster,
                             const EnvironmentState &env, double epoch_length_s,
                             const Plan *previous) {
  if (const auto report = feasible(plan, cluster, workload, specs); !report) {
    throw EvaluationError("infeasible plan: " + report.summary());
  }
  Evaluation ev;
  ev.plan = diff_new_containers(plan, previous);
  const auto retired = retired_containers(ev.plan, previous);
  ev.slo = eval_slo(ev.plan, specs, workload, cluster.overhead, epoch_length_s);
  ev.energy = eval_energy(ev.plan, specs, cluster, env, epoch_length_s, retired);
  const double water = eval_water(ev.energy, env);
  ev.objectives = {ev.slo.rate, eval_carbon(ev.energy, water, env), water};
  return ev;
}

ObjectiveVector evaluate(const Plan &plan, const SpecTable &specs,
                         const EpochWorkload &workload, const ClusterSpec &cluster,
                         const EnvironmentState &env, double epoch_length_s,
                         const Plan *previous) {
  return evaluate_detailed(plan, specs, workload, cluster, env, epoch_length_s, previous)
      .objectives;
}

}  // namespace sfcm
