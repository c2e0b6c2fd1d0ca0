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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfcm/cluster.hpp"
#include "sfcm/workload.hpp"

namespace sfcm {

/// Grid, cooling, and water constants for one epoch. All are configuration,
/// not measured ground truth.
struct EnvironmentState {
  double carbon_intensity_g_per_kwh = 400.0;
  double wue_l_per_kwh = 1.8;   // direct cooling water per kWh of IT energy
  double ewif_l_per_kwh = 0.4;  // indirect water per kWh of total energy
  double carbon_per_liter_water_g = 1.2;
  double cop_base = 4.0;
  double hotspot_util_threshold = 0.9;
  double hotspot_cop_penalty = 0.5;

  bool operator==(const EnvironmentState &) const = default;
};

void validate(const EnvironmentState &env);

/// Per-epoch environment; a single entry is broadcast to every epoch.
struct EnvSchedule {
  std::vector<EnvironmentState> states{EnvironmentState{}};

  const EnvironmentState &at(std::size_t epoch) const;
  bool covers(std::size_t epochs) const;
};

struct ObjectiveVector {
  double slo_violation_rate = 0.0;
  double carbon_g = 0.0;
  double water_l = 0.0;

  bool operator==(const ObjectiveVector &) const = default;
};

struct SloResult {
  double rate = 0.0;
  std::int64_t violations = 0;
  std::int64_t total_requests = 0;
  // completions[c][i]: completion time of request i (0-based) of container c,
  // measured from epoch start. Empty unless requested.
  std::vector<std::vector<double>> completions;
};

/// FIFO batch model: in a container with k slots, request i (1-based)
/// completes at cold + ceil(i/k) * runtime, where cold is the cold-start delay
/// for new containers and 0 otherwise. A request violates its SLO if it
/// completes after the deadline or after the epoch ends.
SloResult eval_slo(const Plan &plan, const SpecTable &specs,
                   const EpochWorkload &workload, const OverheadSpec &overhead,
                   double epoch_length_s, bool record_completions = false);

struct EnergyBreakdown {
  std::vector<double> node_utilization;
  std::vector<double> node_it_kwh;
  double it_kwh = 0.0;
  double cooling_kwh = 0.0;
  double startup_kwh = 0.0;
  double total_kwh = 0.0;
  bool hotspot = false;
};

/// Node power is linear in utilization between p_idle and p_max. Busy
/// core-seconds count each container's base cores for the whole epoch plus
/// per-request cores while a request is in flight, plus base cores for
/// `shutdown_s` of every retired container. Cooling is IT energy over the
/// effective COP, which drops by the hotspot penalty when any node exceeds
/// the utilization threshold.
EnergyBreakdown eval_energy(const Plan &plan, const SpecTable &specs,
                            const ClusterSpec &cluster, const EnvironmentState &env,
                            double epoch_length_s,
                            std::span<const ContainerAlloc> retired = {});

double eval_water(const EnergyBreakdown &energy, const EnvironmentState &env);
double eval_carbon(const EnergyBreakdown &energy, double water_l,
                   const EnvironmentState &env);

struct Evaluation {
  ObjectiveVector objectives;
  SloResult slo;
  EnergyBreakdown energy;
  Plan plan;  // with is_new resolved against the previous plan
};

/// Throws EvaluationError if the plan is infeasible.
Evaluation evaluate_detailed(const Plan &plan, const SpecTable &specs,
                             const EpochWorkload &workload, const ClusterSpec &cluster,
                             const EnvironmentState &env, double epoch_length_s,
                             const Plan *previous);

ObjectiveVector evaluate(const Plan &plan, const SpecTable &specs,
                         const EpochWorkload &workload, const ClusterSpec &cluster,
                         const EnvironmentState &env, double epoch_length_s,
                         const Plan *previous);

}  // namespace sfcm
