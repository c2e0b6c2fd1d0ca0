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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfcm/baselines.hpp"
#include "sfcm/optimizer.hpp"
#include "sfcm/sustain.hpp"
#include "sfcm/workload.hpp"

namespace sfcm {

enum class PolicyKind { kScore, kHybrid, kSfcmSlo, kSfcmCarbon, kSfcmWater, kSfcmBalance };

std::string_view policy_name(PolicyKind policy);
/// UsageError on an unknown name.
PolicyKind parse_policy(std::string_view name);
/// Comma-separated list; UsageError on unknown or duplicate names.
std::vector<PolicyKind> parse_policy_list(std::string_view names);
bool is_sfcm(PolicyKind policy);
std::vector<PolicyKind> all_policies();

struct EpochRecord {
  std::size_t epoch = 0;
  ObjectiveVector objectives;
  std::int64_t violations = 0;
  std::int64_t arrivals = 0;
  bool failed = false;
  std::string failure;
  Plan plan;
};

struct AggregateObjectives {
  double slo_rate = 0.0;  // total violations / total arrivals
  double carbon_g = 0.0;
  double water_l = 0.0;
  std::int64_t violations = 0;
  std::int64_t arrivals = 0;
};

struct PolicyResult {
  PolicyKind policy = PolicyKind::kScore;
  std::vector<EpochRecord> epochs;
  AggregateObjectives aggregate;
  // SFCM policies only: per-epoch archive and the normalization used.
  std::vector<std::vector<ArchiveEntry>> archives;
  std::vector<ObjectiveVector> norms;
};

struct HorizonResult {
  std::vector<PolicyResult> policies;

  const PolicyResult &at(PolicyKind policy) const;
};

struct HorizonOptions {
  double epoch_length_s = 900.0;
  std::optional<double> horizon_s;       // truncates to floor(horizon / epoch) epochs
  std::optional<std::size_t> max_epochs;
  SearchBudget budget;
  Weights balance = Weights::balanced();
  BaselineOptions baselines;
  bool parallel = true;  // one thread per policy; results are identical either way
  std::ostream *log = nullptr;
};

std::size_t epoch_count(double horizon_s, double epoch_length_s);

/// Runs every policy over the trace epoch by epoch. Each policy carries only
/// its own previous plan. A CapacityError marks that epoch failed (all
/// requests violated, idle-only energy) and the horizon continues.
HorizonResult run_horizon(const Trace &trace, std::span<const PolicyKind> policies,
                          const ClusterSpec &cluster, const EnvSchedule &env,
                          const HorizonOptions &options);

/// Aggregate over the recorded epochs.
AggregateObjectives aggregate(std::span<const EpochRecord> epochs);

/// Indices of the non-dominated points, in input order.
std::vector<std::size_t> pareto_front_indices(std::span<const ObjectiveVector> points);
std::vector<ObjectiveVector> pareto_front(std::span<const ObjectiveVector> points);

enum class Axis { kSlo, kCarbon, kWater };

std::string_view axis_name(Axis axis);
/// Accepts slo, carbon, water; UsageError otherwise.
Axis parse_axis(std::string_view name);
double axis_value(const ObjectiveVector &v, Axis axis);

struct ProjectedPoint {
  std::size_t index;  // position in the input list
  double x;
  double y;

  bool operator==(const ProjectedPoint &) const = default;
};

/// Projects onto two axes and drops points dominated in the plane.
std::vector<ProjectedPoint> project_front(std::span<const ObjectiveVector> front, Axis x,
                                          Axis y);

}  // namespace sfcm
