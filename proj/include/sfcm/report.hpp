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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sfcm/cluster.hpp"
#include "sfcm/harness.hpp"
#include "sfcm/optimizer.hpp"
#include "sfcm/sustain.hpp"

namespace sfcm {

// Plan JSON:
//   {"allocations": [{"function_id": "f001", "node_id": 3, "cores": 4,
//                     "mem_mb": 256, "assigned_requests": 7, "is_new": true}]}
std::string plan_to_json(const Plan &plan);
/// ParseError on malformed JSON / missing fields.
Plan plan_from_json(std::string_view text);

/// `plan_id,slo_rate,carbon_g,water_l`
std::string objectives_csv(std::span<const ObjectiveVector> rows);

/// `plan_id,slo_rate,carbon_g,water_l,weighted_balance`; the last column is
/// the balanced weighted sum under `norms`.
std::string archive_csv(std::span<const ArchiveEntry> entries, const Weights &balance,
                        const ObjectiveVector &norms);

struct ObjectiveRow {
  std::size_t plan_id = 0;
  ObjectiveVector objectives;
};

/// Reads either of the two CSVs above.
std::vector<ObjectiveRow> read_objective_rows(const std::filesystem::path &path);

/// `epoch,policy,slo_rate,carbon_g,water_l`
std::string epochs_csv(const HorizonResult &result);
/// `policy,agg_slo,agg_carbon_g,agg_water_l`
std::string aggregate_csv(const HorizonResult &result);
/// `plan_id,<x>,<y>`
std::string projected_csv(std::span<const ObjectiveRow> rows,
                          std::span<const ProjectedPoint> points, Axis x, Axis y);

std::string pareto_file_name(PolicyKind policy, std::size_t epoch);

/// Writes epochs.csv, aggregate.csv, pareto/<policy>_epoch_<e>.csv and
/// plans/<policy>_epoch_<e>.json into `dir`.
void write_run_outputs(const HorizonResult &result, const Weights &balance,
                       const std::filesystem::path &dir);

/// Creates missing parent directories.
void write_text_file(const std::filesystem::path &path, std::string_view contents);
std::string read_text_file(const std::filesystem::path &path);

}  // namespace sfcm
