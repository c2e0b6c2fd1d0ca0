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
#include <optional>
#include <string>
#include <string_view>

#include "sfcm/baselines.hpp"
#include "sfcm/cluster.hpp"
#include "sfcm/optimizer.hpp"
#include "sfcm/sustain.hpp"
#include "sfcm/workload.hpp"

namespace sfcm {

/// One experiment. JSON layout (every key optional, unknown keys rejected):
///
///   {"trace":     {TraceConfig fields, incl. epoch_length_s and seed},
///    "cluster":   {"n_nodes", "node": {...}, "overhead": {...}},
///    "env":       {EnvironmentState fields} or [one object per epoch],
///    "budget":    {SearchBudget fields},
///    "weights":   {"slo", "carbon", "water"},   // SFCM-Balance weights
///    "baselines": {"target_batch", "runtime_threshold_s"},
///    "horizon_s": number}
struct Config {
  TraceConfig trace;
  ClusterSpec cluster;
  EnvSchedule env;
  SearchBudget budget;
  Weights weights = Weights::balanced();
  BaselineOptions baselines;
  std::optional<double> horizon_s;
};

/// ConfigError on bad JSON, wrong types, unknown keys or invalid values.
Config config_from_json(std::string_view text);
Config load_config(const std::filesystem::path &path);
std::string config_to_json(const Config &config);

/// Applies one seed to both the trace generator and the optimizer.
void set_seed(Config &config, std::uint64_t seed);

}  // namespace sfcm
