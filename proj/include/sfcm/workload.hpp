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
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace sfcm {

/// Static profile of one function ID.
struct FunctionSpec {
  std::string id;
  double runtime_s = 1.0;   // service time of one request
  double deadline_s = 3.0;  // SLO deadline measured from arrival
  std::int64_t mem_mb = 256;
  double cpu_base_cores = 0.25;        // held by a container even when idle
  double cpu_per_request_cores = 0.5;  // extra cores per in-flight request

  bool operator==(const FunctionSpec &) const = default;
};

/// Throws SchemaError if `spec` breaks a FunctionSpec invariant.
void validate(const FunctionSpec &spec);

/// Arrival counts for one planning epoch. All requests arrive at epoch start.
struct EpochWorkload {
  std::size_t epoch_index = 0;
  std::map<std::string, std::int64_t> arrivals;  // ordered by id

  std::int64_t total_arrivals() const;
  std::size_t distinct_ids() const { return arrivals.size(); }
  std::int64_t count(const std::string &function_id) const;

  bool operator==(const EpochWorkload &) const = default;
};

struct Trace {
  std::vector<FunctionSpec> functions;
  std::vector<EpochWorkload> epochs;

  bool operator==(const Trace &) const = default;
};

/// Id-indexed view over a list of FunctionSpecs.
class SpecTable {
 public:
  SpecTable() = default;
  explicit SpecTable(std::vector<FunctionSpec> specs);

  const FunctionSpec &at(const std::string &id) const;
  const FunctionSpec *find(const std::string &id) const;
  bool contains(const std::string &id) const { return find(id) != nullptr; }
  const std::vector<FunctionSpec> &all() const { return specs_; }
  std::size_t size() const { return specs_.size(); }

 private:
  std::vector<FunctionSpec> specs_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parameters of the synthetic trace generator.
///
/// Runtimes come from a two-mode log-uniform mixture. Exactly
/// round(short_fraction * n_function_ids) functions are drawn from the short
/// mode, the rest from the long mode, and the modes are then shuffled across
/// ids. Each epoch activates a uniformly drawn number of distinct ids within
/// [min_ids_per_epoch, min(max_ids_per_epoch, n_function_ids)].
struct TraceConfig {
  std::size_t n_function_ids = 424;
  std::size_t epochs = 32;
  double epoch_length_s = 900.0;
  double short_fraction = 0.9;
  double short_runtime_min_s = 0.1;
  double short_runtime_max_s = 30.0;  // exclusive
  double long_runtime_min_s = 30.0;
  double long_runtime_max_s = 300.0;
  double slack_factor = 3.0;  // deadline = slack_factor * runtime
  std::size_t min_ids_per_epoch = 13;
  std::size_t max_ids_per_epoch = 62;
  // Per-function mean arrivals per epoch are log-uniform in this range; each
  // epoch scales the mean by a uniform factor in [1 - jitter, 1 + jitter].
  double arrivals_mean_min = 1.0;
  double arrivals_mean_max = 60.0;
  double arrivals_jitter = 0.5;
  std::vector<std::int64_t> mem_choices_mb{128, 256, 512, 1024, 2048};
  double cpu_base_min = 0.1;
  double cpu_base_max = 1.0;
  double cpu_per_request_min = 0.1;
  double cpu_per_request_max = 1.0;
  std::uint64_t seed = 7;
};

/// Throws ConfigError if the config cannot produce a valid trace.
void validate(const TraceConfig &cfg);

Trace generate_trace(const TraceConfig &cfg);

/// Reads `functions.csv` and `arrivals.csv` from `dir`.
Trace ingest_trace(const std::filesystem::path &dir, double epoch_length_s);
Trace ingest_trace(const std::filesystem::path &functions_csv,
                   const std::filesystem::path &arrivals_csv,
                   double epoch_length_s);

/// Writes `functions.csv` and `arrivals.csv` into `dir` (created if missing).
/// Arrival times are spread deterministically inside each epoch so that a
/// re-ingest with the same epoch length reproduces the buckets.
void write_trace(const Trace &trace, const std::filesystem::path &dir,
                 double epoch_length_s);

}  // namespace sfcm
