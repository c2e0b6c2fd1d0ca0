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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfcm/workload.hpp"

namespace sfcm {

struct NodeSpec {
  int cores = 128;
  std::int64_t mem_mb = 262144;
  double p_idle_w = 100.0;
  double p_max_w = 500.0;

  bool operator==(const NodeSpec &) const = default;
};

/// Container lifecycle costs. Idle usage lives in FunctionSpec::cpu_base_cores.
struct OverheadSpec {
  double cold_start_s = 2.0;      // delay before a new container serves
  double shutdown_s = 0.5;        // residual base-core occupancy of a retired container
  double startup_energy_j = 500.0;

  bool operator==(const OverheadSpec &) const = default;
};

struct ClusterSpec {
  std::size_t n_nodes = 50;
  NodeSpec node;
  OverheadSpec overhead;

  bool operator==(const ClusterSpec &) const = default;
};

void validate(const ClusterSpec &cluster);

struct ContainerAlloc {
  std::string function_id;
  std::size_t node_id = 0;
  int cores = 1;
  std::int64_t mem_mb = 0;
  std::int64_t assigned_requests = 0;
  bool is_new = true;

  bool operator==(const ContainerAlloc &) const = default;
};

/// One scheduling + autoscaling decision for an epoch. Containers of one
/// function are kept contiguous, in workload id order, by every producer in
/// this library.
struct Plan {
  std::vector<ContainerAlloc> allocations;

  bool operator==(const Plan &) const = default;
};

/// floor((cores - base) / per_request), with a small tolerance so that sizes
/// computed by min_cores_for_slots round-trip despite decimal core fractions.
int parallel_slots(const FunctionSpec &spec, int cores);

/// Smallest integer core count with at least `slots` parallel slots.
int min_cores_for_slots(const FunctionSpec &spec, int slots);

/// Number of FIFO batches a container with `slots` needs for `requests`.
std::int64_t batch_count(std::int64_t requests, int slots);

/// Splits `total` into `parts` near-equal shares; remainder to the front.
std::vector<std::int64_t> even_split(std::int64_t total, std::size_t parts);

struct Violation {
  enum class Kind {
    kNodeCores,
    kNodeMemory,
    kConservation,
    kUnknownFunction,
    kBadNode,
    kNoSlots,
    kMemoryMismatch,
    kNegativeRequests,
  };
  Kind kind;
  std::optional<std::size_t> node;
  std::string function_id;
  std::string message;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
  std::string summary() const;
};

/// Checks every Plan invariant and reports each breach with context.
FeasibilityReport feasible(const Plan &plan, const ClusterSpec &cluster,
                           const EpochWorkload &workload, const SpecTable &specs);

/// Per-node resource accounting used by every plan constructor.
class NodeUsage {
 public:
  explicit NodeUsage(const ClusterSpec &cluster);
  NodeUsage(const ClusterSpec &cluster, const Plan &plan);

  bool fits(std::size_t node, int cores, std::int64_t mem_mb) const;
  void add(std::size_t node, int cores, std::int64_t mem_mb);
  void remove(std::size_t node, int cores, std::int64_t mem_mb);
  int free_cores(std::size_t node) const;
  std::int64_t free_mem(std::size_t node) const;
  std::size_t size() const { return used_cores_.size(); }

 private:
  NodeSpec node_;
  std::vector<int> used_cores_;
  std::vector<std::int64_t> used_mem_;
};

/// Randomized feasible plan. Per function: container count uniform in
/// [1, min(arrivals, 8)], requests split evenly, each container sized for
/// ceil(assigned / s) slots with s uniform in [1, 4], placed first-fit over a
/// freshly permuted node order. A function that does not fit is redrawn up to
/// four times, then falls back to one single-slot container; CapacityError if
/// even that fails.
Plan random_plan(const ClusterSpec &cluster, const SpecTable &specs,
                 const EpochWorkload &workload, std::uint64_t seed);

/// Marks containers new unless the previous plan had one with the same
/// (function_id, node_id); matching is multiset-wise, earliest first.
Plan diff_new_containers(const Plan &plan, const Plan *previous);

/// Containers of `previous` with no (function_id, node_id) counterpart in
/// `plan`; these are being shut down at the start of the epoch.
std::vector<ContainerAlloc> retired_containers(const Plan &plan, const Plan *previous);

/// [first, last) range of `function_id`'s contiguous run, or empty at the
/// insertion point that keeps id order.
std::pair<std::size_t, std::size_t> function_range(const Plan &plan,
                                                   const std::string &function_id);

}  // namespace sfcm
