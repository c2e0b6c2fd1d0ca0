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
#include <optional>

#include "sfcm/cluster.hpp"
#include "sfcm/workload.hpp"

namespace sfcm {

struct BaselineOptions {
  int target_batch = 4;              // slots per SCORE container
  double runtime_threshold_s = 30.0;  // HYBRID long/short boundary

  bool operator==(const BaselineOptions &) const = default;
};

/// Least-allocated node score, 0.5 * free core fraction + 0.5 * free memory
/// fraction. Returns the best node that fits, ties to the lowest index.
std::optional<std::size_t> least_allocated_node(const NodeUsage &usage,
                                                const ClusterSpec &cluster, int cores,
                                                std::int64_t mem_mb);

/// Kubernetes-style scheduler: ceil(arrivals / target_batch) containers per
/// function with target_batch slots each, requests split evenly, each placed
/// on the least-allocated node. Deterministic; CapacityError if a container
/// cannot be placed.
Plan score_schedule(const EpochWorkload &workload, const SpecTable &specs,
                    const ClusterSpec &cluster, const Plan *previous,
                    const BaselineOptions &options = {});

/// Functions with runtime >= runtime_threshold_s keep every container they
/// held in `previous` (same node and size, even when idle) and gain more only
/// when SCORE sizing asks for more; short functions are scheduled as in
/// score_schedule and rebuilt every epoch.
Plan hybrid_schedule(const EpochWorkload &workload, const SpecTable &specs,
                     const ClusterSpec &cluster, const Plan *previous,
                     const BaselineOptions &options = {});

}  // namespace sfcm
