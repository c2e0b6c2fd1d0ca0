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

// Per-request event simulation of container slots, independent of the
// closed-form batch arithmetic in eval_slo.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sfcm/cluster.hpp"
#include "sfcm/workload.hpp"

namespace sfcm::oracle {

struct SimulatedSlo {
  std::int64_t violations = 0;
  std::int64_t total = 0;
  std::vector<std::vector<double>> completions;
};

inline SimulatedSlo simulate_slo(const Plan &plan, const SpecTable &specs,
                                 const EpochWorkload &workload, const OverheadSpec &overhead,
                                 double epoch_length_s) {
  SimulatedSlo out;
  out.total = workload.total_arrivals();
  for (const auto &c : plan.allocations) {
    const auto &spec = specs.at(c.function_id);
    // Count slots by adding per-request cores until the allocation is exceeded.
    int slots = 0;
    double used = spec.cpu_base_cores;
    while (used + spec.cpu_per_request_cores <= c.cores + 1e-9) {
      used += spec.cpu_per_request_cores;
      ++slots;
    }
    // Each slot is tracked by how many requests it has finished, so a slot
    // frees at cold + served * runtime without accumulating rounding error.
    const double cold = c.is_new ? overhead.cold_start_s : 0.0;
    std::vector<std::int64_t> served(static_cast<std::size_t>(slots), 0);
    std::vector<double> done;
    for (std::int64_t r = 0; r < c.assigned_requests; ++r) {
      // FIFO: the next queued request takes the earliest free slot.
      auto slot = std::min_element(served.begin(), served.end());
      ++*slot;
      const double t = cold + static_cast<double>(*slot) * spec.runtime_s;
      done.push_back(t);
      if (t > spec.deadline_s || t > epoch_length_s) ++out.violations;
    }
    out.completions.push_back(std::move(done));
  }
  return out;
}

}  // namespace sfcm::oracle
