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

#include "sfcm/baselines.hpp"

#include <algorithm>
#include <map>

#include "sfcm/errors.hpp"

namespace sfcm {
namespace {

void require_options(const BaselineOptions &options) {
  if (options.target_batch < 1) throw ConfigError("baselines: target_batch must be >= 1");
  if (!(options.runtime_threshold_s > 0.0)) {
    throw ConfigError("baselines: runtime_threshold_s must be > 0");
  }
}

std::size_t place_or_throw(NodeUsage &usage, const ClusterSpec &cluster,
                           const std::string &id, int cores, std::int64_t mem_mb) {
  const auto node = least_allocated_node(usage, cluster, cores, mem_mb);
  if (!node) {
    throw CapacityError("no node can host a " + std::to_string(cores) + "-core container for '" +
                        id + "'");
  }
  usage.add(*node, cores, mem_mb);
  return *node;
}

// Appends ceil(n / target_batch) freshly placed containers for `id`.
void schedule_group(std::vector<ContainerAlloc> &out, NodeUsage &usage,
                    const ClusterSpec &cluster, const FunctionSpec &spec, std::int64_t n,
                    const BaselineOptions &options) {
  const auto count = static_cast<std::size_t>((n + options.target_batch - 1) / options.target_batch);
  const int cores = min_cores_for_slots(spec, options.target_batch);
  for (auto share : even_split(n, count)) {
    const auto node = place_or_throw(usage, cluster, spec.id, cores, spec.mem_mb);
    out.push_back({spec.id, node, cores, spec.mem_mb, share, true});
  }
}

}  // namespace

std::optional<std::size_t> least_allocated_node(const NodeUsage &usage,
                                                const ClusterSpec &cluster, int cores,
                                                std::int64_t mem_mb) {
  std::optional<std::size_t> best;
  double best_score = -1.0;
  const double total_cores = static_cast<double>(cluster.node.cores);
  const double total_mem = static_cast<double>(cluster.node.mem_mb);
  for (std::size_t n = 0; n < usage.size(); ++n) {
    if (!usage.fits(n, cores, mem_mb)) continue;
    const double score = 0.5 * static_cast<double>(usage.free_cores(n)) / total_cores +
                         0.5 * static_cast<double>(usage.free_mem(n)) / total_mem;
    if (score > best_score) {
      best_score = score;
      best = n;
    }
  }
  return best;
}

Plan score_schedule(const EpochWorkload &workload, const SpecTable &specs,
                    const ClusterSpec &cluster, const Plan * /*previous*/,
                    const BaselineOptions &options) {
  require_options(options);
  NodeUsage usage(cluster);
  Plan plan;
  for (const auto &[id, n] : workload.arrivals) {
    schedule_group(plan.allocations, usage, cluster, specs.at(id), n, options);
  }
  return plan;
}

Plan hybrid_schedule(const EpochWorkload &workload, const SpecTable &specs,
                     const ClusterSpec &cluster, const Plan *previous,
                     const BaselineOptions &options) {
  require_options(options);
  const auto is_long = [&](const FunctionSpec &s) {
    return s.runtime_s >= options.runtime_threshold_s;
  };

  NodeUsage usage(cluster);
  std::map<std::string, std::vector<ContainerAlloc>> persistent;
  if (previous != nullptr) {
    for (const auto &c : previous->allocations) {
      const auto *spec = specs.find(c.function_id);
      if (spec == nullptr || !is_long(*spec)) continue;
      if (c.node_id >= cluster.n_nodes || !usage.fits(c.node_id, c.cores, c.mem_mb)) {
        throw CapacityError("persistent container for '" + c.function_id +
                            "' no longer fits node " + std::to_string(c.node_id));
      }
      usage.add(c.node_id, c.cores, c.mem_mb);
      auto kept = c;
      kept.assigned_requests = 0;
      persistent[c.function_id].push_back(std::move(kept));
    }
  }

  for (const auto &[id, n] : workload.arrivals) {
    const auto &spec = specs.at(id);
    if (!is_long(spec)) continue;
    auto &group = persistent[id];
    const auto wanted = static_cast<std::size_t>((n + options.target_batch - 1) / options.target_batch);
    const int cores = min_cores_for_slots(spec, options.target_batch);
    while (group.size() < wanted) {
      const auto node = place_or_throw(usage, cluster, id, cores, spec.mem_mb);
      group.push_back({id, node, cores, spec.mem_mb, 0, true});
    }
    const auto shares = even_split(n, group.size());
    for (std::size_t i = 0; i < group.size(); ++i) group[i].assigned_requests = shares[i];
  }

  std::map<std::string, std::vector<ContainerAlloc>> short_groups;
  for (const auto &[id, n] : workload.arrivals) {
    const auto &spec = specs.at(id);
    if (is_long(spec)) continue;
    schedule_group(short_groups[id], usage, cluster, spec, n, options);
  }

  Plan plan;
  for (auto *groups : {&persistent, &short_groups}) {
    for (auto &[id, group] : *groups) {
      plan.allocations.insert(plan.allocations.end(), group.begin(), group.end());
    }
  }
  std::stable_sort(plan.allocations.begin(), plan.allocations.end(),
                   [](const ContainerAlloc &a, const ContainerAlloc &b) {
                     return a.function_id < b.function_id;
                   });
  return plan;
}

}  // namespace sfcm
