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

#include "sfcm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "sfcm/errors.hpp"
#include "sfcm/rng.hpp"

namespace sfcm {
namespace {

constexpr double kSlotTolerance = 1e-9;
constexpr std::int64_t kMaxRandomContainers = 8;
constexpr int kRandomPlanAttempts = 4;
constexpr std::int64_t kMaxCeilSlots = 4;

using PairKey = std::pair<std::string, std::size_t>;

std::map<PairKey, std::int64_t> pair_counts(const Plan &plan) {
  std::map<PairKey, std::int64_t> counts;
  for (const auto &c : plan.allocations) ++counts[{c.function_id, c.node_id}];
  return counts;
}

std::optional<std::size_t> first_fit(const NodeUsage &usage,
                                     std::span<const std::size_t> order, int cores,
                                     std::int64_t mem_mb) {
  for (auto node : order) {
    if (usage.fits(node, cores, mem_mb)) return node;
  }
  return std::nullopt;
}

Plan minimal_plan(const ClusterSpec &cluster, const SpecTable &specs,
                  const EpochWorkload &workload) {
  NodeUsage usage(cluster);
  std::vector<std::size_t> order(cluster.n_nodes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Plan plan;
  for (const auto &[id, n] : workload.arrivals) {
    const auto &spec = specs.at(id);
    const int cores = min_cores_for_slots(spec, 1);
    const auto node = first_fit(usage, order, cores, spec.mem_mb);
    if (!node) {
      throw CapacityError("cannot place a single-slot container for '" + id + "'");
    }
    usage.add(*node, cores, spec.mem_mb);
    plan.allocations.push_back({id, *node, cores, spec.mem_mb, n, true});
  }
  return plan;
}

}  // namespace

void validate(const ClusterSpec &cluster) {
  if (cluster.n_nodes == 0) throw ConfigError("cluster: n_nodes must be >= 1");
  const auto &n = cluster.node;
  if (n.cores < 1) throw ConfigError("cluster: node cores must be >= 1");
  if (n.mem_mb < 1) throw ConfigError("cluster: node mem_mb must be >= 1");
  if (!(n.p_idle_w > 0.0 && n.p_idle_w < n.p_max_w)) {
    throw ConfigError("cluster: require 0 < p_idle_w < p_max_w");
  }
  const auto &o = cluster.overhead;
  if (!(o.cold_start_s >= 0.0 && o.shutdown_s >= 0.0 && o.startup_energy_j >= 0.0)) {
    throw ConfigError("cluster: overhead fields must be >= 0");
  }
}

int parallel_slots(const FunctionSpec &spec, int cores) {
  const double spare = static_cast<double>(cores) - spec.cpu_base_cores;
  if (spare < 0.0) return 0;
  return static_cast<int>(std::floor(spare / spec.cpu_per_request_cores + kSlotTolerance));
}

int min_cores_for_slots(const FunctionSpec &spec, int slots) {
  slots = std::max(slots, 1);
  const double need = spec.cpu_base_cores + slots * spec.cpu_per_request_cores;
  int cores = std::max(1, static_cast<int>(std::ceil(need - kSlotTolerance)));
  while (parallel_slots(spec, cores) < slots) ++cores;
  return cores;
}

std::int64_t batch_count(std::int64_t requests, int slots) {
  if (requests <= 0) return 0;
  return (requests + slots - 1) / slots;
}

std::vector<std::int64_t> even_split(std::int64_t total, std::size_t parts) {
  std::vector<std::int64_t> out(parts, 0);
  if (parts == 0) return out;
  const auto p = static_cast<std::int64_t>(parts);
  for (std::int64_t i = 0; i < p; ++i) out[i] = total / p + (i < total % p ? 1 : 0);
  return out;
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].message;
  }
  return os.str();
}

FeasibilityReport feasible(const Plan &plan, const ClusterSpec &cluster,
                           const EpochWorkload &workload, const SpecTable &specs) {
  FeasibilityReport report;
  auto add = [&](Violation::Kind kind, std::optional<std::size_t> node,
                 std::string fid, std::string msg) {
    report.violations.push_back({kind, node, std::move(fid), std::move(msg)});
  };

  std::vector<std::int64_t> cores(cluster.n_nodes, 0);
  std::vector<std::int64_t> mem(cluster.n_nodes, 0);
  std::map<std::string, std::int64_t> assigned;

  for (std::size_t i = 0; i < plan.allocations.size(); ++i) {
    const auto &c = plan.allocations[i];
    const std::string where = "container " + std::to_string(i) + " ('" + c.function_id + "')";
    assigned[c.function_id] += c.assigned_requests;
    if (c.assigned_requests < 0) {
      add(Violation::Kind::kNegativeRequests, c.node_id, c.function_id,
          where + ": negative assigned_requests");
    }
    if (c.node_id >= cluster.n_nodes) {
      add(Violation::Kind::kBadNode, c.node_id, c.function_id,
          where + ": node " + std::to_string(c.node_id) + " out of range");
    } else {
      cores[c.node_id] += c.cores;
      mem[c.node_id] += c.mem_mb;
    }
    const auto *spec = specs.find(c.function_id);
    if (spec == nullptr) {
      add(Violation::Kind::kUnknownFunction, std::nullopt, c.function_id,
          where + ": unknown function id");
      continue;
    }
    if (c.mem_mb != spec->mem_mb) {
      add(Violation::Kind::kMemoryMismatch, c.node_id, c.function_id,
          where + ": mem_mb " + std::to_string(c.mem_mb) + " != function mem_mb " +
              std::to_string(spec->mem_mb));
    }
    if (parallel_slots(*spec, c.cores) < 1) {
      add(Violation::Kind::kNoSlots, c.node_id, c.function_id,
          where + ": " + std::to_string(c.cores) + " cores give no parallel slot");
    }
  }

  for (std::size_t n = 0; n < cluster.n_nodes; ++n) {
    if (cores[n] > cluster.node.cores) {
      add(Violation::Kind::kNodeCores, n, "",
          "node " + std::to_string(n) + ": " + std::to_string(cores[n]) +
              " cores allocated, capacity " + std::to_string(cluster.node.cores));
    }
    if (mem[n] > cluster.node.mem_mb) {
      add(Violation::Kind::kNodeMemory, n, "",
          "node " + std::to_string(n) + ": " + std::to_string(mem[n]) +
              " MB allocated, capacity " + std::to_string(cluster.node.mem_mb));
    }
  }

  for (const auto &[id, n] : workload.arrivals) assigned.try_emplace(id, 0);
  for (const auto &[id, got] : assigned) {
    const auto want = workload.count(id);
    if (got != want) {
      add(Violation::Kind::kConservation, std::nullopt, id,
          "function '" + id + "': " + std::to_string(got) + " requests assigned, " +
              std::to_string(want) + " arrived");
    }
  }
  return report;
}

NodeUsage::NodeUsage(const ClusterSpec &cluster)
    : node_(cluster.node),
      used_cores_(cluster.n_nodes, 0),
      used_mem_(cluster.n_nodes, 0) {}

NodeUsage::NodeUsage(const ClusterSpec &cluster, const Plan &plan) : NodeUsage(cluster) {
  for (const auto &c : plan.allocations) add(c.node_id, c.cores, c.mem_mb);
}

bool NodeUsage::fits(std::size_t node, int cores, std::int64_t mem_mb) const {
  return used_cores_[node] + cores <= node_.cores &&
         used_mem_[node] + mem_mb <= node_.mem_mb;
}

void NodeUsage::add(std::size_t node, int cores, std::int64_t mem_mb) {
  used_cores_[node] += cores;
  used_mem_[node] += mem_mb;
}

void NodeUsage::remove(std::size_t node, int cores, std::int64_t mem_mb) {
  used_cores_[node] -= cores;
  used_mem_[node] -= mem_mb;
}

int NodeUsage::free_cores(std::size_t node) const {
  return node_.cores - used_cores_[node];
}

std::int64_t NodeUsage::free_mem(std::size_t node) const {
  return node_.mem_mb - used_mem_[node];
}

Plan random_plan(const ClusterSpec &cluster, const SpecTable &specs,
                 const EpochWorkload &workload, std::uint64_t seed) {
  Rng rng(seed);
  NodeUsage usage(cluster);
  std::vector<std::size_t> order(cluster.n_nodes);
  Plan plan;

  auto shuffled_nodes = [&]() -> std::span<const std::size_t> {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    return order;
  };

  for (const auto &[id, n] : workload.arrivals) {
    const auto &spec = specs.at(id);
    std::vector<ContainerAlloc> group;
    for (int attempt = 0; attempt < kRandomPlanAttempts && group.empty(); ++attempt) {
      const auto count = static_cast<std::size_t>(
          rng.uniform_int(1, std::min<std::int64_t>(n, kMaxRandomContainers)));
      const auto ceil_slots = rng.uniform_int(1, kMaxCeilSlots);
      for (auto share : even_split(n, count)) {
        const auto slots = static_cast<int>(
            std::max<std::int64_t>(1, (share + ceil_slots - 1) / ceil_slots));
        const int cores = min_cores_for_slots(spec, slots);
        const auto node = first_fit(usage, shuffled_nodes(), cores, spec.mem_mb);
        if (!node) {
          for (const auto &c : group) usage.remove(c.node_id, c.cores, c.mem_mb);
          group.clear();
          break;
        }
        usage.add(*node, cores, spec.mem_mb);
        group.push_back({id, *node, cores, spec.mem_mb, share, true});
      }
    }
    if (group.empty()) {
      const int cores = min_cores_for_slots(spec, 1);
      const auto node = first_fit(usage, shuffled_nodes(), cores, spec.mem_mb);
      if (!node) {
        // Greedy randomized placement exhausted the cluster; a deterministic
        // minimal packing may still exist.
        return minimal_plan(cluster, specs, workload);
      }
      usage.add(*node, cores, spec.mem_mb);
      group.push_back({id, *node, cores, spec.mem_mb, n, true});
    }
    plan.allocations.insert(plan.allocations.end(), group.begin(), group.end());
  }
  return plan;
}

Plan diff_new_containers(const Plan &plan, const Plan *previous) {
  Plan out = plan;
  if (previous == nullptr) {
    for (auto &c : out.allocations) c.is_new = true;
    return out;
  }
  auto remaining = pair_counts(*previous);
  for (auto &c : out.allocations) {
    auto it = remaining.find({c.function_id, c.node_id});
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      c.is_new = false;
    } else {
      c.is_new = true;
    }
  }
  return out;
}

std::vector<ContainerAlloc> retired_containers(const Plan &plan, const Plan *previous) {
  std::vector<ContainerAlloc> retired;
  if (previous == nullptr) return retired;
  auto remaining = pair_counts(plan);
  for (const auto &c : previous->allocations) {
    auto it = remaining.find({c.function_id, c.node_id});
    if (it != remaining.end() && it->second > 0) {
      --it->second;
    } else {
      retired.push_back(c);
    }
  }
  return retired;
}

std::pair<std::size_t, std::size_t> function_range(const Plan &plan,
                                                   const std::string &function_id) {
  const auto &a = plan.allocations;
  const auto lo = std::lower_bound(
      a.begin(), a.end(), function_id,
      [](const ContainerAlloc &c, const std::string &id) { return c.function_id < id; });
  auto hi = lo;
  while (hi != a.end() && hi->function_id == function_id) ++hi;
  return {static_cast<std::size_t>(lo - a.begin()), static_cast<std::size_t>(hi - a.begin())};
}

}  // namespace sfcm
