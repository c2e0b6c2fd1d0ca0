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

#include "sfcm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sfcm/errors.hpp"

namespace sfcm {
namespace {

constexpr double kNormEpsilon = 1e-9;
constexpr std::int64_t kMaxCeilSlots = 4;

void rebalance(Plan &plan, std::size_t lo, std::size_t hi, std::int64_t total) {
  const auto shares = even_split(total, hi - lo);
  for (std::size_t i = lo; i < hi; ++i) plan.allocations[i].assigned_requests = shares[i - lo];
}

std::optional<Plan> try_add(const Plan &plan, const std::string &id, const FunctionSpec &spec,
                            std::int64_t n, const ClusterSpec &cluster, Rng &rng) {
  const auto [lo, hi] = function_range(plan, id);
  const auto count = static_cast<std::int64_t>(hi - lo) + 1;
  const std::int64_t share = std::max<std::int64_t>(1, (n + count - 1) / count);

  const NodeUsage usage(cluster, plan);
  const int min_cores = min_cores_for_slots(spec, 1);
  std::vector<std::size_t> candidates;
  for (std::size_t node = 0; node < cluster.n_nodes; ++node) {
    if (usage.fits(node, min_cores, spec.mem_mb)) candidates.push_back(node);
  }
  if (candidates.empty()) return std::nullopt;
  const auto node = candidates[rng.uniform_index(candidates.size())];
  const int max_slots = static_cast<int>(
      std::min<std::int64_t>(share, parallel_slots(spec, usage.free_cores(node))));
  const auto slots = static_cast<int>(rng.uniform_int(1, std::max(1, max_slots)));
  const int cores = min_cores_for_slots(spec, slots);

  Plan out = plan;
  out.allocations.insert(out.allocations.begin() + static_cast<std::ptrdiff_t>(hi),
                         ContainerAlloc{id, node, cores, spec.mem_mb, 0, true});
  rebalance(out, lo, hi + 1, n);
  return out;
}

std::optional<Plan> try_remove(const Plan &plan, const std::string &id, const FunctionSpec &spec,
                               std::int64_t n, const ClusterSpec &cluster, Rng &rng) {
  const auto [lo, hi] = function_range(plan, id);
  if (hi - lo < 2) return std::nullopt;
  const std::size_t victim = lo + rng.uniform_index(hi - lo);

  std::int64_t worst_batches = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const auto &c = plan.allocations[i];
    worst_batches = std::max(worst_batches,
                             batch_count(c.assigned_requests, parallel_slots(spec, c.cores)));
  }

  Plan out = plan;
  out.allocations.erase(out.allocations.begin() + static_cast<std::ptrdiff_t>(victim));
  rebalance(out, lo, hi - 1, n);
  NodeUsage usage(cluster, out);
  for (std::size_t i = lo; i < hi - 1; ++i) {
    auto &c = out.allocations[i];
    if (worst_batches == 0 ||
        batch_count(c.assigned_requests, parallel_slots(spec, c.cores)) <= worst_batches) {
      continue;
    }
    const auto need_slots = static_cast<int>((c.assigned_requests + worst_batches - 1) / worst_batches);
    const int grow = std::min(min_cores_for_slots(spec, need_slots) - c.cores,
                              usage.free_cores(c.node_id));
    if (grow > 0) {
      c.cores += grow;
      usage.add(c.node_id, grow, 0);
    }
  }
  return out;
}

std::optional<Plan> try_shuffle(const Plan &plan, const std::string &id,
                                const ClusterSpec &cluster, Rng &rng) {
  const auto [lo, hi] = function_range(plan, id);
  if (hi == lo) return std::nullopt;
  const std::size_t which = lo + rng.uniform_index(hi - lo);
  const auto &moving = plan.allocations[which];

  NodeUsage usage(cluster, plan);
  usage.remove(moving.node_id, moving.cores, moving.mem_mb);
  std::vector<std::size_t> candidates;
  for (std::size_t node = 0; node < cluster.n_nodes; ++node) {
    if (node != moving.node_id && usage.fits(node, moving.cores, moving.mem_mb)) {
      candidates.push_back(node);
    }
  }
  if (candidates.empty()) return std::nullopt;
  Plan out = plan;
  out.allocations[which].node_id = candidates[rng.uniform_index(candidates.size())];
  return out;
}

// Builds a plan from per-function container groups chosen by `pick`, keeping
// each container on its node when it fits and moving the rest first-fit.
template <typename Pick>
std::optional<Plan> assemble(const EpochWorkload &workload, const ClusterSpec &cluster,
                             Pick &&pick) {
  Plan out;
  NodeUsage usage(cluster);
  std::vector<std::size_t> overflow;
  for (const auto &[id, n] : workload.arrivals) {
    for (const auto &c : pick(id)) {
      if (c.node_id < cluster.n_nodes && usage.fits(c.node_id, c.cores, c.mem_mb)) {
        usage.add(c.node_id, c.cores, c.mem_mb);
      } else {
        overflow.push_back(out.allocations.size());
      }
      out.allocations.push_back(c);
    }
  }
  for (auto idx : overflow) {
    auto &c = out.allocations[idx];
    bool placed = false;
    for (std::size_t node = 0; node < cluster.n_nodes && !placed; ++node) {
      if (usage.fits(node, c.cores, c.mem_mb)) {
        usage.add(node, c.cores, c.mem_mb);
        c.node_id = node;
        placed = true;
      }
    }
    if (!placed) return std::nullopt;
  }
  return out;
}

std::vector<ContainerAlloc> group_of(const Plan &plan, const std::string &id) {
  const auto [lo, hi] = function_range(plan, id);
  return {plan.allocations.begin() + static_cast<std::ptrdiff_t>(lo),
          plan.allocations.begin() + static_cast<std::ptrdiff_t>(hi)};
}

// Previous epoch's containers for functions that arrive again, requests
// re-split; everything else comes from `fill`.
std::optional<Plan> warm_start_plan(const Plan &previous, const Plan &fill,
                                    const EpochWorkload &workload, const ClusterSpec &cluster) {
  return assemble(workload, cluster, [&](const std::string &id) {
    std::vector<ContainerAlloc> group;
    for (const auto &c : previous.allocations) {
      if (c.function_id == id) group.push_back(c);
    }
    if (group.empty()) return group_of(fill, id);
    const auto shares = even_split(workload.count(id), group.size());
    for (std::size_t i = 0; i < group.size(); ++i) group[i].assigned_requests = shares[i];
    return group;
  });
}

ObjectiveVector fallback_norms(std::span<const PopulationMember> population) {
  ObjectiveVector out;
  for (const auto &m : population) {
    out.slo_violation_rate = std::max(out.slo_violation_rate, m.objectives.slo_violation_rate);
    out.carbon_g = std::max(out.carbon_g, m.objectives.carbon_g);
    out.water_l = std::max(out.water_l, m.objectives.water_l);
  }
  return out;
}

}  // namespace

void validate(const Weights &weights) {
  if (!(weights.slo >= 0.0 && weights.carbon >= 0.0 && weights.water >= 0.0)) {
    throw ConfigError("weights must be non-negative");
  }
  if (!(weights.slo > 0.0 || weights.carbon > 0.0 || weights.water > 0.0)) {
    throw ConfigError("at least one weight must be positive");
  }
}

double weighted_sum(const ObjectiveVector &obj, const Weights &weights,
                    const ObjectiveVector &norms) {
  if (!(norms.slo_violation_rate > 0.0 && norms.carbon_g > 0.0 && norms.water_l > 0.0)) {
    throw ConfigError("normalization components must be > 0");
  }
  return weights.slo * (obj.slo_violation_rate / norms.slo_violation_rate) +
         weights.carbon * (obj.carbon_g / norms.carbon_g) +
         weights.water * (obj.water_l / norms.water_l);
}

bool dominates(const ObjectiveVector &a, const ObjectiveVector &b) {
  const bool no_worse = a.slo_violation_rate <= b.slo_violation_rate &&
                        a.carbon_g <= b.carbon_g && a.water_l <= b.water_l;
  const bool better = a.slo_violation_rate < b.slo_violation_rate || a.carbon_g < b.carbon_g ||
                      a.water_l < b.water_l;
  return no_worse && better;
}

void validate(const SearchBudget &budget) {
  if (budget.population_size < 1) throw ConfigError("budget: population_size must be >= 1");
  if (!(budget.ls_fraction > 0.0 && budget.ls_fraction <= 1.0)) {
    throw ConfigError("budget: ls_fraction must lie in (0, 1]");
  }
}

bool ParetoArchive::insert(const Plan &plan, const ObjectiveVector &objectives) {
  const std::size_t id = offered_++;
  for (const auto &e : entries_) {
    if (e.objectives == objectives || dominates(e.objectives, objectives)) return false;
  }
  std::erase_if(entries_, [&](const ArchiveEntry &e) { return dominates(objectives, e.objectives); });
  entries_.push_back({id, plan, objectives});
  return true;
}

std::optional<Plan> try_move(MoveKind kind, const Plan &plan, const std::string &function_id,
                             const SpecTable &specs, const EpochWorkload &workload,
                             const ClusterSpec &cluster, Rng &rng) {
  const auto &spec = specs.at(function_id);
  const auto n = workload.count(function_id);
  switch (kind) {
    case MoveKind::kAdd:
      return try_add(plan, function_id, spec, n, cluster, rng);
    case MoveKind::kRemove:
      return try_remove(plan, function_id, spec, n, cluster, rng);
    case MoveKind::kShuffle:
      return try_shuffle(plan, function_id, cluster, rng);
  }
  return std::nullopt;
}

Plan local_move(const Plan &plan, const SpecTable &specs, const EpochWorkload &workload,
                const ClusterSpec &cluster, Rng &rng, MoveKind *applied) {
  if (workload.arrivals.empty()) return plan;
  auto it = workload.arrivals.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.uniform_index(workload.arrivals.size())));
  const std::string &id = it->first;
  const auto first = rng.uniform_index(3);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto kind = static_cast<MoveKind>((first + t) % 3);
    if (auto next = try_move(kind, plan, id, specs, workload, cluster, rng)) {
      if (applied != nullptr) *applied = kind;
      return std::move(*next);
    }
  }
  return plan;
}

PopulationMember local_search(PopulationMember member, std::size_t steps,
                              const Weights &weights, const ObjectiveVector &norms,
                              const EpochProblem &problem, Rng &rng, ParetoArchive *archive,
                              std::vector<double> *score_trace) {
  double score = weighted_sum(member.objectives, weights, norms);
  if (score_trace != nullptr) score_trace->push_back(score);
  for (std::size_t step = 0; step < steps; ++step) {
    Plan neighbor = local_move(member.plan, problem.specs, problem.workload, problem.cluster, rng);
    if (neighbor == member.plan) continue;
    const auto objectives = problem.evaluate(neighbor);
    if (archive != nullptr) archive->insert(neighbor, objectives);
    const double candidate = weighted_sum(objectives, weights, norms);
    if (candidate < score) {
      member.plan = std::move(neighbor);
      member.objectives = objectives;
      ++member.history_count;
      score = candidate;
      if (score_trace != nullptr) score_trace->push_back(score);
    }
  }
  return member;
}

std::vector<std::size_t> select_start_points(std::span<const PopulationMember> population,
                                             std::size_t k) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return population[a].history_count > population[b].history_count;
  });
  order.resize(std::min(k, order.size()));
  return order;
}

std::optional<Plan> crossover(const Plan &parent_a, const Plan &parent_b,
                              const EpochWorkload &workload, const ClusterSpec &cluster,
                              Rng &rng) {
  return assemble(workload, cluster, [&](const std::string &id) {
    return group_of(rng.coin() ? parent_a : parent_b, id);
  });
}

EaRoundResult ea_round(std::vector<PopulationMember> &population,
                       std::span<const std::size_t> searched, Rng &rng,
                       const EpochProblem &problem, ParetoArchive *archive) {
  EaRoundResult result;
  std::vector<std::size_t> unsearched;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (std::find(searched.begin(), searched.end(), i) == searched.end()) unsearched.push_back(i);
  }
  for (const auto idx : searched) {
    std::vector<std::size_t> pool = unsearched;
    if (pool.empty()) {
      for (std::size_t i = 0; i < population.size(); ++i) {
        if (i != idx) pool.push_back(i);
      }
    }
    if (pool.empty()) continue;
    const auto mate = pool[rng.uniform_index(pool.size())];
    auto child = crossover(population[idx].plan, population[mate].plan, problem.workload,
                           problem.cluster, rng);
    if (!child) continue;
    ++result.offspring;
    const auto objectives = problem.evaluate(*child);
    if (archive != nullptr) archive->insert(*child, objectives);
    for (std::size_t i = 0; i < population.size(); ++i) {
      if (dominates(objectives, population[i].objectives)) {
        population[i] = {std::move(*child), objectives, 0};
        result.replaced.push_back(i);
        break;
      }
    }
  }
  return result;
}

std::vector<NamedWeights> default_variants(const Weights &balanced) {
  return {{"sfcm-slo", Weights::slo_only()},
          {"sfcm-carbon", Weights::carbon_only()},
          {"sfcm-water", Weights::water_only()},
          {"sfcm-balance", balanced}};
}

const VariantChoice &OptimizeResult::variant(const std::string &name) const {
  for (const auto &v : variants) {
    if (v.name == name) return v;
  }
  throw UsageError("no variant named '" + name + "'");
}

const ArchiveEntry &OptimizeResult::selected(const std::string &name) const {
  return archive.entries().at(variant(name).archive_index);
}

ObjectiveVector guard_norms(ObjectiveVector norms) {
  for (double *v : {&norms.slo_violation_rate, &norms.carbon_g, &norms.water_l}) {
    if (!(*v > 0.0)) *v = kNormEpsilon;
  }
  return norms;
}

OptimizeResult optimize_epoch(const EpochProblem &problem, const SearchBudget &budget,
                              const OptimizeOptions &options) {
  validate(budget);
  if (options.local_search_weights) validate(*options.local_search_weights);
  for (const auto &v : options.variants) validate(v.weights);
  if (!options.local_search_weights && options.variants.empty()) {
    throw ConfigError("no local search weights and no variants");
  }

  Rng rng(budget.seed);
  OptimizeResult result;
  auto &population = result.population;
  population.reserve(budget.population_size);
  for (std::size_t i = 0; i < budget.population_size; ++i) {
    const auto seed = rng.next_u64();
    Plan plan = random_plan(problem.cluster, problem.specs, problem.workload, seed);
    if (i == 0 && budget.warm_start && problem.previous != nullptr) {
      if (auto warm = warm_start_plan(*problem.previous, plan, problem.workload, problem.cluster)) {
        plan = std::move(*warm);
      }
    }
    const auto objectives = problem.evaluate(plan);
    result.archive.insert(plan, objectives);
    population.push_back({std::move(plan), objectives, 0});
  }

  if (options.norms) {
    result.norms = guard_norms(*options.norms);
  } else {
    try {
      const Plan hybrid = hybrid_schedule(problem.workload, problem.specs, problem.cluster,
                                          problem.previous, options.baselines);
      result.norms = guard_norms(problem.evaluate(hybrid));
    } catch (const CapacityError &) {
      result.norms = guard_norms(fallback_norms(population));
    }
  }

  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(budget.ls_fraction *
                                            static_cast<double>(budget.population_size))),
      1, budget.population_size);
  std::vector<double> trace;
  for (std::size_t round = 0; round < budget.rounds; ++round) {
    const auto starts = select_start_points(population, k);
    for (std::size_t pos = 0; pos < starts.size(); ++pos) {
      const auto idx = starts[pos];
      trace.clear();
      const Weights &w =
          options.local_search_weights
              ? *options.local_search_weights
              : options.variants[(round + pos) % options.variants.size()].weights;
      population[idx] = local_search(std::move(population[idx]), budget.local_steps_per_round,
                                     w, result.norms, problem, rng,
                                     &result.archive,
                                     options.on_local_search ? &trace : nullptr);
      if (options.on_local_search) options.on_local_search(trace);
    }
    ea_round(population, starts, rng, problem, &result.archive);
  }

  const auto &entries = result.archive.entries();
  for (const auto &v : options.variants) {
    VariantChoice choice{v.name, v.weights, 0, 0.0};
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double s = weighted_sum(entries[i].objectives, v.weights, result.norms);
      if (i == 0 || s < choice.score) {
        choice.archive_index = i;
        choice.score = s;
      }
    }
    result.variants.push_back(std::move(choice));
  }
  return result;
}

}  // namespace sfcm
