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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfcm/baselines.hpp"
#include "sfcm/cluster.hpp"
#include "sfcm/rng.hpp"
#include "sfcm/sustain.hpp"
#include "sfcm/workload.hpp"

namespace sfcm {

/// Non-negative objective weights; at least one must be positive.
struct Weights {
  double slo = 1.0;
  double carbon = 1.0;
  double water = 1.0;

  static Weights balanced() { return {1.0, 1.0, 1.0}; }
  static Weights slo_only() { return {1.0, 0.0, 0.0}; }
  static Weights carbon_only() { return {0.0, 1.0, 0.0}; }
  static Weights water_only() { return {0.0, 0.0, 1.0}; }

  bool operator==(const Weights &) const = default;
};

void validate(const Weights &weights);

/// sum_i w_i * obj_i / norms_i; lower is better. ConfigError if any norm <= 0.
double weighted_sum(const ObjectiveVector &obj, const Weights &weights,
                    const ObjectiveVector &norms);

/// Pareto dominance under minimization.
bool dominates(const ObjectiveVector &a, const ObjectiveVector &b);

struct SearchBudget {
  std::size_t population_size = 5;
  std::size_t local_steps_per_round = 50;
  std::size_t rounds = 40;
  double ls_fraction = 0.4;
  std::uint64_t seed = 7;
  bool warm_start = false;  // seed one member from the previous epoch's plan

  bool operator==(const SearchBudget &) const = default;
};

void validate(const SearchBudget &budget);

struct PopulationMember {
  Plan plan;
  ObjectiveVector objectives;
  std::size_t history_count = 0;  // accepted local moves since slot was (re)filled
};

/// Everything needed to score a plan for one epoch.
struct EpochProblem {
  const SpecTable &specs;
  const EpochWorkload &workload;
  const ClusterSpec &cluster;
  const EnvironmentState &env;
  double epoch_length_s;
  const Plan *previous = nullptr;

  ObjectiveVector evaluate(const Plan &plan) const {
    return sfcm::evaluate(plan, specs, workload, cluster, env, epoch_length_s, previous);
  }
};

struct ArchiveEntry {
  std::size_t plan_id;  // evaluation sequence number
  Plan plan;
  ObjectiveVector objectives;
};

/// Mutually non-dominated set of every plan offered to it. An offer equal to
/// or dominated by a member is dropped; members it dominates are evicted.
class ParetoArchive {
 public:
  bool insert(const Plan &plan, const ObjectiveVector &objectives);
  const std::vector<ArchiveEntry> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t offered() const { return offered_; }

 private:
  std::vector<ArchiveEntry> entries_;
  std::size_t offered_ = 0;
};

enum class MoveKind { kAdd = 0, kRemove = 1, kShuffle = 2 };

/// Applies one move of `kind` to `function_id`'s container group.
///
/// - kAdd: one container on a uniformly chosen node with room for a
///   single-slot container, sized for a uniform slot count between 1 and the
///   smaller of its post-rebalance share and what the node's free cores
///   allow; the group's requests are re-split evenly.
/// - kRemove: drops a uniformly chosen container (needs >= 2), re-splits the
///   requests over the siblings, and grows each sibling by the fewest cores
///   that keep its batch count at or below the group's previous maximum,
///   limited by spare node capacity.
/// - kShuffle: moves a uniformly chosen container to a uniformly chosen other
///   node with room.
///
/// Returns nullopt when the move cannot produce a feasible neighbor.
std::optional<Plan> try_move(MoveKind kind, const Plan &plan,
                             const std::string &function_id, const SpecTable &specs,
                             const EpochWorkload &workload, const ClusterSpec &cluster,
                             Rng &rng);

/// Draws a function id, then a move kind, all uniformly; falls through
/// add -> remove -> shuffle -> add (cyclically) on degenerate draws and
/// returns the input plan if no move applies.
Plan local_move(const Plan &plan, const SpecTable &specs, const EpochWorkload &workload,
                const ClusterSpec &cluster, Rng &rng, MoveKind *applied = nullptr);

/// Greedy descent: each step draws one neighbor and keeps it iff its weighted
/// sum is strictly lower. Every evaluated neighbor is offered to `archive`.
/// `score_trace`, when given, receives the starting score followed by the
/// score of every accepted neighbor.
PopulationMember local_search(PopulationMember member, std::size_t steps,
                              const Weights &weights, const ObjectiveVector &norms,
                              const EpochProblem &problem, Rng &rng,
                              ParetoArchive *archive = nullptr,
                              std::vector<double> *score_trace = nullptr);

/// Indices of the k members with the highest history_count, ties to the
/// lower index, in selection order.
std::vector<std::size_t> select_start_points(std::span<const PopulationMember> population,
                                             std::size_t k);

/// Per function id, inherits the whole container group of parent a or b with
/// one fair coin flip each (in workload id order). Containers that overflow
/// their node are moved first-fit in node index order; nullopt if that fails.
std::optional<Plan> crossover(const Plan &parent_a, const Plan &parent_b,
                              const EpochWorkload &workload, const ClusterSpec &cluster,
                              Rng &rng);

struct EaRoundResult {
  std::size_t offspring = 0;
  std::vector<std::size_t> replaced;  // population slots, in replacement order
};

/// Pairs each searched member with a uniformly drawn unsearched one, breeds
/// one offspring per pair, and lets it replace the first member (by index) it
/// dominates, resetting that slot's history_count.
EaRoundResult ea_round(std::vector<PopulationMember> &population,
                       std::span<const std::size_t> searched, Rng &rng,
                       const EpochProblem &problem, ParetoArchive *archive = nullptr);

struct NamedWeights {
  std::string name;
  Weights weights;
};

/// SLO-only, carbon-only, water-only and balanced selections.
std::vector<NamedWeights> default_variants(const Weights &balanced = Weights::balanced());

struct OptimizeOptions {
  // Acceptance weights for every local search. When absent, successive
  // searches cycle through the variant weights.
  std::optional<Weights> local_search_weights;
  std::vector<NamedWeights> variants = default_variants();
  // Normalization divisors; derived from the HYBRID baseline when absent.
  std::optional<ObjectiveVector> norms;
  BaselineOptions baselines;
  std::function<void(std::span<const double>)> on_local_search;
};

struct VariantChoice {
  std::string name;
  Weights weights;
  std::size_t archive_index = 0;
  double score = 0.0;
};

struct OptimizeResult {
  ParetoArchive archive;
  ObjectiveVector norms;
  std::vector<PopulationMember> population;
  std::vector<VariantChoice> variants;

  const VariantChoice &variant(const std::string &name) const;
  const ArchiveEntry &selected(const std::string &name) const;
};

/// Replaces zero normalization components with 1e-9.
ObjectiveVector guard_norms(ObjectiveVector norms);

/// One epoch of the hybrid memetic search.
///
/// Random draws come from a single generator seeded with budget.seed, in this
/// order: one seed per initial member (consumed by random_plan), then per
/// round the local-search steps of each selected member (function id, move
/// kind, move internals), then the EA pairings and crossover coins.
OptimizeResult optimize_epoch(const EpochProblem &problem, const SearchBudget &budget,
                              const OptimizeOptions &options = {});

}  // namespace sfcm
