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

#include "sfcm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "sfcm/errors.hpp"
#include "sfcm/rng.hpp"

namespace sfcm {
namespace {

struct PolicyEntry {
  PolicyKind kind;
  std::string_view name;
};

constexpr PolicyEntry kPolicies[] = {
    {PolicyKind::kScore, "score"},           {PolicyKind::kHybrid, "hybrid"},
    {PolicyKind::kSfcmSlo, "sfcm-slo"},       {PolicyKind::kSfcmCarbon, "sfcm-carbon"},
    {PolicyKind::kSfcmWater, "sfcm-water"},   {PolicyKind::kSfcmBalance, "sfcm-balance"},
};

Weights policy_weights(PolicyKind policy, const Weights &balance) {
  switch (policy) {
    case PolicyKind::kSfcmSlo:
      return Weights::slo_only();
    case PolicyKind::kSfcmCarbon:
      return Weights::carbon_only();
    case PolicyKind::kSfcmWater:
      return Weights::water_only();
    default:
      return balance;
  }
}

EpochRecord failed_epoch(std::size_t epoch, const EpochWorkload &workload, const SpecTable &specs,
                         const ClusterSpec &cluster, const EnvironmentState &env,
                         double epoch_length_s, const Plan *previous, std::string why) {
  EpochRecord rec;
  rec.epoch = epoch;
  rec.failed = true;
  rec.failure = std::move(why);
  rec.arrivals = workload.total_arrivals();
  rec.violations = rec.arrivals;
  const Plan empty;
  const auto retired = retired_containers(empty, previous);
  const auto energy = eval_energy(empty, specs, cluster, env, epoch_length_s, retired);
  const double water = eval_water(energy, env);
  rec.objectives = {rec.arrivals > 0 ? 1.0 : 0.0, eval_carbon(energy, water, env), water};
  return rec;
}

PolicyResult run_policy(PolicyKind policy, const Trace &trace, std::size_t epochs,
                        const SpecTable &specs, const ClusterSpec &cluster,
                        const EnvSchedule &env, const HorizonOptions &options,
                        std::ostringstream &log) {
  PolicyResult result;
  result.policy = policy;
  std::optional<Plan> previous;
  const auto policy_stream = static_cast<std::uint64_t>(policy) + 1;

  for (std::size_t e = 0; e < epochs; ++e) {
    const auto &workload = trace.epochs[e];
    const auto &state = env.at(e);
    const Plan *prev = previous ? &*previous : nullptr;
    const EpochProblem problem{specs, workload, cluster, state, options.epoch_length_s, prev};
    try {
      Plan plan;
      if (policy == PolicyKind::kScore) {
        plan = score_schedule(workload, specs, cluster, prev, options.baselines);
      } else if (policy == PolicyKind::kHybrid) {
        plan = hybrid_schedule(workload, specs, cluster, prev, options.baselines);
      } else {
        SearchBudget budget = options.budget;
        budget.seed = derive_seed(options.budget.seed, policy_stream * 1000003ULL + e);
        OptimizeOptions opt;
        const Weights w = policy_weights(policy, options.balance);
        opt.local_search_weights = w;
        opt.variants = {{std::string(policy_name(policy)), w}};
        opt.baselines = options.baselines;
        auto out = optimize_epoch(problem, budget, opt);
        plan = out.selected(std::string(policy_name(policy))).plan;
        result.archives.push_back(out.archive.entries());
        result.norms.push_back(out.norms);
      }
      const auto ev = evaluate_detailed(plan, specs, workload, cluster, state,
                                        options.epoch_length_s, prev);
      EpochRecord rec;
      rec.epoch = workload.epoch_index;
      rec.objectives = ev.objectives;
      rec.violations = ev.slo.violations;
      rec.arrivals = ev.slo.total_requests;
      rec.plan = ev.plan;
      previous = ev.plan;
      result.epochs.push_back(std::move(rec));
    } catch (const CapacityError &err) {
      log << "ERROR policy " << policy_name(policy) << " epoch " << e
          << " failed (capacity): " << err.what() << '\n';
      result.epochs.push_back(failed_epoch(workload.epoch_index, workload, specs, cluster, state,
                                           options.epoch_length_s, prev, err.what()));
      if (is_sfcm(policy)) {
        result.archives.emplace_back();
        result.norms.emplace_back();
      }
      previous = Plan{};
    }
  }
  result.aggregate = aggregate(result.epochs);
  return result;
}

}  // namespace

std::string_view policy_name(PolicyKind policy) {
  for (const auto &p : kPolicies) {
    if (p.kind == policy) return p.name;
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (const auto &p : kPolicies) {
    if (p.name == name) return p.kind;
  }
  throw UsageError("unknown policy '" + std::string(name) +
                   "' (expected score, hybrid, sfcm-slo, sfcm-carbon, sfcm-water, sfcm-balance)");
}

std::vector<PolicyKind> parse_policy_list(std::string_view names) {
  std::vector<PolicyKind> out;
  std::size_t start = 0;
  while (start <= names.size()) {
    const auto comma = names.find(',', start);
    const auto token =
        names.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const auto policy = parse_policy(token);
    if (std::find(out.begin(), out.end(), policy) != out.end()) {
      throw UsageError("policy '" + std::string(token) + "' listed twice");
    }
    out.push_back(policy);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool is_sfcm(PolicyKind policy) {
  return policy != PolicyKind::kScore && policy != PolicyKind::kHybrid;
}

std::vector<PolicyKind> all_policies() {
  std::vector<PolicyKind> out;
  for (const auto &p : kPolicies) out.push_back(p.kind);
  return out;
}

const PolicyResult &HorizonResult::at(PolicyKind policy) const {
  for (const auto &p : policies) {
    if (p.policy == policy) return p;
  }
  throw UsageError("policy '" + std::string(policy_name(policy)) + "' was not run");
}

std::size_t epoch_count(double horizon_s, double epoch_length_s) {
  if (!(epoch_length_s > 0.0) || !(horizon_s >= 0.0)) {
    throw ConfigError("horizon and epoch length must be positive");
  }
  return static_cast<std::size_t>(std::floor(horizon_s / epoch_length_s));
}

AggregateObjectives aggregate(std::span<const EpochRecord> epochs) {
  AggregateObjectives agg;
  for (const auto &e : epochs) {
    agg.violations += e.violations;
    agg.arrivals += e.arrivals;
    agg.carbon_g += e.objectives.carbon_g;
    agg.water_l += e.objectives.water_l;
  }
  agg.slo_rate = agg.arrivals == 0 ? 0.0
                                   : static_cast<double>(agg.violations) /
                                         static_cast<double>(agg.arrivals);
  return agg;
}

HorizonResult run_horizon(const Trace &trace, std::span<const PolicyKind> policies,
                          const ClusterSpec &cluster, const EnvSchedule &env,
                          const HorizonOptions &options) {
  if (trace.epochs.empty()) throw ConfigError("trace has no epochs");
  validate(cluster);
  for (const auto &s : env.states) validate(s);
  validate(options.budget);

  std::size_t epochs = trace.epochs.size();
  std::ostringstream head;
  if (options.horizon_s) {
    const auto n = epoch_count(*options.horizon_s, options.epoch_length_s);
    const double tail = *options.horizon_s - static_cast<double>(n) * options.epoch_length_s;
    if (tail > 0.0) head << "WARN horizon tail of " << tail << " s ignored\n";
    epochs = std::min(epochs, n);
  }
  if (options.max_epochs) epochs = std::min(epochs, *options.max_epochs);
  if (epochs < trace.epochs.size()) {
    head << "INFO running " << epochs << " of " << trace.epochs.size() << " trace epochs\n";
  }
  if (!env.covers(epochs)) {
    throw ConfigError("env schedule covers " + std::to_string(env.states.size()) +
                      " epochs, need " + std::to_string(epochs));
  }
  const SpecTable specs(trace.functions);

  HorizonResult result;
  result.policies.resize(policies.size());
  std::vector<std::ostringstream> logs(policies.size());
  std::vector<std::exception_ptr> errors(policies.size());
  auto work = [&](std::size_t i) {
    try {
      result.policies[i] =
          run_policy(policies[i], trace, epochs, specs, cluster, env, options, logs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (options.parallel && policies.size() > 1) {
    std::vector<std::thread> threads;
    threads.reserve(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i) threads.emplace_back(work, i);
    for (auto &t : threads) t.join();
  } else {
    for (std::size_t i = 0; i < policies.size(); ++i) work(i);
  }

  if (options.log != nullptr) {
    *options.log << head.str();
    for (auto &l : logs) *options.log << l.str();
  }
  for (auto &err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return result;
}

std::vector<std::size_t> pareto_front_indices(std::span<const ObjectiveVector> points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j], points[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<ObjectiveVector> pareto_front(std::span<const ObjectiveVector> points) {
  std::vector<ObjectiveVector> out;
  for (auto i : pareto_front_indices(points)) out.push_back(points[i]);
  return out;
}

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::kSlo:
      return "slo";
    case Axis::kCarbon:
      return "carbon";
    case Axis::kWater:
      return "water";
  }
  return "unknown";
}

Axis parse_axis(std::string_view name) {
  if (name == "slo") return Axis::kSlo;
  if (name == "carbon") return Axis::kCarbon;
  if (name == "water") return Axis::kWater;
  throw UsageError("unknown axis '" + std::string(name) + "' (expected slo, carbon, water)");
}

double axis_value(const ObjectiveVector &v, Axis axis) {
  switch (axis) {
    case Axis::kSlo:
      return v.slo_violation_rate;
    case Axis::kCarbon:
      return v.carbon_g;
    case Axis::kWater:
      return v.water_l;
  }
  return 0.0;
}

std::vector<ProjectedPoint> project_front(std::span<const ObjectiveVector> front, Axis x,
                                          Axis y) {
  std::vector<ProjectedPoint> pts;
  pts.reserve(front.size());
  for (std::size_t i = 0; i < front.size(); ++i) {
    pts.push_back({i, axis_value(front[i], x), axis_value(front[i], y)});
  }
  std::vector<ProjectedPoint> out;
  for (const auto &p : pts) {
    const bool dominated = std::any_of(pts.begin(), pts.end(), [&](const ProjectedPoint &q) {
      return q.x <= p.x && q.y <= p.y && (q.x < p.x || q.y < p.y);
    });
    if (!dominated) out.push_back(p);
  }
  return out;
}

}  // namespace sfcm
