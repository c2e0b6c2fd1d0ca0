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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracle/enumerate.hpp"
#include "oracle/slo_sim.hpp"
#include "sfcm/cluster.hpp"
#include "sfcm/errors.hpp"
#include "sfcm/harness.hpp"
#include "sfcm/optimizer.hpp"
#include "sfcm/report.hpp"
#include "sfcm/rng.hpp"
#include "sfcm/sustain.hpp"
#include "sfcm/workload.hpp"
#include "test_util.hpp"

namespace {

using namespace sfcm;
namespace fs = std::filesystem;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char *pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

EpochProblem oracle_problem(const oracle::Instance &inst, const SpecTable &specs) {
  return {specs, inst.workload, inst.cluster, inst.env, inst.epoch_length_s, nullptr};
}

// Random small epoch: 2 to 6 functions, 1 to 3 nodes. Epochs are short
// enough that some requests cannot finish, which gives real trade-offs.
struct RandomInstance {
  std::vector<FunctionSpec> functions;
  EpochWorkload workload;
  ClusterSpec cluster;
  SpecTable specs;
  double epoch_length_s = 900.0;
};

RandomInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  RandomInstance r;
  const auto n_fn = static_cast<std::size_t>(rng.uniform_int(2, 6));
  for (std::size_t i = 0; i < n_fn; ++i) {
    FunctionSpec f;
    f.id = "f" + std::to_string(i);
    f.runtime_s = rng.uniform_real(1.0, 120.0);
    f.deadline_s = f.runtime_s * rng.uniform_real(1.0, 4.0);
    f.mem_mb = 256;
    f.cpu_base_cores = rng.uniform_real(0.1, 2.0);
    f.cpu_per_request_cores = rng.uniform_real(0.2, 1.5);
    r.functions.push_back(f);
    r.workload.arrivals[f.id] = rng.uniform_int(1, 20);
  }
  r.cluster.n_nodes = static_cast<std::size_t>(rng.uniform_int(1, 3));
  r.cluster.node.cores = static_cast<int>(rng.uniform_int(8, 24));
  r.cluster.node.mem_mb = 8192;
  r.specs = SpecTable(r.functions);
  r.epoch_length_s = rng.uniform_real(60.0, 600.0);
  return r;
}

Verdict criterion1() {
  const auto inst = oracle::small_instance();
  const SpecTable specs(inst.functions);
  const auto all = oracle::enumerate_plans(inst);
  const auto front = oracle::true_front(all.objectives);
  const auto problem = oracle_problem(inst, specs);

  auto score = [&](std::uint64_t seed, std::size_t &covered, std::size_t &stray) {
    SearchBudget budget;
    budget.seed = seed;
    const auto result = optimize_epoch(problem, budget);
    covered = 0;
    stray = 0;
    for (const auto &f : front) {
      covered += std::any_of(result.archive.entries().begin(), result.archive.entries().end(),
                             [&](const auto &e) { return oracle::same_point(e.objectives, f); });
    }
    for (const auto &e : result.archive.entries()) {
      stray += std::none_of(front.begin(), front.end(),
                            [&](const auto &f) { return oracle::same_point(e.objectives, f); });
    }
  };

  std::size_t covered = 0, stray = 0;
  score(SearchBudget{}.seed, covered, stray);
  const bool pass = stray == 0 && static_cast<double>(covered) >= 0.9 * front.size();

  std::string per_seed;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    std::size_t c = 0, st = 0;
    score(s, c, st);
    per_seed += fmt("%s%zu", s == 1 ? "" : ",", c);
    if (st != 0) per_seed += "!";
  }
  return {pass, fmt("%zu plans, true front %zu points; default seed covers %zu, %zu off-front; "
                    "seeds 1-10 cover [%s]",
                    all.plans, front.size(), covered, stray, per_seed.c_str())};
}

Verdict criterion2() {
  const auto inst = oracle::small_instance();
  const SpecTable specs(inst.functions);
  const auto all = oracle::enumerate_plans(inst);
  ObjectiveVector mins{1e300, 1e300, 1e300};
  for (const auto &o : all.objectives) {
    mins.slo_violation_rate = std::min(mins.slo_violation_rate, o.slo_violation_rate);
    mins.carbon_g = std::min(mins.carbon_g, o.carbon_g);
    mins.water_l = std::min(mins.water_l, o.water_l);
  }
  const auto problem = oracle_problem(inst, specs);
  const std::vector<NamedWeights> variants{{"sfcm-slo", Weights::slo_only()},
                                           {"sfcm-carbon", Weights::carbon_only()},
                                           {"sfcm-water", Weights::water_only()}};
  // A zero minimum leaves no relative slack; the value must then be zero.
  auto within = [](double v, double min) { return v <= min * 1.05 + 1e-12; };
  int seeds_ok = 0;
  std::string lines;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    bool ok = true;
    for (const auto &v : variants) {
      // Same configuration the harness uses for that policy.
      SearchBudget budget;
      budget.seed = seed;
      OptimizeOptions options;
      options.local_search_weights = v.weights;
      options.variants = {v};
      const auto got = optimize_epoch(problem, budget, options).selected(v.name).objectives;
      const double value = v.weights.slo > 0 ? got.slo_violation_rate
                           : v.weights.carbon > 0 ? got.carbon_g
                                                  : got.water_l;
      const double min = v.weights.slo > 0 ? mins.slo_violation_rate
                         : v.weights.carbon > 0 ? mins.carbon_g
                                                : mins.water_l;
      ok = ok && within(value, min);
    }
    seeds_ok += ok;
  }
  return {seeds_ok >= 9, fmt("%d/10 seeds within 5%% on all three (minima %.4g, %.6g, %.6g)",
                             seeds_ok, mins.slo_violation_rate, mins.carbon_g, mins.water_l)};
}

Verdict criterion3() {
  const auto trace = generate_trace({});
  const std::vector<PolicyKind> policies{PolicyKind::kScore, PolicyKind::kHybrid,
                                         PolicyKind::kSfcmSlo, PolicyKind::kSfcmBalance};
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_horizon(trace, policies, {}, {}, {});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto &score = result.at(PolicyKind::kScore).aggregate;
  const auto &hybrid = result.at(PolicyKind::kHybrid).aggregate;
  const auto &slo = result.at(PolicyKind::kSfcmSlo).aggregate;
  const auto &bal = result.at(PolicyKind::kSfcmBalance).aggregate;
  const bool dominates_hybrid = bal.slo_rate <= hybrid.slo_rate && bal.carbon_g <= hybrid.carbon_g &&
                                bal.water_l <= hybrid.water_l;
  const bool slo_ok = slo.slo_rate <= score.slo_rate;
  return {dominates_hybrid && slo_ok,
          fmt("balance (%.4f, %.1f g, %.2f L) vs hybrid (%.4f, %.1f g, %.2f L); "
              "sfcm-slo %.4f vs score %.4f; %.1f s",
              bal.slo_rate, bal.carbon_g, bal.water_l, hybrid.slo_rate, hybrid.carbon_g,
              hybrid.water_l, slo.slo_rate, score.slo_rate, secs)};
}

Verdict criterion4() {
  std::size_t dominated_pairs = 0, archived = 0, instances = 0, skipped = 0;
  // Seeds whose workload cannot be placed at all are skipped, not counted.
  for (std::uint64_t seed = 1; instances < 100; ++seed) {
    const auto inst = random_instance(seed);
    const EnvironmentState env;
    const EpochProblem problem{inst.specs, inst.workload, inst.cluster, env, inst.epoch_length_s,
                               nullptr};
    SearchBudget budget;
    budget.seed = seed;
    OptimizeResult result;
    try {
      result = optimize_epoch(problem, budget);
    } catch (const CapacityError &) {
      ++skipped;
      continue;
    }
    ++instances;
    const auto &e = result.archive.entries();
    archived += e.size();
    for (const auto &a : e) {
      for (const auto &b : e) dominated_pairs += dominates(a.objectives, b.objectives);
    }
  }
  return {dominated_pairs == 0,
          fmt("%zu instances (%zu unplaceable skipped), %zu archived points, %zu dominated pairs",
              instances, skipped, archived, dominated_pairs)};
}

Verdict criterion5() {
  Rng rng(2026);
  std::size_t mismatches = 0;
  std::int64_t requests = 0;
  const double runtimes[] = {0.5, 1.0, 2.5, 7.0, 10.0, 33.3, 0.1};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FunctionSpec> fns;
    EpochWorkload w;
    Plan plan;
    std::int64_t budget = rng.uniform_int(0, 20);
    const auto n_fn = rng.uniform_int(1, 3);
    for (std::int64_t i = 0; i < n_fn && budget >= 0; ++i) {
      FunctionSpec f;
      f.id = "f" + std::to_string(i);
      f.runtime_s = rng.uniform_index(2) ? runtimes[rng.uniform_index(7)]
                                         : rng.uniform_real(0.1, 60.0);
      f.deadline_s = f.runtime_s * static_cast<double>(rng.uniform_int(1, 6));
      f.cpu_base_cores = 0.25 * static_cast<double>(rng.uniform_int(0, 4));
      f.cpu_per_request_cores = 0.25 * static_cast<double>(rng.uniform_int(1, 6));
      fns.push_back(f);
      const auto n = i + 1 == n_fn ? budget : rng.uniform_int(0, budget);
      budget -= n;
      if (n > 0) w.arrivals[f.id] = n;
      // Arbitrary (not necessarily even) split over 1 to 3 containers.
      const auto parts = rng.uniform_int(1, 3);
      std::int64_t left = n;
      for (std::int64_t p = 0; p < parts; ++p) {
        const auto share = p + 1 == parts ? left : rng.uniform_int(0, left);
        left -= share;
        const int lo = min_cores_for_slots(f, 1);
        const int cores = static_cast<int>(rng.uniform_int(lo, lo + 6));
        plan.allocations.push_back({f.id, 0, cores, f.mem_mb, share, rng.uniform_index(2) == 1});
      }
    }
    const SpecTable specs(fns);
    OverheadSpec overhead;
    overhead.cold_start_s = 0.5 * static_cast<double>(rng.uniform_int(0, 8));
    const double L = rng.uniform_index(3) ? 900.0 : rng.uniform_real(5.0, 200.0);
    const auto got = eval_slo(plan, specs, w, overhead, L, true);
    const auto want = oracle::simulate_slo(plan, specs, w, overhead, L);
    requests += want.total;
    bool same = got.violations == want.violations && got.total_requests == want.total &&
                got.completions.size() == want.completions.size();
    for (std::size_t c = 0; same && c < want.completions.size(); ++c) {
      auto a = got.completions[c];
      auto b = want.completions[c];
      same = a.size() == b.size();
      for (std::size_t i = 0; same && i < a.size(); ++i) same = close_rel(a[i], b[i], 1e-12);
    }
    mismatches += !same;
  }
  return {mismatches == 0,
          fmt("500 pairs, %lld requests, %zu mismatches", static_cast<long long>(requests),
              mismatches)};
}

Verdict criterion6() {
  TraceConfig cfg;
  cfg.epochs = 4;
  const auto trace = generate_trace(cfg);
  const SpecTable specs(trace.functions);
  const ClusterSpec cluster;
  double worst_sum = 0.0, worst_lin = 0.0;
  std::size_t checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto &w = trace.epochs[seed % trace.epochs.size()];
    const auto plan = random_plan(cluster, specs, w, seed);
    EnvironmentState env;
    const auto e = eval_energy(plan, specs, cluster, env, 900.0);
    const double parts = e.it_kwh + e.cooling_kwh + e.startup_kwh;
    worst_sum = std::max(worst_sum, std::abs(e.total_kwh - parts) / e.total_kwh);

    const double water = eval_water(e, env);
    const double carbon = eval_carbon(e, water, env);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    // Water: each rate term doubles with its rate.
    EnvironmentState w2 = env;
    w2.wue_l_per_kwh *= 2;
    w2.ewif_l_per_kwh *= 2;
    worst_lin = std::max(worst_lin, rel(eval_water(e, w2), 2 * water));
    EnvironmentState wue = env;
    wue.wue_l_per_kwh *= 2;
    worst_lin = std::max(worst_lin,
                         rel(eval_water(e, wue) - water, env.wue_l_per_kwh * e.it_kwh));
    EnvironmentState ewif = env;
    ewif.ewif_l_per_kwh *= 2;
    worst_lin = std::max(worst_lin,
                         rel(eval_water(e, ewif) - water, env.ewif_l_per_kwh * e.total_kwh));
    // Carbon: both rate parameters doubled doubles carbon; CI alone doubles
    // the electricity term.
    EnvironmentState c2 = env;
    c2.carbon_intensity_g_per_kwh *= 2;
    c2.carbon_per_liter_water_g *= 2;
    worst_lin = std::max(worst_lin, rel(eval_carbon(e, water, c2), 2 * carbon));
    EnvironmentState ci = env;
    ci.carbon_intensity_g_per_kwh *= 2;
    worst_lin = std::max(worst_lin, rel(eval_carbon(e, water, ci) - carbon,
                                        env.carbon_intensity_g_per_kwh * e.total_kwh));
    checks += 6;
  }
  return {worst_sum <= 1e-9 && worst_lin <= 1e-9,
          fmt("20 plans; worst total-vs-parts %.2e, worst linearity %.2e over %zu checks",
              worst_sum, worst_lin, checks)};
}

Verdict criterion7() {
  const auto root = testing::scratch_dir("acceptance_cli");
  auto run = [&](const std::string &name) {
    std::ostringstream out, err;
    const int code = cli::run({"sfcm", "run", "--seed", "7", "--out", (root / name).string()},
                              out, err);
    return code;
  };
  const int a = run("a");
  const int b = run("b");
  std::size_t files = 0, differ = 0;
  for (const auto &entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    ++files;
    const auto other = root / "b" / fs::relative(entry.path(), root / "a");
    differ += !fs::exists(other) || read_text_file(entry.path()) != read_text_file(other);
  }
  return {a == 0 && b == 0 && files > 0 && differ == 0,
          fmt("exit codes %d/%d, %zu CSV files compared, %zu differ", a, b, files, differ)};
}

Verdict criterion8() {
  std::size_t runs = 0, traces = 0, steps = 0, increases = 0;
  for (std::uint64_t seed = 1; runs < 50; ++seed) {
    const auto inst = random_instance(1000 + seed);
    const EnvironmentState env;
    const EpochProblem problem{inst.specs, inst.workload, inst.cluster, env, inst.epoch_length_s,
                               nullptr};
    SearchBudget budget;
    budget.seed = seed;
    OptimizeOptions options;
    options.on_local_search = [&](std::span<const double> trace) {
      ++traces;
      for (std::size_t i = 1; i < trace.size(); ++i) {
        ++steps;
        increases += trace[i] > trace[i - 1];
      }
    };
    try {
      optimize_epoch(problem, budget, options);
    } catch (const CapacityError &) {
      continue;
    }
    ++runs;
  }
  return {increases == 0 && traces > 0,
          fmt("%zu runs, %zu local searches, %zu accepted steps, %zu increases", runs, traces,
              steps, increases)};
}

Verdict criterion9() {
  const auto trace = generate_trace({});
  std::size_t short_count = 0;
  for (const auto &f : trace.functions) short_count += f.runtime_s < 30.0;
  const double fraction = static_cast<double>(short_count) / trace.functions.size();
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto &e : trace.epochs) {
    lo = std::min(lo, e.distinct_ids());
    hi = std::max(hi, e.distinct_ids());
  }
  const bool pass = trace.functions.size() == 424 && fraction >= 0.87 && fraction <= 0.93 &&
                    lo >= 13 && hi <= 62;
  return {pass, fmt("%zu functions, short fraction %.4f, distinct ids per epoch in [%zu, %zu]",
                    trace.functions.size(), fraction, lo, hi)};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char **argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
  };
  int failed = 0;
  for (const auto &[id, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", id, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
