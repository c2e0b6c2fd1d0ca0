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


#include <set>

#include "doctest.h"
#include "sfcm/baselines.hpp"
#include "sfcm/errors.hpp"
#include "sfcm/sustain.hpp"

namespace {

sfcm::FunctionSpec short_fn(const std::string &id) { return {id, 5.0, 15.0, 256, 0.5, 0.5}; }
sfcm::FunctionSpec long_fn(const std::string &id) { return {id, 60.0, 180.0, 512, 1.0, 0.5}; }

sfcm::ClusterSpec nodes(std::size_t n) {
  sfcm::ClusterSpec c;
  c.n_nodes = n;
  return c;
}

}  // namespace

TEST_CASE("least_allocated_node") {
  const auto cluster = nodes(3);
  sfcm::NodeUsage usage(cluster);
  CHECK(sfcm::least_allocated_node(usage, cluster, 1, 1) == 0);
  usage.add(0, 64, 0);
  CHECK(sfcm::least_allocated_node(usage, cluster, 1, 1) == 1);
  usage.add(1, 64, 0);
  usage.add(2, 10, 0);
  CHECK(sfcm::least_allocated_node(usage, cluster, 1, 1) == 2);
  CHECK_FALSE(sfcm::least_allocated_node(usage, cluster, 200, 1));
}

TEST_CASE("SCORE sizing and placement") {
  const sfcm::SpecTable specs({short_fn("f")});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 5}};
  const auto cluster = nodes(4);
  const auto plan = sfcm::score_schedule(w, specs, cluster, nullptr);
  REQUIRE(plan.allocations.size() == 2);
  CHECK(plan.allocations[0].assigned_requests == 3);
  CHECK(plan.allocations[1].assigned_requests == 2);
  CHECK(plan.allocations[0].node_id == 0);
  CHECK(plan.allocations[1].node_id == 1);
  for (const auto &c : plan.allocations) {
    CHECK(sfcm::parallel_slots(specs.at("f"), c.cores) >= 4);
    CHECK(c.is_new);
  }
  CHECK(sfcm::feasible(plan, cluster, w, specs).ok());
  CHECK(plan == sfcm::score_schedule(w, specs, cluster, nullptr));

  w.arrivals = {{"f", 1}};
  const auto single = sfcm::score_schedule(w, specs, cluster, nullptr);
  REQUIRE(single.allocations.size() == 1);
  CHECK(single.allocations[0].node_id == 0);
}

TEST_CASE("SCORE capacity error and option checks") {
  auto cluster = nodes(1);
  cluster.node.cores = 2;
  const sfcm::SpecTable specs({short_fn("f")});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 4}};
  CHECK_THROWS_AS(sfcm::score_schedule(w, specs, cluster, nullptr), sfcm::CapacityError);
  sfcm::BaselineOptions bad;
  bad.target_batch = 0;
  CHECK_THROWS_AS(sfcm::score_schedule(w, specs, nodes(1), nullptr, bad), sfcm::ConfigError);
}

TEST_CASE("HYBRID equals SCORE on short functions") {
  const sfcm::SpecTable specs({short_fn("a"), short_fn("b"), short_fn("c")});
  sfcm::EpochWorkload w;
  w.arrivals = {{"a", 9}, {"b", 1}, {"c", 4}};
  const auto cluster = nodes(3);
  const auto score = sfcm::score_schedule(w, specs, cluster, nullptr);
  CHECK(sfcm::hybrid_schedule(w, specs, cluster, nullptr) == score);
  CHECK(sfcm::hybrid_schedule(w, specs, cluster, &score) == score);
}

TEST_CASE("HYBRID keeps long-running containers warm") {
  const sfcm::SpecTable specs({long_fn("L"), short_fn("s")});
  const auto cluster = nodes(2);
  const sfcm::EnvironmentState env;
  sfcm::EpochWorkload e1;
  e1.arrivals = {{"L", 2}, {"s", 2}};
  sfcm::EpochWorkload e2;
  e2.epoch_index = 1;
  e2.arrivals = {{"L", 3}, {"s", 2}};

  const auto p1 = sfcm::hybrid_schedule(e1, specs, cluster, nullptr);
  const auto d1 = sfcm::evaluate_detailed(p1, specs, e1, cluster, env, 900.0, nullptr);
  const auto p2 = sfcm::hybrid_schedule(e2, specs, cluster, &d1.plan);
  const auto d2 = sfcm::evaluate_detailed(p2, specs, e2, cluster, env, 900.0, &d1.plan);
  for (const auto &c : d1.plan.allocations) CHECK(c.is_new);
  for (const auto &c : d2.plan.allocations) {
    if (c.function_id == "L") CHECK_FALSE(c.is_new);
  }

  // An idle epoch still carries the long function's container.
  sfcm::EpochWorkload e3;
  e3.epoch_index = 2;
  e3.arrivals = {{"s", 1}};
  const auto p3 = sfcm::hybrid_schedule(e3, specs, cluster, &d2.plan);
  std::size_t kept = 0;
  for (const auto &c : p3.allocations) {
    if (c.function_id == "L") {
      ++kept;
      CHECK(c.assigned_requests == 0);
    }
  }
  CHECK(kept == 1);
  CHECK(sfcm::feasible(p3, cluster, e3, specs).ok());
  const auto idle = sfcm::eval_energy(p3, specs, cluster, env, 900.0);
  sfcm::Plan without_long;
  for (const auto &c : p3.allocations) {
    if (c.function_id != "L") without_long.allocations.push_back(c);
  }
  const auto lean = sfcm::eval_energy(without_long, specs, cluster, env, 900.0);
  CHECK(idle.it_kwh > lean.it_kwh);

  // Growth happens only when SCORE sizing asks for more containers.
  sfcm::EpochWorkload e4;
  e4.arrivals = {{"L", 9}};
  const auto p4 = sfcm::hybrid_schedule(e4, specs, cluster, &p3);
  CHECK(p4.allocations.size() == 3);
  CHECK(sfcm::hybrid_schedule(e4, specs, cluster, &p4).allocations.size() == 3);
}

TEST_CASE("HYBRID persistence is monotone over a trace") {
  sfcm::TraceConfig cfg;
  cfg.n_function_ids = 60;
  cfg.epochs = 6;
  cfg.min_ids_per_epoch = 10;
  cfg.max_ids_per_epoch = 30;
  const auto trace = sfcm::generate_trace(cfg);
  const sfcm::SpecTable specs(trace.functions);
  const sfcm::ClusterSpec cluster;
  sfcm::Plan previous;
  bool first = true;
  for (const auto &epoch : trace.epochs) {
    const auto plan = sfcm::hybrid_schedule(epoch, specs, cluster, first ? nullptr : &previous);
    CHECK(sfcm::feasible(plan, cluster, epoch, specs).ok());
    if (!first) {
      // Every long container of the previous plan is still there.
      std::multiset<std::pair<std::string, std::size_t>> now;
      for (const auto &c : plan.allocations) now.insert({c.function_id, c.node_id});
      for (const auto &c : previous.allocations) {
        if (specs.at(c.function_id).runtime_s < 30.0) continue;
        const auto it = now.find({c.function_id, c.node_id});
        REQUIRE(it != now.end());
        now.erase(it);
      }
    }
    previous = plan;
    first = false;
  }
}
