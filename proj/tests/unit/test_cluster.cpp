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


#include <algorithm>

#include "doctest.h"
#include "sfcm/cluster.hpp"
#include "sfcm/errors.hpp"
#include "sfcm/workload.hpp"

namespace {

sfcm::FunctionSpec spec(const std::string &id, double base = 0.5, double per = 0.5,
                        std::int64_t mem = 256) {
  return {id, 10.0, 30.0, mem, base, per};
}

bool has_kind(const sfcm::FeasibilityReport &r, sfcm::Violation::Kind kind) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const auto &v) { return v.kind == kind; });
}

}  // namespace

TEST_CASE("slot arithmetic") {
  const auto f = spec("f", 0.5, 0.5);
  CHECK(sfcm::parallel_slots(f, 1) == 1);
  CHECK(sfcm::parallel_slots(f, 2) == 3);
  CHECK(sfcm::parallel_slots(f, 0) == 0);
  CHECK(sfcm::min_cores_for_slots(f, 1) == 1);
  CHECK(sfcm::min_cores_for_slots(f, 3) == 2);
  CHECK(sfcm::min_cores_for_slots(f, 4) == 3);

  // Decimal fractions must round-trip.
  const auto g = spec("g", 0.1, 0.1);
  for (int s = 1; s <= 200; ++s) {
    const int c = sfcm::min_cores_for_slots(g, s);
    CHECK(sfcm::parallel_slots(g, c) >= s);
    CHECK(sfcm::parallel_slots(g, c - 1) < s);
  }

  CHECK(sfcm::batch_count(0, 3) == 0);
  CHECK(sfcm::batch_count(5, 2) == 3);
  CHECK(sfcm::batch_count(6, 2) == 3);
  CHECK(sfcm::even_split(5, 2) == std::vector<std::int64_t>{3, 2});
  CHECK(sfcm::even_split(6, 3) == std::vector<std::int64_t>{2, 2, 2});
  CHECK(sfcm::even_split(2, 3) == std::vector<std::int64_t>{1, 1, 0});
}

TEST_CASE("feasible names the overloaded node") {
  sfcm::ClusterSpec cluster;
  cluster.n_nodes = 2;
  const sfcm::SpecTable specs({spec("f")});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 2}};
  sfcm::Plan plan;
  plan.allocations = {{"f", 1, 70, 256, 1, true}, {"f", 1, 60, 256, 1, true}};
  const auto report = sfcm::feasible(plan, cluster, w, specs);
  REQUIRE_FALSE(report.ok());
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == sfcm::Violation::Kind::kNodeCores);
  CHECK(report.violations[0].node == 1);
  CHECK(report.summary().find("node 1") != std::string::npos);
  CHECK(report.summary().find("130") != std::string::npos);
}

TEST_CASE("feasible names the function that loses requests") {
  sfcm::ClusterSpec cluster;
  const sfcm::SpecTable specs({spec("f"), spec("g")});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 5}, {"g", 1}};
  sfcm::Plan plan;
  plan.allocations = {{"f", 0, 2, 256, 4, true}, {"g", 0, 1, 256, 1, true}};
  const auto report = sfcm::feasible(plan, cluster, w, specs);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == sfcm::Violation::Kind::kConservation);
  CHECK(report.violations[0].function_id == "f");
  CHECK(report.summary().find("'f'") != std::string::npos);
}

TEST_CASE("feasible catches each invariant") {
  sfcm::ClusterSpec cluster;
  cluster.n_nodes = 1;
  cluster.node.mem_mb = 1000;
  const sfcm::SpecTable specs({spec("f", 1.5, 0.5, 600)});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 1}};

  sfcm::Plan plan;
  plan.allocations = {{"f", 0, 1, 600, 1, true}};
  CHECK(has_kind(sfcm::feasible(plan, cluster, w, specs), sfcm::Violation::Kind::kNoSlots));

  plan.allocations = {{"f", 3, 2, 600, 1, true}};
  CHECK(has_kind(sfcm::feasible(plan, cluster, w, specs), sfcm::Violation::Kind::kBadNode));

  plan.allocations = {{"f", 0, 2, 512, 1, true}};
  CHECK(has_kind(sfcm::feasible(plan, cluster, w, specs),
                 sfcm::Violation::Kind::kMemoryMismatch));

  plan.allocations = {{"f", 0, 2, 600, 2, true}, {"f", 0, 2, 600, -1, true}};
  const auto r = sfcm::feasible(plan, cluster, w, specs);
  CHECK(has_kind(r, sfcm::Violation::Kind::kNegativeRequests));
  CHECK(has_kind(r, sfcm::Violation::Kind::kNodeMemory));

  plan.allocations = {{"f", 0, 2, 600, 1, true}, {"ghost", 0, 1, 1, 0, true}};
  CHECK(has_kind(sfcm::feasible(plan, cluster, w, specs),
                 sfcm::Violation::Kind::kUnknownFunction));

  plan.allocations = {{"f", 0, 2, 600, 1, true}};
  CHECK(sfcm::feasible(plan, cluster, w, specs).ok());
}

TEST_CASE("diff_new_containers matches multiset-wise") {
  sfcm::Plan prev;
  prev.allocations = {{"f", 0, 1, 256, 1, true}, {"f", 0, 1, 256, 1, true}};
  sfcm::Plan next;
  next.allocations = {{"f", 0, 1, 256, 1, true},
                      {"f", 0, 1, 256, 1, true},
                      {"f", 0, 1, 256, 1, true}};
  const auto diffed = sfcm::diff_new_containers(next, &prev);
  const auto n_new = std::count_if(diffed.allocations.begin(), diffed.allocations.end(),
                                   [](const auto &c) { return c.is_new; });
  CHECK(n_new == 1);
  CHECK_FALSE(diffed.allocations[0].is_new);
  CHECK(diffed.allocations[2].is_new);

  // A different node does not count.
  next.allocations = {{"f", 1, 1, 256, 1, true}};
  CHECK(sfcm::diff_new_containers(next, &prev).allocations[0].is_new);
  CHECK(sfcm::retired_containers(next, &prev).size() == 2);
  CHECK(sfcm::retired_containers(next, nullptr).empty());

  // Without a previous plan everything is new.
  for (const auto &c : sfcm::diff_new_containers(prev, nullptr).allocations) CHECK(c.is_new);
}

TEST_CASE("function_range") {
  sfcm::Plan plan;
  plan.allocations = {{"a", 0, 1, 1, 1, true}, {"c", 0, 1, 1, 1, true}, {"c", 0, 1, 1, 1, true}};
  CHECK(sfcm::function_range(plan, "c") == std::pair<std::size_t, std::size_t>{1, 3});
  CHECK(sfcm::function_range(plan, "a") == std::pair<std::size_t, std::size_t>{0, 1});
  const auto b = sfcm::function_range(plan, "b");
  CHECK(b.first == 1);
  CHECK(b.second == 1);
}

TEST_CASE("random_plan on the smallest instance") {
  sfcm::ClusterSpec cluster;
  cluster.n_nodes = 1;
  const sfcm::SpecTable specs({spec("f")});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 1}};
  const auto plan = sfcm::random_plan(cluster, specs, w, 42);
  REQUIRE(plan.allocations.size() == 1);
  const auto &c = plan.allocations[0];
  CHECK(c.function_id == "f");
  CHECK(c.node_id == 0);
  CHECK(c.assigned_requests == 1);
  CHECK(c.cores == sfcm::min_cores_for_slots(specs.at("f"), 1));
  CHECK(sfcm::feasible(plan, cluster, w, specs).ok());
}

TEST_CASE("random_plan is feasible and deterministic on a full epoch") {
  sfcm::TraceConfig cfg;
  cfg.epochs = 4;
  cfg.min_ids_per_epoch = 62;
  cfg.max_ids_per_epoch = 62;
  const auto trace = sfcm::generate_trace(cfg);
  const sfcm::SpecTable specs(trace.functions);
  const sfcm::ClusterSpec cluster;  // 50 nodes
  for (const auto &epoch : trace.epochs) {
    REQUIRE(epoch.distinct_ids() == 62);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto plan = sfcm::random_plan(cluster, specs, epoch, seed);
      const auto report = sfcm::feasible(plan, cluster, epoch, specs);
      CHECK_MESSAGE(report.ok(), report.summary());
      CHECK(plan == sfcm::random_plan(cluster, specs, epoch, seed));
    }
  }
}

TEST_CASE("random_plan reports an impossible workload") {
  sfcm::ClusterSpec cluster;
  cluster.n_nodes = 1;
  cluster.node.cores = 1;
  const sfcm::SpecTable specs({spec("f", 1.5, 0.5)});
  sfcm::EpochWorkload w;
  w.arrivals = {{"f", 1}};
  CHECK_THROWS_AS(sfcm::random_plan(cluster, specs, w, 1), sfcm::CapacityError);
}

TEST_CASE("cluster validation") {
  sfcm::ClusterSpec c;
  CHECK_NOTHROW(sfcm::validate(c));
  c.n_nodes = 0;
  CHECK_THROWS_AS(sfcm::validate(c), sfcm::ConfigError);
  c = {};
  c.node.p_idle_w = 600.0;
  CHECK_THROWS_AS(sfcm::validate(c), sfcm::ConfigError);
}

TEST_CASE("NodeUsage bookkeeping") {
  sfcm::ClusterSpec cluster;
  cluster.n_nodes = 2;
  cluster.node.cores = 4;
  cluster.node.mem_mb = 1000;
  sfcm::NodeUsage u(cluster);
  CHECK(u.fits(0, 4, 1000));
  u.add(0, 3, 600);
  CHECK_FALSE(u.fits(0, 2, 10));
  CHECK_FALSE(u.fits(0, 1, 500));
  CHECK(u.free_cores(0) == 1);
  CHECK(u.free_mem(0) == 400);
  u.remove(0, 3, 600);
  CHECK(u.free_cores(0) == 4);
}
