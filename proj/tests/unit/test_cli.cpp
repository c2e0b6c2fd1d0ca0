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
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "sfcm/report.hpp"
#include "sfcm/workload.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using sfcm::testing::scratch_dir;
using sfcm::testing::write_file;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome sfcm_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sfcm");
  std::ostringstream out, err;
  const int code = sfcm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string &text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Small experiment so the CLI tests stay quick.
fs::path small_config() {
  const auto path = scratch_dir("cfg") / "small.json";
  write_file(path, R"({
    "trace": {"n_function_ids": 40, "epochs": 3, "min_ids_per_epoch": 5,
              "max_ids_per_epoch": 8, "arrivals_mean_max": 10},
    "cluster": {"n_nodes": 6},
    "budget": {"rounds": 3, "local_steps_per_round": 10}
  })");
  return path;
}

}  // namespace

TEST_CASE("generate writes the default trace") {
  const auto dir = scratch_dir("gen") / "not" / "yet";
  const auto r = sfcm_cli({"generate", "--out", dir.string()});
  CHECK(r.code == sfcm::cli::kOk);
  const auto trace = sfcm::ingest_trace(dir, 900.0);
  CHECK(trace.functions.size() == 424);
  CHECK(trace.epochs.size() == 32);
}

TEST_CASE("generate with a fixed seed is repeatable") {
  const auto a = scratch_dir("gen_a");
  const auto b = scratch_dir("gen_b");
  CHECK(sfcm_cli({"generate", "--seed", "7", "--out", a.string()}).code == 0);
  CHECK(sfcm_cli({"generate", "--seed", "7", "--out", b.string()}).code == 0);
  for (const char *f : {"functions.csv", "arrivals.csv"}) {
    CHECK(sfcm::read_text_file(a / f) == sfcm::read_text_file(b / f));
  }
}

TEST_CASE("run writes one row per policy and epoch") {
  const auto cfg = small_config();
  const auto out = scratch_dir("run");
  const auto r = sfcm_cli({"run", "--config", cfg.string(), "--policies", "score,hybrid",
                           "--out", out.string()});
  REQUIRE(r.code == sfcm::cli::kOk);
  CHECK(r.out.find("score: slo=") != std::string::npos);
  CHECK(r.out.find("hybrid: slo=") != std::string::npos);
  CHECK(lines(sfcm::read_text_file(out / "aggregate.csv")) == 3);
  CHECK(lines(sfcm::read_text_file(out / "epochs.csv")) == 1 + 2 * 3);
  CHECK(fs::exists(out / "config.json"));
  CHECK(fs::exists(out / "run.log"));
}

TEST_CASE("run caps the epoch count") {
  const auto cfg = scratch_dir("cfg32") / "c.json";
  write_file(cfg, R"({"budget": {"rounds": 1, "local_steps_per_round": 3}})");
  const auto out = scratch_dir("run32");
  const auto r = sfcm_cli({"run", "--config", cfg.string(), "--policies", "sfcm-balance",
                           "--epochs", "32", "--out", out.string()});
  REQUIRE(r.code == sfcm::cli::kOk);
  CHECK(lines(sfcm::read_text_file(out / "epochs.csv")) == 33);
  CHECK(fs::exists(out / "pareto" / "sfcm-balance_epoch_31.csv"));
}

TEST_CASE("reruns are byte-identical") {
  const auto cfg = small_config();
  const auto a = scratch_dir("rerun_a");
  const auto b = scratch_dir("rerun_b");
  CHECK(sfcm_cli({"run", "--config", cfg.string(), "--seed", "11", "--out", a.string()}).code == 0);
  CHECK(sfcm_cli({"run", "--config", cfg.string(), "--seed", "11", "--sequential", "--out",
                  b.string()})
            .code == 0);
  for (const auto &entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    CAPTURE(rel.string());
    REQUIRE(fs::exists(b / rel));
    CHECK(sfcm::read_text_file(entry.path()) == sfcm::read_text_file(b / rel));
  }
}

TEST_CASE("run reads a trace directory") {
  const auto trace = scratch_dir("trace_in");
  write_file(trace / "functions.csv",
             "id,runtime_s,deadline_s,mem_mb,cpu_base_cores,cpu_per_request_cores\n"
             "f,10,30,256,0.5,0.5\n");
  write_file(trace / "arrivals.csv", "function_id,arrival_time_s\nf,1\nf,2\nf,950\n");
  const auto out = scratch_dir("trace_run");
  const auto r = sfcm_cli({"run", "--trace", trace.string(), "--policies", "score", "--out",
                           out.string()});
  CHECK(r.code == 0);
  CHECK(sfcm::read_text_file(out / "epochs.csv").find("1,score,") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto out = scratch_dir("codes");
  CHECK(sfcm_cli({}).code == sfcm::cli::kUsage);
  CHECK(sfcm_cli({"frobnicate"}).code == sfcm::cli::kUsage);
  CHECK(sfcm_cli({"--help"}).code == sfcm::cli::kOk);
  CHECK(sfcm_cli({"generate"}).code == sfcm::cli::kUsage);

  const auto bad_policy = sfcm_cli({"run", "--policies", "score,fifo", "--out", out.string()});
  CHECK(bad_policy.code == sfcm::cli::kUsage);
  CHECK(bad_policy.err.find("fifo") != std::string::npos);

  const auto bad_cfg = scratch_dir("badcfg") / "c.json";
  write_file(bad_cfg, R"({"cluster": {"n_nodes": "many"}})");
  const auto r = sfcm_cli({"generate", "--config", bad_cfg.string(), "--out", out.string()});
  CHECK(r.code == sfcm::cli::kConfig);
  CHECK_FALSE(r.err.empty());

  const auto tiny = scratch_dir("tiny") / "c.json";
  write_file(tiny, R"({"cluster": {"n_nodes": 1, "node": {"cores": 2}},
                       "trace": {"n_function_ids": 40, "epochs": 1}})");
  CHECK(sfcm_cli({"run", "--config", tiny.string(), "--policies", "score", "--out",
                  out.string()})
            .code == sfcm::cli::kCapacity);
}

TEST_CASE("pareto projects a hand-built archive") {
  const auto run = scratch_dir("pareto_run");
  write_file(run / "pareto" / "sfcm-balance_epoch_2.csv",
             "plan_id,slo_rate,carbon_g,water_l,weighted_balance\n"
             "3,0.1,10,5,0\n"
             "5,0.2,8,5,0\n"
             "8,0.3,12,1,0\n"
             "9,0.4,7,6,0\n"
             "11,0.5,13,7,0\n");
  auto r = sfcm_cli({"pareto", "--run", run.string(), "--epoch", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "plan_id,slo,carbon\n3,0.1,10\n5,0.2,8\n9,0.4,7\n");
  r = sfcm_cli({"pareto", "--run", run.string(), "--epoch", "2", "--axes", "slo,water"});
  CHECK(r.out == "plan_id,slo,water\n3,0.1,5\n8,0.3,1\n");

  const auto file = scratch_dir("pareto_out") / "deep" / "front.csv";
  r = sfcm_cli({"pareto", "--run", run.string(), "--epoch", "2", "--axes", "carbon,water",
                "--out", file.string()});
  CHECK(r.code == 0);
  CHECK(sfcm::read_text_file(file) == "plan_id,carbon,water\n5,8,5\n8,12,1\n9,7,6\n");

  CHECK(sfcm_cli({"pareto", "--run", run.string(), "--epoch", "2", "--axes", "slo,energy"}).code ==
        sfcm::cli::kUsage);
  CHECK(sfcm_cli({"pareto", "--run", run.string(), "--epoch", "2", "--axes", "slo"}).code ==
        sfcm::cli::kUsage);
  CHECK(sfcm_cli({"pareto", "--run", run.string(), "--epoch", "7"}).code == sfcm::cli::kConfig);
}

TEST_CASE("pareto on a real run") {
  const auto cfg = small_config();
  const auto out = scratch_dir("pareto_real");
  REQUIRE(sfcm_cli({"run", "--config", cfg.string(), "--policies", "sfcm-balance", "--out",
                    out.string()})
              .code == 0);
  const auto r = sfcm_cli({"pareto", "--run", out.string(), "--epoch", "0"});
  CHECK(r.code == 0);
  CHECK(lines(r.out) >= 2);
}
