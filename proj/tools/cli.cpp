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

#include "cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sfcm/config.hpp"
#include "sfcm/errors.hpp"
#include "sfcm/harness.hpp"
#include "sfcm/report.hpp"
#include "sfcm/workload.hpp"

namespace sfcm::cli {
namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

Config resolve_config(const CommonFlags &flags) {
  Config cfg = flags.config.empty() ? Config{} : load_config(flags.config);
  if (flags.seed) set_seed(cfg, *flags.seed);
  return cfg;
}

int cmd_generate(const CommonFlags &flags, std::ostream &out) {
  const Config cfg = resolve_config(flags);
  const Trace trace = generate_trace(cfg.trace);
  write_trace(trace, flags.out, cfg.trace.epoch_length_s);
  out << "wrote " << trace.functions.size() << " functions, " << trace.epochs.size()
      << " epochs to " << flags.out << '\n';
  return kOk;
}

struct RunFlags {
  std::string trace_dir;
  std::string policies = "score,hybrid,sfcm-slo,sfcm-carbon,sfcm-water,sfcm-balance";
  std::optional<std::size_t> epochs;
  bool sequential = false;
};

int cmd_run(const CommonFlags &flags, const RunFlags &run, std::ostream &out) {
  const auto policies = parse_policy_list(run.policies);
  const Config cfg = resolve_config(flags);
  const Trace trace = run.trace_dir.empty()
                          ? generate_trace(cfg.trace)
                          : ingest_trace(fs::path(run.trace_dir), cfg.trace.epoch_length_s);

  HorizonOptions options;
  options.epoch_length_s = cfg.trace.epoch_length_s;
  options.horizon_s = cfg.horizon_s;
  options.max_epochs = run.epochs;
  options.budget = cfg.budget;
  options.balance = cfg.weights;
  options.baselines = cfg.baselines;
  options.parallel = !run.sequential;
  std::ostringstream log;
  options.log = &log;

  const auto result = run_horizon(trace, policies, cfg.cluster, cfg.env, options);
  const fs::path dir(flags.out);
  write_run_outputs(result, cfg.weights, dir);
  write_text_file(dir / "config.json", config_to_json(cfg));
  write_text_file(dir / "run.log", log.str());

  bool any_failed = false;
  for (const auto &p : result.policies) {
    out << policy_name(p.policy) << ": slo=" << p.aggregate.slo_rate
        << " carbon_g=" << p.aggregate.carbon_g << " water_l=" << p.aggregate.water_l << '\n';
    for (const auto &e : p.epochs) any_failed = any_failed || e.failed;
  }
  return any_failed ? kCapacity : kOk;
}

struct ParetoFlags {
  std::string run_dir;
  std::size_t epoch = 0;
  std::string axes = "slo,carbon";
  std::string policy = "sfcm-balance";
};

int cmd_pareto(const CommonFlags &flags, const ParetoFlags &p, std::ostream &out) {
  const auto comma = p.axes.find(',');
  if (comma == std::string::npos) throw UsageError("--axes expects two names, e.g. slo,carbon");
  const Axis x = parse_axis(std::string_view(p.axes).substr(0, comma));
  const Axis y = parse_axis(std::string_view(p.axes).substr(comma + 1));
  if (x == y) throw UsageError("--axes must name two different objectives");
  const auto policy = parse_policy(p.policy);

  const fs::path file = fs::path(p.run_dir) / "pareto" / pareto_file_name(policy, p.epoch);
  const auto rows = read_objective_rows(file);
  std::vector<ObjectiveVector> points;
  for (const auto &r : rows) points.push_back(r.objectives);
  const auto front_idx = pareto_front_indices(points);
  std::vector<ObjectiveRow> front_rows;
  std::vector<ObjectiveVector> front;
  for (auto i : front_idx) {
    front_rows.push_back(rows[i]);
    front.push_back(points[i]);
  }
  const auto csv = projected_csv(front_rows, project_front(front, x, y), x, y);
  if (flags.out.empty()) {
    out << csv;
  } else {
    if (fs::path(flags.out).has_parent_path()) {
      fs::create_directories(fs::path(flags.out).parent_path());
    }
    write_text_file(flags.out, csv);
  }
  return kOk;
}

void add_common(CLI::App &cmd, CommonFlags &flags, bool out_required) {
  cmd.add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd.add_option("--seed", flags.seed, "Seed for trace generation and the optimizer");
  auto *o = cmd.add_option("--out", flags.out, "Output directory or file");
  if (out_required) o->required();
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Serverless scheduling simulator and SLO/carbon/water plan optimizer", "sfcm"};
  app.require_subcommand(1);

  CommonFlags gen_flags, run_flags, pareto_flags;
  RunFlags run_opts;
  ParetoFlags pareto_opts;

  auto *gen = app.add_subcommand("generate", "Write a synthetic trace (functions.csv, arrivals.csv)");
  add_common(*gen, gen_flags, true);

  auto *runc = app.add_subcommand("run", "Simulate policies over a trace and write result CSVs");
  add_common(*runc, run_flags, true);
  runc->add_option("--trace", run_opts.trace_dir, "Trace directory; generated from config if omitted")
      ->check(CLI::ExistingDirectory);
  runc->add_option("--policies", run_opts.policies, "Comma-separated policy names");
  runc->add_option("--epochs", run_opts.epochs, "Run at most this many epochs");
  runc->add_flag("--sequential", run_opts.sequential, "Run policies on one thread");

  auto *par = app.add_subcommand("pareto", "Project one epoch's archive onto two objectives");
  add_common(*par, pareto_flags, false);
  par->add_option("--run", pareto_opts.run_dir, "Output directory of a previous run")
      ->required()
      ->check(CLI::ExistingDirectory);
  par->add_option("--epoch", pareto_opts.epoch, "Epoch index")->required();
  par->add_option("--axes", pareto_opts.axes, "Two of slo, carbon, water");
  par->add_option("--policy", pareto_opts.policy, "SFCM policy whose archive to read");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_flags, out);
    if (runc->parsed()) return cmd_run(run_flags, run_opts, out);
    if (par->parsed()) return cmd_pareto(pareto_flags, pareto_opts, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError &e) {
    err << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kUsage;
}

}  // namespace sfcm::cli
