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

#include "sfcm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sfcm/errors.hpp"

namespace sfcm {
namespace {

using nlohmann::json;

// Reads optional fields out of one JSON object and rejects unknown keys.
class Section {
 public:
  Section(const json &obj, std::string name) : obj_(obj), name_(std::move(name)) {
    if (!obj_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <typename T>
  Section &field(const char *key, T &out) {
    seen_.insert(key);
    if (const auto it = obj_.find(key); it != obj_.end()) {
      try {
        out = it->template get<T>();
      } catch (const json::exception &) {
        throw ConfigError(name_ + "." + key + ": wrong type");
      }
    }
    return *this;
  }

  template <typename T>
  Section &optional_field(const char *key, std::optional<T> &out) {
    seen_.insert(key);
    if (const auto it = obj_.find(key); it != obj_.end() && !it->is_null()) {
      T v{};
      field(key, v);
      out = v;
    }
    return *this;
  }

  const json *child(const char *key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto &[key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(name_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json &obj_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_env(const json &obj, EnvironmentState &env, const std::string &name) {
  Section s(obj, name);
  s.field("carbon_intensity_g_per_kwh", env.carbon_intensity_g_per_kwh)
      .field("wue_l_per_kwh", env.wue_l_per_kwh)
      .field("ewif_l_per_kwh", env.ewif_l_per_kwh)
      .field("carbon_per_liter_water_g", env.carbon_per_liter_water_g)
      .field("cop_base", env.cop_base)
      .field("hotspot_util_threshold", env.hotspot_util_threshold)
      .field("hotspot_cop_penalty", env.hotspot_cop_penalty);
  s.finish();
  validate(env);
}

json env_to_json(const EnvironmentState &e) {
  return {{"carbon_intensity_g_per_kwh", e.carbon_intensity_g_per_kwh},
          {"wue_l_per_kwh", e.wue_l_per_kwh},
          {"ewif_l_per_kwh", e.ewif_l_per_kwh},
          {"carbon_per_liter_water_g", e.carbon_per_liter_water_g},
          {"cop_base", e.cop_base},
          {"hotspot_util_threshold", e.hotspot_util_threshold},
          {"hotspot_cop_penalty", e.hotspot_cop_penalty}};
}

}  // namespace

Config config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Config cfg;
  Section root(doc, "config");

  if (const auto *t = root.child("trace")) {
    auto &tc = cfg.trace;
    Section s(*t, "trace");
    s.field("n_function_ids", tc.n_function_ids)
        .field("epochs", tc.epochs)
        .field("epoch_length_s", tc.epoch_length_s)
        .field("short_fraction", tc.short_fraction)
        .field("short_runtime_min_s", tc.short_runtime_min_s)
        .field("short_runtime_max_s", tc.short_runtime_max_s)
        .field("long_runtime_min_s", tc.long_runtime_min_s)
        .field("long_runtime_max_s", tc.long_runtime_max_s)
        .field("slack_factor", tc.slack_factor)
        .field("min_ids_per_epoch", tc.min_ids_per_epoch)
        .field("max_ids_per_epoch", tc.max_ids_per_epoch)
        .field("arrivals_mean_min", tc.arrivals_mean_min)
        .field("arrivals_mean_max", tc.arrivals_mean_max)
        .field("arrivals_jitter", tc.arrivals_jitter)
        .field("mem_choices_mb", tc.mem_choices_mb)
        .field("cpu_base_min", tc.cpu_base_min)
        .field("cpu_base_max", tc.cpu_base_max)
        .field("cpu_per_request_min", tc.cpu_per_request_min)
        .field("cpu_per_request_max", tc.cpu_per_request_max)
        .field("seed", tc.seed);
    s.finish();
  }
  validate(cfg.trace);

  if (const auto *c = root.child("cluster")) {
    Section s(*c, "cluster");
    s.field("n_nodes", cfg.cluster.n_nodes);
    if (const auto *n = s.child("node")) {
      Section ns(*n, "cluster.node");
      ns.field("cores", cfg.cluster.node.cores)
          .field("mem_mb", cfg.cluster.node.mem_mb)
          .field("p_idle_w", cfg.cluster.node.p_idle_w)
          .field("p_max_w", cfg.cluster.node.p_max_w);
      ns.finish();
    }
    if (const auto *o = s.child("overhead")) {
      Section os(*o, "cluster.overhead");
      os.field("cold_start_s", cfg.cluster.overhead.cold_start_s)
          .field("shutdown_s", cfg.cluster.overhead.shutdown_s)
          .field("startup_energy_j", cfg.cluster.overhead.startup_energy_j);
      os.finish();
    }
    s.finish();
  }
  validate(cfg.cluster);

  if (const auto *e = root.child("env")) {
    cfg.env.states.clear();
    if (e->is_array()) {
      if (e->empty()) throw ConfigError("env: array must not be empty");
      for (std::size_t i = 0; i < e->size(); ++i) {
        EnvironmentState st;
        read_env((*e)[i], st, "env[" + std::to_string(i) + "]");
        cfg.env.states.push_back(st);
      }
    } else {
      EnvironmentState st;
      read_env(*e, st, "env");
      cfg.env.states.push_back(st);
    }
  }

  if (const auto *b = root.child("budget")) {
    Section s(*b, "budget");
    s.field("population_size", cfg.budget.population_size)
        .field("local_steps_per_round", cfg.budget.local_steps_per_round)
        .field("rounds", cfg.budget.rounds)
        .field("ls_fraction", cfg.budget.ls_fraction)
        .field("seed", cfg.budget.seed)
        .field("warm_start", cfg.budget.warm_start);
    s.finish();
  }
  validate(cfg.budget);

  if (const auto *w = root.child("weights")) {
    Section s(*w, "weights");
    s.field("slo", cfg.weights.slo).field("carbon", cfg.weights.carbon).field("water", cfg.weights.water);
    s.finish();
  }
  validate(cfg.weights);

  if (const auto *bl = root.child("baselines")) {
    Section s(*bl, "baselines");
    s.field("target_batch", cfg.baselines.target_batch)
        .field("runtime_threshold_s", cfg.baselines.runtime_threshold_s);
    s.finish();
  }
  if (cfg.baselines.target_batch < 1 || !(cfg.baselines.runtime_threshold_s > 0.0)) {
    throw ConfigError("baselines: target_batch >= 1 and runtime_threshold_s > 0 required");
  }

  root.optional_field("horizon_s", cfg.horizon_s);
  if (cfg.horizon_s && !(*cfg.horizon_s > 0.0)) throw ConfigError("horizon_s must be > 0");
  root.finish();
  return cfg;
}

Config load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return config_from_json(os.str());
}

std::string config_to_json(const Config &c) {
  const auto &t = c.trace;
  json env = json::array();
  for (const auto &s : c.env.states) env.push_back(env_to_json(s));
  json doc = {
      {"trace",
       {{"n_function_ids", t.n_function_ids},
        {"epochs", t.epochs},
        {"epoch_length_s", t.epoch_length_s},
        {"short_fraction", t.short_fraction},
        {"short_runtime_min_s", t.short_runtime_min_s},
        {"short_runtime_max_s", t.short_runtime_max_s},
        {"long_runtime_min_s", t.long_runtime_min_s},
        {"long_runtime_max_s", t.long_runtime_max_s},
        {"slack_factor", t.slack_factor},
        {"min_ids_per_epoch", t.min_ids_per_epoch},
        {"max_ids_per_epoch", t.max_ids_per_epoch},
        {"arrivals_mean_min", t.arrivals_mean_min},
        {"arrivals_mean_max", t.arrivals_mean_max},
        {"arrivals_jitter", t.arrivals_jitter},
        {"mem_choices_mb", t.mem_choices_mb},
        {"cpu_base_min", t.cpu_base_min},
        {"cpu_base_max", t.cpu_base_max},
        {"cpu_per_request_min", t.cpu_per_request_min},
        {"cpu_per_request_max", t.cpu_per_request_max},
        {"seed", t.seed}}},
      {"cluster",
       {{"n_nodes", c.cluster.n_nodes},
        {"node",
         {{"cores", c.cluster.node.cores},
          {"mem_mb", c.cluster.node.mem_mb},
          {"p_idle_w", c.cluster.node.p_idle_w},
          {"p_max_w", c.cluster.node.p_max_w}}},
        {"overhead",
         {{"cold_start_s", c.cluster.overhead.cold_start_s},
          {"shutdown_s", c.cluster.overhead.shutdown_s},
          {"startup_energy_j", c.cluster.overhead.startup_energy_j}}}}},
      {"env", env.size() == 1 ? env[0] : env},
      {"budget",
       {{"population_size", c.budget.population_size},
        {"local_steps_per_round", c.budget.local_steps_per_round},
        {"rounds", c.budget.rounds},
        {"ls_fraction", c.budget.ls_fraction},
        {"seed", c.budget.seed},
        {"warm_start", c.budget.warm_start}}},
      {"weights", {{"slo", c.weights.slo}, {"carbon", c.weights.carbon}, {"water", c.weights.water}}},
      {"baselines",
       {{"target_batch", c.baselines.target_batch},
        {"runtime_threshold_s", c.baselines.runtime_threshold_s}}},
  };
  if (c.horizon_s) doc["horizon_s"] = *c.horizon_s;
  return doc.dump(2) + "\n";
}

void set_seed(Config &config, std::uint64_t seed) {
  config.trace.seed = seed;
  config.budget.seed = seed;
}

}  // namespace sfcm
