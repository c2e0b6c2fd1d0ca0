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

#include "sfcm/report.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sfcm/errors.hpp"
#include "sfcm/format.hpp"

namespace sfcm {
namespace {

using nlohmann::json;

void objective_cells(std::ostringstream &os, const ObjectiveVector &v) {
  os << format_double(v.slo_violation_rate) << ',' << format_double(v.carbon_g) << ','
     << format_double(v.water_l);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

}  // namespace

std::string plan_to_json(const Plan &plan) {
  json allocs = json::array();
  for (const auto &c : plan.allocations) {
    allocs.push_back({{"function_id", c.function_id},
                      {"node_id", c.node_id},
                      {"cores", c.cores},
                      {"mem_mb", c.mem_mb},
                      {"assigned_requests", c.assigned_requests},
                      {"is_new", c.is_new}});
  }
  return json{{"allocations", allocs}}.dump(2) + "\n";
}

Plan plan_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    Plan plan;
    for (const auto &a : doc.at("allocations")) {
      ContainerAlloc c;
      c.function_id = a.at("function_id").get<std::string>();
      c.node_id = a.at("node_id").get<std::size_t>();
      c.cores = a.at("cores").get<int>();
      c.mem_mb = a.at("mem_mb").get<std::int64_t>();
      c.assigned_requests = a.at("assigned_requests").get<std::int64_t>();
      c.is_new = a.value("is_new", true);
      plan.allocations.push_back(std::move(c));
    }
    return plan;
  } catch (const json::exception &e) {
    throw ParseError(std::string("plan JSON: ") + e.what(), 0);
  }
}

std::string objectives_csv(std::span<const ObjectiveVector> rows) {
  std::ostringstream os;
  os << "plan_id,slo_rate,carbon_g,water_l\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << i << ',';
    objective_cells(os, rows[i]);
    os << '\n';
  }
  return os.str();
}

std::string archive_csv(std::span<const ArchiveEntry> entries, const Weights &balance,
                        const ObjectiveVector &norms) {
  std::ostringstream os;
  os << "plan_id,slo_rate,carbon_g,water_l,weighted_balance\n";
  for (const auto &e : entries) {
    os << e.plan_id << ',';
    objective_cells(os, e.objectives);
    os << ',' << format_double(weighted_sum(e.objectives, balance, norms)) << '\n';
  }
  return os.str();
}

std::vector<ObjectiveRow> read_objective_rows(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::string line;
  std::size_t line_no = 0;
  std::vector<ObjectiveRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "plan_id,slo_rate,carbon_g,water_l" &&
          line != "plan_id,slo_rate,carbon_g,water_l,weighted_balance") {
        throw ParseError(path.filename().string() + ": unexpected header", line_no);
      }
      header = true;
      continue;
    }
    const auto f = split(line);
    ObjectiveRow row;
    if ((f.size() != 4 && f.size() != 5) || !parse_int(f[0], row.plan_id) ||
        !parse_double(f[1], row.objectives.slo_violation_rate) ||
        !parse_double(f[2], row.objectives.carbon_g) ||
        !parse_double(f[3], row.objectives.water_l)) {
      throw ParseError(path.filename().string() + ": malformed row", line_no);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string epochs_csv(const HorizonResult &result) {
  std::ostringstream os;
  os << "epoch,policy,slo_rate,carbon_g,water_l\n";
  for (const auto &p : result.policies) {
    for (const auto &e : p.epochs) {
      os << e.epoch << ',' << policy_name(p.policy) << ',';
      objective_cells(os, e.objectives);
      os << '\n';
    }
  }
  return os.str();
}

std::string aggregate_csv(const HorizonResult &result) {
  std::ostringstream os;
  os << "policy,agg_slo,agg_carbon_g,agg_water_l\n";
  for (const auto &p : result.policies) {
    os << policy_name(p.policy) << ',' << format_double(p.aggregate.slo_rate) << ','
       << format_double(p.aggregate.carbon_g) << ',' << format_double(p.aggregate.water_l)
       << '\n';
  }
  return os.str();
}

std::string projected_csv(std::span<const ObjectiveRow> rows,
                          std::span<const ProjectedPoint> points, Axis x, Axis y) {
  std::ostringstream os;
  os << "plan_id," << axis_name(x) << ',' << axis_name(y) << '\n';
  for (const auto &p : points) {
    os << rows[p.index].plan_id << ',' << format_double(p.x) << ',' << format_double(p.y)
       << '\n';
  }
  return os.str();
}

std::string pareto_file_name(PolicyKind policy, std::size_t epoch) {
  return std::string(policy_name(policy)) + "_epoch_" + std::to_string(epoch) + ".csv";
}

void write_run_outputs(const HorizonResult &result, const Weights &balance,
                       const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir / "pareto");
  std::filesystem::create_directories(dir / "plans");
  write_text_file(dir / "epochs.csv", epochs_csv(result));
  write_text_file(dir / "aggregate.csv", aggregate_csv(result));
  for (const auto &p : result.policies) {
    for (std::size_t i = 0; i < p.epochs.size(); ++i) {
      const auto &e = p.epochs[i];
      const std::string stem =
          std::string(policy_name(p.policy)) + "_epoch_" + std::to_string(e.epoch);
      write_text_file(dir / "plans" / (stem + ".json"), plan_to_json(e.plan));
      if (is_sfcm(p.policy) && i < p.archives.size() && !e.failed) {
        write_text_file(dir / "pareto" / pareto_file_name(p.policy, e.epoch),
                        archive_csv(p.archives[i], balance, p.norms[i]));
      }
    }
  }
}

void write_text_file(const std::filesystem::path &path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace sfcm
