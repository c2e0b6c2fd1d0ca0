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

#include "sfcm/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "sfcm/errors.hpp"
#include "sfcm/format.hpp"
#include "sfcm/rng.hpp"

namespace sfcm {
namespace {

constexpr std::string_view kFunctionsHeader =
    "id,runtime_s,deadline_s,mem_mb,cpu_base_cores,cpu_per_request_cores";
constexpr std::string_view kArrivalsHeader = "function_id,arrival_time_s";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Reads a CSV file line by line, checking the header and skipping blank lines.
// `on_row` receives the split fields and the 1-based line number.
template <typename OnRow>
void read_csv(const std::filesystem::path &path, std::string_view header,
              OnRow &&on_row) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        throw ParseError(path.filename().string() + ": expected header '" +
                             std::string(header) + "'",
                         line_no);
      }
      seen_header = true;
      continue;
    }
    on_row(split_fields(line), line_no);
  }
}

double require_double(std::string_view field, const char *name,
                      std::size_t line_no) {
  double v = 0.0;
  if (!parse_double(field, v)) {
    throw ParseError(std::string("bad ") + name + " '" + std::string(field) + "'",
                     line_no);
  }
  return v;
}

double round_to(double value, double quantum) {
  return std::round(value / quantum) * quantum;
}

double log_uniform(Rng &rng, double lo, double hi) {
  return std::exp(rng.uniform_real(std::log(lo), std::log(hi)));
}

std::string make_id(std::size_t index, std::size_t count) {
  std::size_t width = 3;
  for (std::size_t n = count > 0 ? count - 1 : 0; n >= 1000; n /= 10) ++width;
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "f" + digits;
}

}  // namespace

void validate(const FunctionSpec &spec) {
  if (spec.id.empty()) throw SchemaError("function id must not be empty");
  const auto fail = [&](const std::string &what) {
    throw SchemaError("function '" + spec.id + "': " + what);
  };
  if (!(spec.runtime_s > 0.0)) fail("runtime_s must be > 0");
  if (!(spec.deadline_s >= spec.runtime_s)) fail("deadline_s must be >= runtime_s");
  if (spec.mem_mb <= 0) fail("mem_mb must be > 0");
  if (!(spec.cpu_base_cores >= 0.0)) fail("cpu_base_cores must be >= 0");
  if (!(spec.cpu_per_request_cores > 0.0)) fail("cpu_per_request_cores must be > 0");
}

std::int64_t EpochWorkload::total_arrivals() const {
  std::int64_t total = 0;
  for (const auto &[id, n] : arrivals) total += n;
  return total;
}

std::int64_t EpochWorkload::count(const std::string &function_id) const {
  const auto it = arrivals.find(function_id);
  return it == arrivals.end() ? 0 : it->second;
}

SpecTable::SpecTable(std::vector<FunctionSpec> specs) : specs_(std::move(specs)) {
  index_.reserve(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (!index_.emplace(specs_[i].id, i).second) {
      throw SchemaError("duplicate function id '" + specs_[i].id + "'");
    }
  }
}

const FunctionSpec *SpecTable::find(const std::string &id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &specs_[it->second];
}

const FunctionSpec &SpecTable::at(const std::string &id) const {
  const auto *spec = find(id);
  if (spec == nullptr) throw SchemaError("unknown function id '" + id + "'");
  return *spec;
}

void validate(const TraceConfig &cfg) {
  const auto fail = [](const std::string &what) {
    throw ConfigError("trace config: " + what);
  };
  if (cfg.n_function_ids == 0) fail("n_function_ids must be >= 1");
  if (!(cfg.epoch_length_s > 0.0)) fail("epoch_length_s must be > 0");
  if (!(cfg.short_fraction >= 0.0 && cfg.short_fraction <= 1.0)) {
    fail("short_fraction must lie in [0, 1]");
  }
  if (!(cfg.short_runtime_min_s > 0.0 &&
        cfg.short_runtime_min_s < cfg.short_runtime_max_s)) {
    fail("short runtime range must satisfy 0 < min < max");
  }
  if (!(cfg.long_runtime_min_s > 0.0 &&
        cfg.long_runtime_min_s <= cfg.long_runtime_max_s)) {
    fail("long runtime range must satisfy 0 < min <= max");
  }
  if (!(cfg.slack_factor >= 1.0)) fail("slack_factor must be >= 1");
  if (cfg.min_ids_per_epoch == 0) fail("min_ids_per_epoch must be >= 1");
  if (cfg.min_ids_per_epoch > cfg.max_ids_per_epoch) {
    fail("min_ids_per_epoch exceeds max_ids_per_epoch");
  }
  if (cfg.min_ids_per_epoch > cfg.n_function_ids) {
    fail("min_ids_per_epoch (" + std::to_string(cfg.min_ids_per_epoch) +
         ") exceeds n_function_ids (" + std::to_string(cfg.n_function_ids) + ")");
  }
  if (!(cfg.arrivals_mean_min >= 1.0 &&
        cfg.arrivals_mean_min <= cfg.arrivals_mean_max)) {
    fail("arrival mean range must satisfy 1 <= min <= max");
  }
  if (!(cfg.arrivals_jitter >= 0.0 && cfg.arrivals_jitter < 1.0)) {
    fail("arrivals_jitter must lie in [0, 1)");
  }
  if (cfg.mem_choices_mb.empty()) fail("mem_choices_mb must not be empty");
  for (auto m : cfg.mem_choices_mb) {
    if (m <= 0) fail("mem_choices_mb entries must be > 0");
  }
  if (!(cfg.cpu_base_min >= 0.0 && cfg.cpu_base_min <= cfg.cpu_base_max)) {
    fail("cpu_base range must satisfy 0 <= min <= max");
  }
  if (!(cfg.cpu_per_request_min > 0.0 &&
        cfg.cpu_per_request_min <= cfg.cpu_per_request_max)) {
    fail("cpu_per_request range must satisfy 0 < min <= max");
  }
}

Trace generate_trace(const TraceConfig &cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_function_ids;

  const auto n_short = static_cast<std::size_t>(
      std::llround(cfg.short_fraction * static_cast<double>(n)));
  std::vector<char> is_short(n, 0);
  std::fill_n(is_short.begin(), n_short, 1);
  rng.shuffle(std::span<char>(is_short));

  Trace trace;
  trace.functions.reserve(n);
  std::vector<double> mean_arrivals(n);
  const double short_cap = cfg.short_runtime_max_s - 0.001;
  for (std::size_t i = 0; i < n; ++i) {
    FunctionSpec spec;
    spec.id = make_id(i, n);
    if (is_short[i]) {
      spec.runtime_s = round_to(
          log_uniform(rng, cfg.short_runtime_min_s, cfg.short_runtime_max_s), 0.001);
      spec.runtime_s = std::clamp(spec.runtime_s, std::max(0.001, cfg.short_runtime_min_s),
                                  std::max(0.001, short_cap));
    } else {
      spec.runtime_s = round_to(
          log_uniform(rng, cfg.long_runtime_min_s, cfg.long_runtime_max_s), 0.001);
      spec.runtime_s = std::max(spec.runtime_s, cfg.long_runtime_min_s);
    }
    spec.deadline_s =
        std::max(spec.runtime_s, round_to(cfg.slack_factor * spec.runtime_s, 0.001));
    spec.mem_mb = cfg.mem_choices_mb[rng.uniform_index(cfg.mem_choices_mb.size())];
    spec.cpu_base_cores =
        round_to(rng.uniform_real(cfg.cpu_base_min, cfg.cpu_base_max), 0.01);
    spec.cpu_per_request_cores = std::max(
        0.01, round_to(rng.uniform_real(cfg.cpu_per_request_min,
                                        cfg.cpu_per_request_max),
                       0.01));
    mean_arrivals[i] = log_uniform(rng, cfg.arrivals_mean_min, cfg.arrivals_mean_max);
    trace.functions.push_back(std::move(spec));
  }

  const std::size_t band_hi = std::min(cfg.max_ids_per_epoch, n);
  std::vector<std::size_t> order(n);
  trace.epochs.reserve(cfg.epochs);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    EpochWorkload epoch;
    epoch.epoch_index = e;
    const auto active = static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(cfg.min_ids_per_epoch),
        static_cast<std::int64_t>(band_hi)));
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t j = 0; j < active; ++j) {
      std::swap(order[j], order[j + rng.uniform_index(n - j)]);
      const std::size_t fn = order[j];
      const double scale =
          rng.uniform_real(1.0 - cfg.arrivals_jitter, 1.0 + cfg.arrivals_jitter);
      const auto count = std::max<std::int64_t>(
          1, std::llround(mean_arrivals[fn] * scale));
      epoch.arrivals.emplace(trace.functions[fn].id, count);
    }
    trace.epochs.push_back(std::move(epoch));
  }
  return trace;
}

Trace ingest_trace(const std::filesystem::path &dir, double epoch_length_s) {
  return ingest_trace(dir / "functions.csv", dir / "arrivals.csv", epoch_length_s);
}

Trace ingest_trace(const std::filesystem::path &functions_csv,
                   const std::filesystem::path &arrivals_csv,
                   double epoch_length_s) {
  if (!(epoch_length_s > 0.0)) throw ConfigError("epoch_length_s must be > 0");

  Trace trace;
  read_csv(functions_csv, kFunctionsHeader,
           [&](const std::vector<std::string_view> &f, std::size_t line_no) {
             if (f.size() != 6) {
               throw ParseError("functions.csv: expected 6 fields, got " +
                                    std::to_string(f.size()),
                                line_no);
             }
             FunctionSpec spec;
             spec.id = std::string(f[0]);
             spec.runtime_s = require_double(f[1], "runtime_s", line_no);
             spec.deadline_s = require_double(f[2], "deadline_s", line_no);
             double mem = require_double(f[3], "mem_mb", line_no);
             if (mem != std::floor(mem)) {
               throw ParseError("mem_mb must be an integer", line_no);
             }
             spec.mem_mb = static_cast<std::int64_t>(mem);
             spec.cpu_base_cores = require_double(f[4], "cpu_base_cores", line_no);
             spec.cpu_per_request_cores =
                 require_double(f[5], "cpu_per_request_cores", line_no);
             try {
               validate(spec);
             } catch (const SchemaError &e) {
               throw SchemaError("functions.csv line " + std::to_string(line_no) +
                                 ": " + e.what());
             }
             trace.functions.push_back(std::move(spec));
           });
  const SpecTable table(trace.functions);

  std::map<std::size_t, std::map<std::string, std::int64_t>> buckets;
  std::size_t max_epoch = 0;
  bool any = false;
  read_csv(arrivals_csv, kArrivalsHeader,
           [&](const std::vector<std::string_view> &f, std::size_t line_no) {
             if (f.size() != 2) {
               throw ParseError("arrivals.csv: expected 2 fields, got " +
                                    std::to_string(f.size()),
                                line_no);
             }
             std::string id(f[0]);
             const double t = require_double(f[1], "arrival_time_s", line_no);
             if (t < 0.0) throw ParseError("arrival_time_s must be >= 0", line_no);
             if (!table.contains(id)) {
               throw SchemaError("arrivals.csv line " + std::to_string(line_no) +
                                 ": unknown function id '" + id + "'");
             }
             const auto epoch = static_cast<std::size_t>(std::floor(t / epoch_length_s));
             ++buckets[epoch][id];
             max_epoch = std::max(max_epoch, epoch);
             any = true;
           });

  if (any) {
    trace.epochs.resize(max_epoch + 1);
    for (std::size_t e = 0; e <= max_epoch; ++e) trace.epochs[e].epoch_index = e;
    for (auto &[e, arrivals] : buckets) trace.epochs[e].arrivals = std::move(arrivals);
  }
  return trace;
}

void write_trace(const Trace &trace, const std::filesystem::path &dir,
                 double epoch_length_s) {
  if (!(epoch_length_s > 0.0)) throw ConfigError("epoch_length_s must be > 0");
  std::filesystem::create_directories(dir);

  std::ofstream functions(dir / "functions.csv", std::ios::binary);
  if (!functions) throw Error("cannot write " + (dir / "functions.csv").string());
  functions << kFunctionsHeader << '\n';
  for (const auto &s : trace.functions) {
    functions << s.id << ',' << format_double(s.runtime_s) << ','
              << format_double(s.deadline_s) << ',' << s.mem_mb << ','
              << format_double(s.cpu_base_cores) << ','
              << format_double(s.cpu_per_request_cores) << '\n';
  }

  std::ofstream arrivals(dir / "arrivals.csv", std::ios::binary);
  if (!arrivals) throw Error("cannot write " + (dir / "arrivals.csv").string());
  arrivals << kArrivalsHeader << '\n';
  for (const auto &epoch : trace.epochs) {
    const double start = static_cast<double>(epoch.epoch_index) * epoch_length_s;
    for (const auto &[id, count] : epoch.arrivals) {
      for (std::int64_t j = 0; j < count; ++j) {
        const double offset = round_to(
            epoch_length_s * (static_cast<double>(j) + 0.5) / static_cast<double>(count),
            0.001);
        double t = start + offset;
        // Keep the timestamp inside its half-open epoch interval.
        while (std::floor(t / epoch_length_s) > static_cast<double>(epoch.epoch_index)) {
          t = std::nextafter(t, start);
        }
        while (std::floor(t / epoch_length_s) < static_cast<double>(epoch.epoch_index)) {
          t = std::nextafter(t, start + epoch_length_s);
        }
        arrivals << id << ',' << format_double(t) << '\n';
      }
    }
  }
}

}  // namespace sfcm
