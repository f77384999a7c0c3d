/*
 * Copyright 2026 The memsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// memsim: run emulator benchmarks from a YAML config and write CSV.
//
//   memsim run -c CONFIG [-o OUT.csv] [--set key=value ...]
//   memsim sweep -c CONFIG --axis key=lo:hi:step [--axis ...] [-o OUT.csv] [--set ...]
//   memsim show-config [-c CONFIG] [--set ...]
//
// run and sweep also take the control-API style flags
//   --latency BANK:RD_100NS:WR_100NS   --throughput BANK:RD_10MBPS:WR_10MBPS
//   --error-rate BANK:RD_PCT:WR_PCT    --boundary BANK:MB
// which are applied after every --set.
//
// Exit status: 0 ok, 1 simulation fault, 2 bad config or usage.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "memsim/config.hpp"
#include "memsim/report.hpp"

namespace {

constexpr int kExitFault = 1;
constexpr int kExitConfig = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw memsim::ConfigError(fmt::format("cannot open config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<memsim::Override> parse_sets(const std::vector<std::string>& sets) {
  std::vector<memsim::Override> out;
  for (const auto& s : sets) out.push_back(memsim::parse_override(s));
  return out;
}

std::vector<std::string> split_colon(const std::string& s, std::size_t n, const char* flag) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t c = s.find(':', start);
    parts.push_back(s.substr(start, c == std::string::npos ? std::string::npos : c - start));
    if (c == std::string::npos) break;
    start = c + 1;
  }
  if (parts.size() != n) throw memsim::ConfigError(fmt::format("{} expects {} colon-separated fields, got '{}'", flag, n, s));
  return parts;
}

struct ApiFlags {
  std::vector<std::string> latency, throughput, error_rate, boundary;

  void add_to(CLI::App* app) {
    app->add_option("--latency", latency, "BANK:RD_100NS:WR_100NS");
    app->add_option("--throughput", throughput, "BANK:RD_10MBPS:WR_10MBPS (0 = unlimited)");
    app->add_option("--error-rate", error_rate, "BANK:RD_PERCENT:WR_PERCENT");
    app->add_option("--boundary", boundary, "BANK:MB");
  }

  void append(std::vector<memsim::Override>& out) const {
    auto pair = [&](const std::vector<std::string>& flags, const char* name, const char* rd, const char* wr) {
      for (const auto& f : flags) {
        const auto p = split_colon(f, 3, name);
        out.push_back({fmt::format("regions.{}.{}", p[0], rd), p[1]});
        out.push_back({fmt::format("regions.{}.{}", p[0], wr), p[2]});
      }
    };
    pair(latency, "--latency", "rd_latency_100ns", "wr_latency_100ns");
    pair(throughput, "--throughput", "rd_thpt_10mbps", "wr_thpt_10mbps");
    pair(error_rate, "--error-rate", "rd_error_percent", "wr_error_percent");
    for (const auto& f : boundary) {
      const auto p = split_colon(f, 2, "--boundary");
      out.push_back({fmt::format("regions.{}.boundary_mb", p[0]), p[1]});
    }
  }
};

void emit(const std::string& csv, const std::string& out_flag, const std::optional<std::string>& out_cfg) {
  const std::string path = !out_flag.empty() ? out_flag : out_cfg.value_or("");
  if (path.empty() || path == "-") {
    std::cout << csv;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  f << csv;
  if (!f.flush()) throw std::runtime_error(fmt::format("error writing '{}'", path));
}

void append_rows(std::ostringstream& os, const memsim::RunConfig& cfg) {
  for (std::uint64_t rep = 0; rep < cfg.workload.repetitions; ++rep) memsim::write_csv_row(os, memsim::run_point(cfg, rep));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transaction-level simulator of an FPGA memory emulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::vector<std::string> sets;
  std::vector<std::string> axes;
  ApiFlags api;

  auto* run = app.add_subcommand("run", "Run the configured benchmark and write CSV");
  run->add_option("-c,--config", config_path, "YAML run configuration")->required();
  run->add_option("-o,--output", out_path, "CSV output path (default: config 'output' or stdout)");
  run->add_option("--set", sets, "Override a key, e.g. regions.0.rd_latency_100ns=20");
  api.add_to(run);

  auto* sweep = app.add_subcommand("sweep", "Run the cartesian product of one or more axes");
  sweep->add_option("-c,--config", config_path, "YAML run configuration")->required();
  sweep->add_option("--axis", axes, "key=lo:hi:step, inclusive")->required();
  sweep->add_option("-o,--output", out_path, "CSV output path");
  sweep->add_option("--set", sets, "Override a key before sweeping");
  api.add_to(sweep);

  auto* show = app.add_subcommand("show-config", "Print the effective configuration");
  show->add_option("-c,--config", config_path, "YAML run configuration");
  show->add_option("--set", sets, "Override a key");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const std::string source = config_path.empty() ? "<defaults>" : config_path;
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);
    auto overrides = parse_sets(sets);
    api.append(overrides);

    if (*show) {
      std::cout << memsim::render_config(memsim::parse_config(text, overrides, source));
      return 0;
    }

    if (*run) {
      const memsim::RunConfig cfg = memsim::parse_config(text, overrides, source);
      std::ostringstream os;
      memsim::write_csv_row(os, memsim::report_header(cfg));
      append_rows(os, cfg);
      emit(os.str(), out_path, cfg.output);
      return 0;
    }

    std::vector<memsim::SweepAxis> parsed;
    for (const auto& a : axes) parsed.push_back(memsim::parse_axis(a));
    std::vector<memsim::RunConfig> points;
    for (const auto& p : memsim::expand_axes(parsed)) {
      auto all = overrides;
      all.insert(all.end(), p.begin(), p.end());
      points.push_back(memsim::parse_config(text, all, source));
    }
    const memsim::CsvRow header = memsim::report_header(points.front());
    for (const auto& c : points) {
      if (memsim::report_header(c) != header) throw memsim::ConfigError("sweep points disagree on the column set");
    }
    std::ostringstream os;
    memsim::write_csv_row(os, header);
    for (const auto& c : points) append_rows(os, c);
    emit(os.str(), out_path, points.front().output);
    return 0;
  } catch (const memsim::ConfigError& e) {
    std::cerr << "memsim: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "memsim: simulation failed: " << e.what() << "\n";
    return kExitFault;
  }
}
