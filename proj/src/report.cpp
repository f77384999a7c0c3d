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

#include "memsim/report.hpp"

#include <charconv>
#include <ostream>

#include <fmt/format.h>

namespace memsim {

namespace {

constexpr const char* kMetricColumns[] = {"repetition", "run_seed",     "latency_ns",  "rd_mbps",
                                          "wr_mbps",    "error_rate",   "flipped_bits", "l2_misses",
                                          "sim_time_ns"};

struct Metrics {
  std::string latency_ns, rd_mbps, wr_mbps, error_rate, flipped_bits, l2_misses;
};

bool parse_number(std::string_view s, long double& out, bool& integral) {
  integral = s.find_first_of(".eE") == std::string_view::npos;
  if (integral) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    out = static_cast<long double>(v);
    return !s.empty() && ec == std::errc() && p == s.data() + s.size();
  }
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  out = v;
  return !s.empty() && ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

CsvRow report_header(const RunConfig& cfg) {
  CsvRow h;
  for (auto& [k, v] : flatten(cfg)) h.push_back(k);
  for (const char* m : kMetricColumns) h.emplace_back(m);
  for (std::size_t b = 0; b < cfg.regions.size(); ++b) {
    for (const char* c : {"rd_bytes", "wr_bytes", "rd_bit_errors", "wr_bit_errors"}) h.push_back(fmt::format("bank{}.{}", b, c));
  }
  return h;
}

CsvRow run_point(const RunConfig& cfg, std::uint64_t repetition) {
  const std::uint64_t run_seed = cfg.seed + repetition;
  Machine m(to_machine_config(cfg, run_seed));
  const WorkloadSpec& w = cfg.workload;
  const auto bank = static_cast<std::uint32_t>(w.bank);
  std::optional<std::uint64_t> base;
  if (w.target == BenchTarget::kCpu) base = m.cpu().config().cpu_dram_base;

  Metrics out;
  switch (w.bench) {
    case BenchKind::kLatency: {
      LatencyBenchConfig lc;
      lc.size = w.size_kib * kKiB;
      lc.write_each_chunk = w.write;
      lc.mode = w.mode;
      lc.laps = static_cast<std::uint32_t>(w.laps);
      lc.warmup_laps = static_cast<std::uint32_t>(w.warmup_laps);
      lc.base = base;
      lc.bank = bank;
      lc.seed = run_seed;
      const LatencyResult r = run_latency_bench(m, lc);
      out.latency_ns = fmt::format("{:.3f}", r.avg_ns);
      out.l2_misses = std::to_string(r.l2_misses);
      break;
    }
    case BenchKind::kThroughput: {
      ThroughputBenchConfig tc;
      tc.threads = static_cast<std::uint32_t>(w.threads);
      tc.per_thread_bytes = w.per_thread_kib * kKiB;
      tc.write = w.write;
      tc.mode = w.mode;
      tc.warmup_ns = w.warmup_us * 1000;
      tc.duration_ns = w.duration_us * 1000;
      tc.base = base;
      tc.bank = bank;
      const ThroughputResult r = run_throughput_bench(m, tc);
      out.rd_mbps = fmt::format("{:.3f}", r.rd_mbps);
      out.wr_mbps = fmt::format("{:.3f}", r.wr_mbps);
      break;
    }
    case BenchKind::kError: {
      ErrorBenchConfig ec;
      ec.mode = w.error_mode;
      ec.size = w.size_kib * kKiB;
      ec.access = w.mode;
      ec.base = base;
      ec.bank = bank;
      const ErrorResult r = run_error_bench(m, ec);
      out.error_rate = fmt::format("{:.6f}", r.observed_rate);
      out.flipped_bits = std::to_string(r.flipped_bits);
      break;
    }
  }

  CsvRow row;
  for (auto& [k, v] : flatten(cfg)) row.push_back(v);
  row.push_back(std::to_string(repetition));
  row.push_back(std::to_string(run_seed));
  for (auto* s : {&out.latency_ns, &out.rd_mbps, &out.wr_mbps, &out.error_rate, &out.flipped_bits, &out.l2_misses}) {
    row.push_back(*s);
  }
  row.push_back(std::to_string(m.sched().now().ns));
  for (std::size_t b = 0; b < cfg.regions.size(); ++b) {
    const Counters c = m.emulator().csr().get_counters(b);
    for (std::uint64_t v : {c.rd_bytes, c.wr_bytes, c.rd_bit_errors, c.wr_bit_errors}) row.push_back(std::to_string(v));
  }
  return row;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& os, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << csv_field(row[i]);
  }
  os << "\r\n";
}

SweepAxis parse_axis(std::string_view spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError(fmt::format("axis '{}' is not key=lo:hi:step", spec));
  SweepAxis axis{std::string(spec.substr(0, eq)), {}};
  const std::string_view range = spec.substr(eq + 1);
  const std::size_t c1 = range.find(':');
  const std::size_t c2 = c1 == std::string_view::npos ? c1 : range.find(':', c1 + 1);
  if (c2 == std::string_view::npos || range.find(':', c2 + 1) != std::string_view::npos) {
    throw ConfigError(fmt::format("axis '{}' is not key=lo:hi:step", spec));
  }
  long double lo = 0, hi = 0, step = 0;
  bool ilo = false, ihi = false, istep = false;
  if (!parse_number(range.substr(0, c1), lo, ilo) || !parse_number(range.substr(c1 + 1, c2 - c1 - 1), hi, ihi) ||
      !parse_number(range.substr(c2 + 1), step, istep)) {
    throw ConfigError(fmt::format("axis '{}': bounds and step must be numbers", spec));
  }
  if (!(step > 0)) throw ConfigError(fmt::format("axis '{}': step must be positive", spec));
  if (lo > hi) throw ConfigError(fmt::format("axis '{}': empty range", spec));
  const bool integral = ilo && ihi && istep;
  constexpr std::size_t kMaxPoints = 100'000;
  for (std::size_t i = 0;; ++i) {
    const long double v = lo + step * static_cast<long double>(i);
    if (v > hi + (integral ? 0 : step * 1e-9L)) break;
    if (i == kMaxPoints) throw ConfigError(fmt::format("axis '{}' expands to too many points", spec));
    axis.values.push_back(integral ? std::to_string(static_cast<long long>(v)) : fmt::format("{}", static_cast<double>(v)));
  }
  return axis;
}

std::vector<std::vector<Override>> expand_axes(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<Override>> points{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<Override>> next;
    for (const auto& p : points) {
      for (const auto& v : axis.values) {
        auto q = p;
        q.push_back(Override{axis.key, v});
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace memsim
