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

/**
 * @file config.hpp
 * @brief Run configuration: YAML schema, overrides, rendering and flattening.
 *
 * Schema (every key optional, unknown keys rejected):
 *
 *   seed: 1
 *   output: results.csv
 *   machine:   { cores, line_bytes, l1_kib, l1_ways, l2_kib, l2_ways, l1_hit_ns,
 *                l2_hit_ns, issue_ns, read_credits, write_credits, frequency_scale,
 *                beat_bytes, store_mib, cpu_dram_mib, fpga_base, pulse_ns,
 *                fabric_request_ns, fabric_response_ns, read_issue_interval_ns,
 *                write_issue_interval_ns, fpga_read_service_ns, fpga_write_service_ns,
 *                fpga_ceiling_mbps, cpu_read_service_ns, cpu_write_service_ns,
 *                cpu_ceiling_mbps }
 *   regions:   list of { boundary_mb, rd_latency_100ns, wr_latency_100ns,
 *                rd_thpt_10mbps, wr_thpt_10mbps, rd_error_threshold,
 *                wr_error_threshold, rd_error_percent, wr_error_percent }
 *   workload:  { bench: latency|throughput|error, target: fpga|cpu, bank,
 *                mode: cacheable|noncacheable, write, size_kib, laps, warmup_laps,
 *                threads, per_thread_kib, duration_us, warmup_us,
 *                error_mode: read_only|write_then_read, repetitions }
 *
 * The *_error_percent keys are input conveniences and are stored as thresholds.
 * Overrides use dotted paths, e.g. "regions.0.rd_latency_100ns=20".
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memsim/workloads.hpp"

namespace memsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BenchKind : std::uint8_t { kLatency, kThroughput, kError };
enum class BenchTarget : std::uint8_t { kFpga, kCpu };

struct MachineSpec {
  std::uint64_t cores{4};
  std::uint64_t line_bytes{64};
  std::uint64_t l1_kib{32};
  std::uint64_t l1_ways{4};
  std::uint64_t l2_kib{1024};
  std::uint64_t l2_ways{16};
  std::uint64_t l1_hit_ns{2};
  std::uint64_t l2_hit_ns{25};
  std::uint64_t issue_ns{1};
  std::uint64_t read_credits{37};
  std::uint64_t write_credits{17};
  double frequency_scale{1.0};
  std::uint64_t beat_bytes{16};
  std::uint64_t store_mib{4096};
  std::uint64_t cpu_dram_mib{2048};
  std::uint64_t fpga_base{0x10'0000'0000};
  std::uint64_t pulse_ns{100};
  std::uint64_t fabric_request_ns{114};
  std::uint64_t fabric_response_ns{114};
  std::uint64_t read_issue_interval_ns{140};
  std::uint64_t write_issue_interval_ns{140};
  std::uint64_t fpga_read_service_ns{135};
  std::uint64_t fpga_write_service_ns{12};
  std::uint64_t fpga_ceiling_mbps{3900};
  std::uint64_t cpu_read_service_ns{135};
  std::uint64_t cpu_write_service_ns{12};
  std::uint64_t cpu_ceiling_mbps{17064};
  bool operator==(const MachineSpec&) const = default;
};

struct RegionSpec {
  std::uint64_t boundary_mb{0};
  std::uint64_t rd_latency_100ns{0};
  std::uint64_t wr_latency_100ns{0};
  std::uint64_t rd_thpt_10mbps{0};
  std::uint64_t wr_thpt_10mbps{0};
  std::uint32_t rd_error_threshold{0};
  std::uint32_t wr_error_threshold{0};
  bool operator==(const RegionSpec&) const = default;
};

struct WorkloadSpec {
  BenchKind bench{BenchKind::kLatency};
  BenchTarget target{BenchTarget::kFpga};
  std::uint64_t bank{0};
  AccessMode mode{AccessMode::kCacheable};
  bool write{false};
  std::uint64_t size_kib{4096};
  std::uint64_t laps{3};
  std::uint64_t warmup_laps{1};
  std::uint64_t threads{4};
  std::uint64_t per_thread_kib{1024};
  std::uint64_t duration_us{100'000};
  std::uint64_t warmup_us{1'000};
  ErrorBenchMode error_mode{ErrorBenchMode::kReadOnly};
  std::uint64_t repetitions{1};
  bool operator==(const WorkloadSpec&) const = default;
};

struct RunConfig {
  std::uint64_t seed{1};
  std::optional<std::string> output;
  MachineSpec machine{};
  std::vector<RegionSpec> regions{RegionSpec{}};
  WorkloadSpec workload{};
  bool operator==(const RunConfig&) const = default;
};

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kSeedEnvVar = "MEMSIM_SEED";

/// Seed used when a config has none: $MEMSIM_SEED if set, else kDefaultSeed.
std::uint64_t default_seed();

struct Override {
  std::string key;  // dotted path
  std::string value;
};

/// Parses "key=value". Throws ConfigError.
Override parse_override(std::string_view text);

/// Parses YAML text, applies overrides in order (last wins), fills defaults
/// and validates. Errors carry `source` and line context.
RunConfig parse_config(std::string_view text, const std::vector<Override>& overrides = {},
                       std::string_view source = "<config>");

std::string render_config(const RunConfig& cfg);

/// Every knob as (dotted key, value text), in schema order.
std::vector<std::pair<std::string, std::string>> flatten(const RunConfig& cfg);

MachineConfig to_machine_config(const RunConfig& cfg, std::uint64_t run_seed);

}  // namespace memsim
