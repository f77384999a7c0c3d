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
 * @file workloads.hpp
 * @brief The simulated board plus the pointer-chase, streaming-throughput and
 * bit-error microbenchmarks that drive it.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "memsim/cpu_model.hpp"
#include "memsim/emulator.hpp"
#include "memsim/memory_model.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

struct MachineConfig {
  EmulatorConfig emulator{};
  CpuConfig cpu{};
};

/// Scheduler, emulator, CPU-side DDR and the cores, wired together.
class Machine {
 public:
  explicit Machine(MachineConfig cfg);
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  Scheduler& sched() { return sched_; }
  Emulator& emulator() { return *emu_; }
  Cpu& cpu() { return *cpu_; }
  BackingStore& cpu_store() { return cpu_store_; }
  MemoryController& cpu_dram() { return cpu_dram_; }
  const MachineConfig& config() const { return cfg_; }

  /// Backing store and byte offset behind a CPU address. Throws BusError.
  std::pair<BackingStore*, std::uint64_t> locate(std::uint64_t cpu_addr);
  /// CPU address of the first byte of emulator region `bank`.
  std::uint64_t region_base(std::size_t bank);

  /// Runs the scheduler until `done` becomes true. Throws std::runtime_error
  /// when `budget_ns` of simulated time pass first.
  void run_until(const bool& done, std::uint64_t budget_ns);
  /// Runs until the cores and the fabric have nothing outstanding.
  void drain(std::uint64_t budget_ns = 1'000'000'000);

 private:
  MachineConfig cfg_;
  Scheduler sched_;
  BackingStore cpu_store_;
  MemoryController cpu_dram_;
  std::unique_ptr<Emulator> emu_;
  std::unique_ptr<Cpu> cpu_;
};

inline constexpr std::uint64_t kChunkBytes = 64;

/// Randomized single-cycle linked list of 64-byte chunks.
struct PointerChain {
  std::uint64_t size{0};
  std::uint64_t seed{0};
  std::vector<std::uint32_t> next;  // chunk index -> following chunk index

  std::size_t chunks() const { return next.size(); }
  /// Writes the chain into memory at `base`: word 0 of each chunk holds the
  /// CPU address of the following chunk.
  void install(Machine& m, std::uint64_t base) const;
};

/// Throws std::invalid_argument unless size is a multiple of 64 and >= 128.
PointerChain build_pointer_chain(std::uint64_t size, std::uint64_t seed);

struct LatencyBenchConfig {
  std::uint64_t size{4 * kMiB};
  bool write_each_chunk{false};
  AccessMode mode{AccessMode::kCacheable};
  std::uint32_t laps{3};
  std::uint32_t warmup_laps{1};
  std::optional<std::uint64_t> base;  // CPU address of the buffer; defaults to the start of `bank`
  std::uint32_t bank{0};
  std::uint64_t seed{1};
  std::uint32_t core{0};
};

struct LatencyResult {
  double avg_ns{0};
  std::vector<double> lap_ns;  // per-access average of each measured lap
  std::uint64_t accesses{0};
  std::uint64_t l2_misses{0};  // during measured laps
};

LatencyResult run_latency_bench(Machine& m, const LatencyBenchConfig& cfg);

struct ThroughputBenchConfig {
  std::uint32_t threads{4};
  std::uint64_t per_thread_bytes{1 * kMiB};
  bool write{false};
  AccessMode mode{AccessMode::kCacheable};
  /// Minimum warm-up; the window also waits for every thread's first full pass.
  std::uint64_t warmup_ns{1'000'000};
  std::uint64_t duration_ns{100'000'000};
  std::optional<std::uint64_t> base;
  std::uint32_t bank{0};  // counters are read from this bank
};

struct ThroughputResult {
  double rd_mbps{0};  // 1 MB = 1e6 bytes
  double wr_mbps{0};
  std::uint64_t rd_bytes{0};  // CSR counter deltas over the window
  std::uint64_t wr_bytes{0};
  std::uint64_t duration_ns{0};
  // Totals since the machine was built, taken once all traffic has drained.
  std::uint64_t counter_rd_total{0};
  std::uint64_t counter_wr_total{0};
  std::uint64_t fabric_rd_total{0};
  std::uint64_t fabric_wr_total{0};
};

/// Throws std::invalid_argument when duration < 10 ms.
ThroughputResult run_throughput_bench(Machine& m, const ThroughputBenchConfig& cfg);

enum class ErrorBenchMode : std::uint8_t { kReadOnly, kWriteThenRead };

struct ErrorBenchConfig {
  ErrorBenchMode mode{ErrorBenchMode::kReadOnly};
  std::uint64_t size{4 * kMiB};
  AccessMode access{AccessMode::kCacheable};
  std::optional<std::uint64_t> base;
  std::uint32_t bank{0};
};

struct ErrorResult {
  double observed_rate{0};
  std::uint64_t flipped_bits{0};
  std::uint64_t total_bits{0};
  std::uint64_t rd_bit_errors{0};  // CSR counter deltas
  std::uint64_t wr_bit_errors{0};
};

ErrorResult run_error_bench(Machine& m, const ErrorBenchConfig& cfg);

struct Metric {
  std::string name;
  double value{0};
  std::string unit;
};

}  // namespace memsim
