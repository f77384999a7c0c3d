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
 * @file memory_model.hpp
 * @brief Backing store plus a constant-latency, bandwidth-ceiling DDR service model.
 *
 * The DDR controller is treated as a black box: every burst sees a fixed
 * service latency, and beats leave each direction's pipeline no faster than
 * the configured ceiling. There is no bank, row or refresh state.
 */

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "memsim/axi_types.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

/// Sparse byte store; bytes never written read back as zero.
class BackingStore {
 public:
  static constexpr std::size_t kPageBytes = 4096;

  explicit BackingStore(std::uint64_t size_bytes);

  std::uint64_t size() const { return size_; }
  bool contains(std::uint64_t offset, std::uint64_t len) const { return offset <= size_ && len <= size_ - offset; }

  void read(std::uint64_t offset, std::span<std::uint8_t> out) const;
  void write(std::uint64_t offset, std::span<const std::uint8_t> in);
  /// Writes only bytes whose bit is set in `strobe` (bit i covers in[i]); in.size() <= 64.
  void write_masked(std::uint64_t offset, std::span<const std::uint8_t> in, std::uint64_t strobe);

  std::uint64_t read_u64(std::uint64_t offset) const;
  void write_u64(std::uint64_t offset, std::uint64_t value);

  /// Flat-binary image of [offset, offset + len).
  void dump_image(std::ostream& os, std::uint64_t offset, std::uint64_t len) const;
  /// Loads a flat-binary image at `offset`; returns bytes loaded.
  std::uint64_t load_image(std::istream& is, std::uint64_t offset);

  std::size_t resident_pages() const { return pages_.size(); }

 private:
  using Page = std::array<std::uint8_t, kPageBytes>;

  const Page* find_page(std::uint64_t page_index) const;
  Page& page_for_write(std::uint64_t page_index);
  void check_range(std::uint64_t offset, std::uint64_t len) const;

  std::uint64_t size_;
  std::unordered_map<std::uint64_t, std::unique_ptr<Page>> pages_;
};

struct MemTiming {
  /// Arrival of a read request to its first data beat.
  std::uint64_t read_service_ns{135};
  /// Arrival of the last write beat to the write response (posted acknowledge).
  std::uint64_t write_service_ns{12};
  /// Per-direction beat throughput ceiling in bytes/s; 0 disables the ceiling.
  std::uint64_t ceiling_bytes_per_sec{3'900'000'000};
};

/// Default timing for the emulator's FPGA-side DDR4.
inline constexpr MemTiming kFpgaSideTiming{135, 12, 3'900'000'000};
/// Default timing for the CPU-side DDR4 (64 bits at 2133 MT/s).
inline constexpr MemTiming kCpuSideTiming{135, 12, 17'064'000'000};

class MemoryController {
 public:
  /// Invoked at the first beat's arrival time; each beat carries its own arrival time.
  using ReadDone = std::function<void(std::vector<Beat>)>;
  using WriteDone = std::function<void(WriteResponse)>;

  MemoryController(Scheduler& sched, BackingStore& store, MemTiming timing);

  /// Throws BusError when the burst leaves the store.
  void read_burst(const BurstRequest& req, ReadDone done);
  /// Commits enabled bytes and responds after the write service time.
  void write_burst(const BurstRequest& req, std::vector<Beat> beats, WriteDone done);

  BackingStore& store() { return store_; }
  const MemTiming& timing() const { return timing_; }

  std::uint64_t read_bursts() const { return read_bursts_; }
  std::uint64_t write_bursts() const { return write_bursts_; }

 private:
  struct Pipeline {
    std::uint64_t free_ps{0};
  };

  std::uint64_t beat_interval_ps(std::uint16_t beat_bytes) const;
  std::uint64_t reserve(Pipeline& p, const BurstRequest& req);

  Scheduler& sched_;
  BackingStore& store_;
  MemTiming timing_;
  Pipeline read_pipe_;
  Pipeline write_pipe_;
  std::uint64_t read_bursts_{0};
  std::uint64_t write_bursts_{0};
};

}  // namespace memsim
