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
 * @file cpu_model.hpp
 * @brief Multi-core master with L1/L2 write-back caches and bounded outstanding requests.
 *
 * Address map seen by the cores:
 *   [cpu_dram_base, cpu_dram_base + cpu_dram_bytes)   CPU-side DDR, direct
 *   [fpga_base, fpga_base + emulator span)             emulator, through the AXI fabric
 *
 * The shared L2 is inclusive of the L1s and holds the line data; L1s only
 * track tags and recency, so they decide hit latency. A cacheable miss costs
 * one read credit and sends a line-fill burst. Dirty victims go to the
 * issuing core's eviction queue and leave as write bursts while write
 * credits last. A core stalls on a new miss only when it is out of read
 * credits or its eviction queue is full.
 *
 * Non-cacheable loads are single-beat reads. Non-cacheable stores are
 * single-beat strobed writes and the core waits for their response.
 * Mixing cacheable and non-cacheable accesses on one line is not coherent,
 * as with mismatched memory attributes on real hardware.
 */

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "memsim/axi_fabric.hpp"
#include "memsim/memory_model.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

enum class AccessKind : std::uint8_t { kLoad, kStore };
enum class AccessMode : std::uint8_t { kCacheable, kNonCacheable };

struct Access {
  AccessKind kind{AccessKind::kLoad};
  std::uint64_t addr{0};
  std::uint64_t value{0};  // store data, little endian
  std::uint8_t size{8};    // 1, 2, 4 or 8, naturally aligned
  AccessMode mode{AccessMode::kCacheable};
  bool wait{true};         // core blocks until this access completes
  std::function<void(std::uint64_t value, SimTime t)> on_complete;
};

/// Yields the core's next access, or nullopt when the program is finished.
using Program = std::function<std::optional<Access>()>;

struct CacheGeometry {
  std::uint64_t size_bytes{0};
  std::uint32_t ways{1};
  constexpr bool operator==(const CacheGeometry&) const = default;
};

struct CacheConfig {
  std::uint32_t line_bytes{64};
  CacheGeometry l1{32 * kKiB, 4};
  CacheGeometry l2{1 * kMiB, 16};
  std::uint64_t l1_hit_ns{2};
  std::uint64_t l2_hit_ns{25};
  constexpr bool operator==(const CacheConfig&) const = default;
};

struct CpuConfig {
  std::uint32_t cores{4};
  CacheConfig cache{};
  std::uint32_t read_credits{37};
  std::uint32_t write_credits{17};
  double frequency_scale{1.0};
  std::uint64_t issue_ns{1};  // core-side cost between non-blocking accesses
  std::uint64_t cpu_dram_base{0};
  std::uint64_t cpu_dram_bytes{2 * kGiB};
  MemTiming cpu_dram_timing{kCpuSideTiming};
  std::uint64_t fpga_base{0x10'0000'0000};
  std::uint16_t beat_bytes{kDefaultBeatBytes};
  MasterId master{0};
};

/// Set-associative tag array with LRU replacement. Slots are numbered set * ways + way.
class SetAssocCache {
 public:
  struct Victim {
    bool valid{false};
    std::uint64_t line{0};
    bool dirty{false};
    std::size_t slot{0};
  };

  SetAssocCache(std::uint64_t size_bytes, std::uint32_t ways, std::uint32_t line_bytes);

  /// Slot holding line number `line`, refreshing its recency when `touch`.
  std::optional<std::size_t> lookup(std::uint64_t line, bool touch = true);
  /// Installs `line` (must be absent) over the LRU way of its set; returns what was there.
  Victim insert(std::uint64_t line);
  /// Returns the slot the line occupied, if any.
  std::optional<std::size_t> invalidate(std::uint64_t line);

  void set_dirty(std::size_t slot, bool d) { ways_[slot].dirty = d; }
  bool dirty(std::size_t slot) const { return ways_[slot].dirty; }
  bool valid(std::size_t slot) const { return ways_[slot].valid; }
  std::uint64_t line_at(std::size_t slot) const { return ways_[slot].line; }

  std::size_t slots() const { return ways_.size(); }
  std::uint64_t sets() const { return sets_; }
  std::uint32_t associativity() const { return assoc_; }

 private:
  struct Way {
    std::uint64_t line{0};
    std::uint64_t stamp{0};
    bool valid{false};
    bool dirty{false};
  };

  std::uint64_t sets_;
  std::uint32_t assoc_;
  std::vector<Way> ways_;
  std::uint64_t clock_{0};
};

struct CoreStats {
  std::uint64_t loads{0};
  std::uint64_t stores{0};
  std::uint64_t l1_hits{0};
  std::uint64_t l2_hits{0};
  std::uint64_t l2_misses{0};  // line fills issued
  std::uint64_t mshr_merges{0};
  std::uint64_t uncached{0};
  std::uint64_t writebacks{0};
  std::uint64_t stalls{0};
  std::uint32_t max_reads_in_flight{0};
  std::uint32_t max_writes_in_flight{0};
  std::uint32_t max_eviction_queue{0};
};

class Cpu {
 public:
  /// `cpu_dram` may be null, leaving the CPU-side window unmapped.
  Cpu(Scheduler& sched, CpuConfig cfg, AxiFabric& fpga, MemoryController* cpu_dram);
  Cpu(const Cpu&) = delete;
  Cpu& operator=(const Cpu&) = delete;

  /// Starts `program` on `core`. `on_done` fires once the program is exhausted
  /// and every access it issued has completed.
  void run(std::uint32_t core, Program program, std::function<void(SimTime)> on_done = {});

  /// Queues a single access on `core` behind anything already queued there.
  /// Throws BusError for unmapped addresses, std::invalid_argument when misaligned.
  void load(std::uint32_t core, std::uint64_t addr, AccessMode mode,
            std::function<void(std::uint64_t, SimTime)> done, std::uint8_t size = 8);
  void store(std::uint32_t core, std::uint64_t addr, std::uint64_t value, AccessMode mode,
             std::function<void(std::uint64_t, SimTime)> done = {}, std::uint8_t size = 8);
  void submit(std::uint32_t core, Access a);

  /// Writes every dirty line back, leaving it cached clean. `done` fires when
  /// all write bursts have completed.
  void flush(std::function<void(SimTime)> done);
  /// Drops all cached lines. Dirty data is lost; call flush() first.
  void invalidate_all();

  void set_frequency_scale(double factor);
  double frequency_scale() const { return cfg_.frequency_scale; }

  const CpuConfig& config() const { return cfg_; }
  const CoreStats& stats(std::uint32_t core) const { return cores_.at(core).stats; }
  void reset_stats();
  std::uint32_t reads_in_flight(std::uint32_t core) const { return cores_.at(core).reads_in_flight; }
  std::uint32_t writes_in_flight(std::uint32_t core) const { return cores_.at(core).writes_in_flight; }
  std::size_t eviction_queue_depth(std::uint32_t core) const { return cores_.at(core).evictions.size(); }
  bool idle() const;

  /// True when `addr` is backed by the emulator window.
  bool is_fpga(std::uint64_t addr) const { return addr >= cfg_.fpga_base && addr - cfg_.fpga_base < fpga_.span_bytes(); }

 private:
  struct Writeback {
    std::uint64_t line{0};
    std::vector<std::uint8_t> data;
  };

  struct Core {
    std::deque<Access> queue;
    Program program;
    std::function<void(SimTime)> on_done;
    std::optional<Access> stalled;
    bool blocked{false};     // waiting on an access with wait = true
    bool step_scheduled{false};
    bool running{false};
    std::uint64_t outstanding{0};
    std::uint32_t reads_in_flight{0};
    std::uint32_t writes_in_flight{0};
    std::deque<Writeback> evictions;
    CoreStats stats;
  };

  struct Mshr {
    std::uint32_t core{0};
    std::vector<std::pair<std::uint32_t, Access>> ops;
  };

  void validate_access(const Access& a) const;
  std::uint64_t scaled(std::uint64_t ns) const;
  void schedule_step(std::uint32_t c, SimTime t);
  void step(std::uint32_t c);
  /// Returns false when the access must wait for resources.
  bool execute(std::uint32_t c, Access& a);
  void finish(std::uint32_t c, Access& a, std::uint64_t value, SimTime t);
  void resume(std::uint32_t c);

  bool exec_cacheable(std::uint32_t c, Access& a);
  bool exec_uncached(std::uint32_t c, Access& a);
  void apply(std::size_t slot, Access& a, std::uint64_t& value);

  void issue_fill(std::uint64_t line);
  void on_fill(std::uint64_t line, const std::vector<Beat>& beats);
  void evict(std::uint32_t c, const SetAssocCache::Victim& v);
  void pump_evictions(std::uint32_t c);
  void on_writeback_done(std::uint32_t c, std::uint64_t line);
  void check_flush();

  void mem_read(std::uint64_t addr, std::uint16_t burst_len, std::uint32_t core,
                std::function<void(std::vector<Beat>)> done);
  void mem_write(std::uint64_t addr, std::vector<Beat> beats, std::uint32_t core, std::function<void()> done);

  Scheduler& sched_;
  CpuConfig cfg_;
  AxiFabric& fpga_;
  MemoryController* cpu_dram_;
  std::vector<Core> cores_;
  std::vector<SetAssocCache> l1_;
  SetAssocCache l2_;
  std::vector<std::uint8_t> l2_data_;
  std::map<std::uint64_t, Mshr> mshrs_;
  std::map<std::uint64_t, std::uint32_t> wb_pending_;         // line -> queued or in-flight writebacks
  std::set<std::uint64_t> deferred_fills_;  // fills waiting for a writeback of the same line
  std::vector<std::function<void(SimTime)>> flush_waiters_;
};

}  // namespace memsim
