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
 * @file rate_controller.hpp
 * @brief Per-region emulation engine sitting between the AXI fabric and DDR.
 *
 * For each direction a controller
 *   - snapshots the configured latency into a per-ID FIFO when the address
 *     phase arrives,
 *   - flips payload bits with an LFSR-driven comparator when the data arrives,
 *   - holds the data for the snapshotted latency, measured from its arrival,
 *   - releases beats in per-ID FIFO order, charging a byte token bucket that
 *     the 100-ns pulse refills.
 *
 * The read and write directions share nothing except the pulse.
 */

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "memsim/axi_types.hpp"
#include "memsim/memory_model.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

enum class Direction : std::uint8_t { kRead = 0, kWrite = 1 };

/// Emulation parameters of one memory region.
struct RegionConfig {
  std::uint64_t boundary{0};  // region start, byte offset into the emulator store
  std::uint64_t rd_latency_ns{0};
  std::uint64_t wr_latency_ns{0};
  std::uint64_t rd_bw{0};  // bytes/s, 0 = unlimited
  std::uint64_t wr_bw{0};
  std::uint32_t rd_err_threshold{0};  // per-bit flip probability = threshold / 2^32
  std::uint32_t wr_err_threshold{0};

  constexpr bool operator==(const RegionConfig&) const = default;
};

/// Granularities of the control interface.
inline constexpr std::uint64_t kLatencyUnitNs = 100;
inline constexpr std::uint64_t kBandwidthUnit = 10'000'000;  // 10 MB/s
inline constexpr std::uint64_t kBoundaryAlign = kMiB;

/// Checks the invariants on a RegionConfig; throws std::invalid_argument.
void validate_region_config(const RegionConfig& cfg);

struct LatencyRecord {
  std::uint64_t delay_ns{0};
  std::uint16_t burst_len{0};
  constexpr bool operator==(const LatencyRecord&) const = default;
};

/// Ordered map from transaction ID to the FIFO of latency snapshots that the
/// matching data bursts will consume.
class PendingLatencyMap {
 public:
  void push(TransactionId id, LatencyRecord rec) { map_[id].push_back(rec); }
  /// Removes and returns the oldest record for `id`.
  std::optional<LatencyRecord> pop(TransactionId id);
  std::size_t depth(TransactionId id) const;
  std::size_t total() const;
  const std::deque<LatencyRecord>* records(TransactionId id) const;

 private:
  std::map<TransactionId, std::deque<LatencyRecord>> map_;
};

/// Byte-denominated token bucket refilled once per pulse.
///
/// Capacity is one pulse's refill plus one beat. Tokens are tracked exactly in
/// units of 1e-9 byte so that rates which are not a whole number of bytes per
/// pulse accumulate without drift.
class TokenBucket {
 public:
  TokenBucket() = default;

  /// bytes_per_sec == 0 disables throttling.
  void configure(std::uint64_t bytes_per_sec, std::uint64_t pulse_ns, std::uint32_t beat_bytes);

  bool unlimited() const { return bytes_per_sec_ == 0; }
  std::uint64_t bytes_per_sec() const { return bytes_per_sec_; }
  double rate_bytes_per_pulse() const { return static_cast<double>(refill_) / kScale; }
  double capacity_bytes() const { return static_cast<double>(capacity_) / kScale; }
  double tokens_bytes() const { return static_cast<double>(tokens_) / kScale; }
  bool full() const { return tokens_ >= capacity_; }

  /// Adds one pulse worth of tokens, clamped to capacity. Returns false when already full.
  bool refill();
  /// Spends `bytes` if affordable. Always succeeds when unlimited.
  bool try_consume(std::uint64_t bytes);

 private:
  static constexpr std::uint64_t kScale = 1'000'000'000;

  std::uint64_t bytes_per_sec_{0};
  std::uint64_t refill_{0};
  std::uint64_t capacity_{0};
  std::uint64_t tokens_{0};
};

/// 32-bit Galois LFSR, polynomial x^32 + x^22 + x^2 + x + 1 (period 2^32 - 1).
class Lfsr32 {
 public:
  static constexpr std::uint32_t kTaps = 0x80200003u;

  explicit Lfsr32(std::uint32_t seed = 1);

  std::uint32_t next() {
    const std::uint32_t lsb = state_ & 1u;
    state_ >>= 1;
    if (lsb) state_ ^= kTaps;
    return state_;
  }
  std::uint32_t state() const { return state_; }

 private:
  std::uint32_t state_;
};

/// Expands a run seed into a nonzero LFSR seed for one (region, direction) stream.
std::uint32_t derive_lfsr_seed(std::uint64_t run_seed, std::size_t region, Direction dir);

/// Flips each bit whose LFSR draw falls below `threshold`. Advances the LFSR
/// exactly 8 * payload.size() steps and returns the number of flipped bits.
std::uint64_t inject_errors(std::span<std::uint8_t> payload, std::uint32_t threshold, Lfsr32& lfsr);

/// Per-region statistics. All counters saturate at 2^64 - 1.
struct Counters {
  std::uint64_t rd_bytes{0};
  std::uint64_t wr_bytes{0};
  std::uint64_t rd_bit_errors{0};
  std::uint64_t wr_bit_errors{0};
  constexpr bool operator==(const Counters&) const = default;
};

class RateController : public PulseSink {
 public:
  using ReadSink = std::function<void(std::vector<Beat>)>;
  using WriteSink = std::function<void(WriteResponse)>;
  /// Observation hook fired for every released beat (read release / write commit hand-off).
  using ReleaseObserver = std::function<void(Direction, SimTime, std::uint32_t bytes)>;

  RateController(Scheduler& sched, MemoryController& memory, std::size_t index, RegionConfig cfg,
                 std::uint64_t run_seed, std::uint16_t beat_bytes = kDefaultBeatBytes,
                 std::uint64_t pulse_ns = PulseTimer::kDefaultPeriodNs);

  RateController(const RateController&) = delete;
  RateController& operator=(const RateController&) = delete;

  void set_read_sink(ReadSink sink) { read_sink_ = std::move(sink); }
  void set_write_sink(WriteSink sink) { write_sink_ = std::move(sink); }
  void set_release_observer(ReleaseObserver obs) { observer_ = std::move(obs); }

  /// AR: snapshot the read latency for this burst and forward to memory.
  void on_ar(const BurstRequest& req);
  /// R data from memory. beats[0].time is the first beat's arrival.
  void on_r_burst(SimTime first_beat_arrival, std::vector<Beat> beats);
  /// AW plus its W beats.
  void on_aw_w(const BurstRequest& req, std::vector<Beat> beats);
  /// B passes through unchanged.
  WriteResponse on_b(const WriteResponse& resp) const { return resp; }
  void on_pulse(SimTime now) override;
  bool needs_pulse() const override;
  /// Timer to re-arm once a bucket has room to refill.
  void set_pulse_timer(PulseTimer* timer) { timer_ = timer; }

  // Live configuration. Latency and error changes act on traffic arriving
  // afterward; bandwidth changes take effect on the next pulse.
  void set_latency_ns(std::uint64_t rd_ns, std::uint64_t wr_ns);
  void set_bandwidth(std::uint64_t rd_bytes_per_sec, std::uint64_t wr_bytes_per_sec);
  void set_error_thresholds(std::uint32_t rd, std::uint32_t wr);
  void set_boundary(std::uint64_t boundary) { cfg_.boundary = boundary; }

  /// The configuration as last written. Bandwidth may not be active until the next pulse.
  const RegionConfig& config() const { return cfg_; }
  std::size_t index() const { return index_; }
  const Counters& counters() const { return counters_; }
  void reset_counters() { counters_ = Counters{}; }

  const PendingLatencyMap& pending(Direction d) const { return d == Direction::kRead ? pending_rd_ : pending_wr_; }
  const TokenBucket& bucket(Direction d) const { return channel(d).bucket; }
  std::size_t held_bursts(Direction d) const { return channel(d).held; }
  bool idle() const;

 private:
  struct HeldBurst {
    BurstRequest req;
    std::vector<Beat> beats;
    std::vector<SimTime> eligible;
    std::size_t next{0};
    std::uint64_t seq{0};
  };

  struct Channel {
    Direction dir{Direction::kRead};
    std::map<TransactionId, std::deque<HeldBurst>> queues;
    std::optional<TransactionId> active;
    TokenBucket bucket;
    std::optional<std::uint64_t> pending_bw;
    Lfsr32 lfsr{1};
    std::size_t held{0};
    std::uint64_t next_seq{0};
    SimTime wake_at{std::numeric_limits<std::uint64_t>::max()};
  };

  Channel& channel(Direction d) { return d == Direction::kRead ? rd_ : wr_; }
  const Channel& channel(Direction d) const { return d == Direction::kRead ? rd_ : wr_; }

  void hold(Channel& ch, const BurstRequest& req, std::vector<Beat> beats, std::uint64_t delay_ns);
  void pump(Channel& ch);
  void schedule_wake(Channel& ch, SimTime t);
  void complete(Channel& ch, HeldBurst burst);

  Scheduler& sched_;
  MemoryController& memory_;
  std::size_t index_;
  RegionConfig cfg_;
  std::uint16_t beat_bytes_;
  std::uint64_t pulse_ns_;
  PendingLatencyMap pending_rd_;
  PendingLatencyMap pending_wr_;
  Channel rd_;
  Channel wr_;
  Counters counters_;
  ReadSink read_sink_;
  WriteSink write_sink_;
  ReleaseObserver observer_;
  PulseTimer* timer_{nullptr};
};

}  // namespace memsim
