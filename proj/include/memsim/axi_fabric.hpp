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
 * @file axi_fabric.hpp
 * @brief Transaction-level AXI4 interconnect between masters and region controllers.
 *
 * Ordering rules:
 *   - Requests of one (master, direction, txid) stream launch in issue order.
 *     A request whose stream still has bursts in flight to a different region
 *     waits until those complete, so same-ID traffic never reorders across
 *     regions of different speed.
 *   - A read waits for any earlier, overlapping write of the same master.
 *   - Different IDs are unconstrained and may complete out of order.
 *
 * The master port accepts at most one address phase per issue interval and
 * direction. Controllers see IDs widened with the master number, as an
 * interconnect with an ID prefix would present them.
 */

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "memsim/axi_types.hpp"
#include "memsim/rate_controller.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

struct FabricTiming {
  std::uint64_t request_ns{114};   // master port to controller, AR/AW/W
  std::uint64_t response_ns{114};  // controller to master, R/B
  std::uint64_t read_issue_interval_ns{140};
  std::uint64_t write_issue_interval_ns{140};
  constexpr bool operator==(const FabricTiming&) const = default;
};

struct ReadCompletion {
  std::uint64_t handle{0};
  BurstRequest req;
  std::vector<Beat> beats;
  SimTime completed;
};

struct WriteCompletion {
  std::uint64_t handle{0};
  BurstRequest req;
  WriteResponse resp;
  SimTime completed;
};

using ReadCallback = std::function<void(ReadCompletion&)>;
using WriteCallback = std::function<void(const WriteCompletion&)>;

/// Fabric-side tally, kept separately from the controllers' counters.
struct FabricRegionStats {
  std::uint64_t read_beats{0};
  std::uint64_t read_bytes{0};
  std::uint64_t read_bursts{0};
  std::uint64_t write_beats{0};
  std::uint64_t write_bytes{0};
  std::uint64_t write_bursts{0};
};

class AxiFabric {
 public:
  using Handle = std::uint64_t;

  AxiFabric(Scheduler& sched, FabricTiming timing, std::uint64_t span_bytes);
  AxiFabric(const AxiFabric&) = delete;
  AxiFabric& operator=(const AxiFabric&) = delete;

  /// Regions must be attached in ascending boundary order.
  void attach_region(RateController& rc);

  /// Region whose [boundary, next boundary) interval holds `address`. Throws BusError.
  std::size_t route(std::uint64_t address) const;
  std::size_t region_count() const { return regions_.size(); }
  /// [start, end) of region `i`.
  std::pair<std::uint64_t, std::uint64_t> region_extent(std::size_t i) const;
  std::uint64_t span_bytes() const { return span_; }

  /// Throws BusError when unroutable, ProtocolError on malformed bursts.
  Handle issue_read(BurstRequest req, ReadCallback cb);
  Handle issue_write(BurstRequest req, std::vector<Beat> beats, WriteCallback cb);

  /// Moves the start of `bank`. Launches pause until in-flight bursts drain, then
  /// the new split applies. Throws std::invalid_argument if misaligned or not
  /// strictly between the neighbors.
  void set_boundary(std::size_t bank, std::uint64_t boundary);
  bool boundary_change_pending() const { return pending_boundary_.has_value(); }

  std::size_t outstanding() const { return entries_.size(); }
  std::size_t in_flight() const { return in_flight_; }
  const FabricRegionStats& stats(std::size_t region) const { return stats_.at(region); }
  const FabricTiming& timing() const { return timing_; }

 private:
  struct Entry {
    Handle handle{0};
    BurstRequest req;
    std::vector<Beat> beats;  // write data
    ReadCallback read_cb;
    WriteCallback write_cb;
    std::size_t region{0};
    bool launched{false};
  };

  struct StreamKey {
    MasterId master;
    bool is_write;
    std::uint32_t txid;
    auto operator<=>(const StreamKey&) const = default;
  };

  struct InFlightKey {
    std::size_t region;
    bool is_write;
    std::uint32_t slave_id;
    auto operator<=>(const InFlightKey&) const = default;
  };

  static std::uint32_t slave_id(const BurstRequest& req) {
    return (static_cast<std::uint32_t>(req.master) << 16) | (req.txid.value & 0xffffu);
  }

  Handle enqueue(Entry e);
  void check_route(const BurstRequest& req) const;
  void try_launch(const StreamKey& key);
  void try_launch_master(MasterId master);
  void try_launch_all();
  bool read_blocked_by_write(const Entry& e) const;
  void launch(Entry& e);
  void on_read_released(std::size_t region, std::vector<Beat> beats);
  void on_write_response(std::size_t region, WriteResponse resp);
  void retire(const Entry& e);
  void apply_pending_boundary();
  void validate_boundary(std::size_t bank, std::uint64_t boundary) const;

  Scheduler& sched_;
  FabricTiming timing_;
  std::uint64_t span_;
  std::vector<RateController*> regions_;
  std::vector<FabricRegionStats> stats_;

  Handle next_handle_{1};
  std::unordered_map<Handle, Entry> entries_;
  std::map<StreamKey, std::deque<Handle>> streams_;
  std::map<InFlightKey, std::deque<Handle>> in_flight_by_id_;
  std::map<MasterId, std::vector<Handle>> writes_by_master_;
  std::size_t in_flight_{0};
  std::uint64_t read_port_free_{0};
  std::uint64_t write_port_free_{0};
  std::optional<std::pair<std::size_t, std::uint64_t>> pending_boundary_;
};

}  // namespace memsim
