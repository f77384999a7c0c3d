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

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "memsim/emulator.hpp"

namespace memsim {
namespace {

struct FabricFixture : ::testing::Test {
  Scheduler sched;
  std::unique_ptr<Emulator> emu;

  void make(std::vector<RegionConfig> regions) {
    EmulatorConfig cfg;
    cfg.regions = std::move(regions);
    emu = std::make_unique<Emulator>(sched, cfg);
  }
  void make_two(std::uint64_t rd1 = 0, std::uint64_t rd2 = 0) {
    RegionConfig a, b;
    a.rd_latency_ns = rd1;
    b.boundary = 2 * kGiB;
    b.rd_latency_ns = rd2;
    make({a, b});
  }
  AxiFabric& fab() { return emu->fabric(); }

  static BurstRequest req(std::uint64_t addr, std::uint32_t id, bool write = false, std::uint16_t len = 4) {
    BurstRequest r;
    r.address = addr;
    r.burst_len = len;
    r.txid = TransactionId{id};
    r.is_write = write;
    return r;
  }
};

TEST_F(FabricFixture, RoutesByBoundary) {
  make_two();
  EXPECT_EQ(fab().route(0), 0u);
  EXPECT_EQ(fab().route(1 * kGiB), 0u);
  EXPECT_EQ(fab().route(2 * kGiB), 1u);
  EXPECT_EQ(fab().route(3 * kGiB), 1u);
  EXPECT_THROW(fab().route(5 * kGiB), BusError);
  EXPECT_EQ(fab().region_extent(0), std::make_pair(std::uint64_t{0}, 2 * kGiB));
  EXPECT_EQ(fab().region_extent(1), std::make_pair(2 * kGiB, 4 * kGiB));
}

TEST_F(FabricFixture, AddressBelowFirstRegionIsBusError) {
  RegionConfig a;
  a.boundary = 16 * kMiB;
  make({a});
  EXPECT_THROW(fab().route(0), BusError);
  EXPECT_THROW(fab().issue_read(req(0, 0), {}), BusError);
}

TEST_F(FabricFixture, FourBeatReadRoundTrip) {
  make_two();
  emu->store().write_u64(64, 42);
  std::optional<ReadCompletion> got;
  fab().issue_read(req(64, 3), [&](ReadCompletion& c) { got = c; });
  sched.run_until(SimTime{10'000});
  ASSERT_TRUE(got);
  ASSERT_EQ(got->beats.size(), 4u);
  for (const auto& b : got->beats) EXPECT_EQ(b.txid.value, 3u);
  std::uint64_t v = 0;
  std::memcpy(&v, got->beats[0].data.data(), 8);
  EXPECT_EQ(v, 42u);
  // request hop, DDR service plus four beats, response hop
  EXPECT_EQ(got->completed, SimTime{114 + 148 + 114});
  EXPECT_EQ(fab().stats(0).read_bytes, 64u);
  EXPECT_EQ(fab().outstanding(), 0u);
}

TEST_F(FabricFixture, WriteResponseTiming) {
  make_two();
  std::optional<WriteCompletion> got;
  std::vector<std::uint8_t> data(64, 0x3c);
  auto r = req(128, 2, true);
  fab().issue_write(r, make_beats(r, data), [&](const WriteCompletion& c) { got = c; });
  sched.run_until(SimTime{10'000});
  ASSERT_TRUE(got);
  EXPECT_EQ(got->resp.txid.value, 2u);
  EXPECT_TRUE(got->resp.ok);
  EXPECT_EQ(got->completed, SimTime{114 + 29 + 114});
  EXPECT_EQ(emu->store().read_u64(128 + 56), 0x3c3c3c3c3c3c3c3cull);
}

TEST_F(FabricFixture, MalformedBurstsAreProtocolErrors) {
  make_two();
  auto r = req(0, 0, true, 4);
  EXPECT_THROW(fab().issue_write(r, make_beats(req(0, 0, true, 3)), {}), ProtocolError);
  auto cross = req(2 * kGiB - 32, 0, false, 4);
  EXPECT_THROW(fab().issue_read(cross, {}), ProtocolError);
  EXPECT_THROW(fab().issue_read(req(0, 0, true), {}), ProtocolError);
  EXPECT_THROW(fab().issue_write(req(0, 0, false), make_beats(req(0, 0)), {}), ProtocolError);
}

TEST_F(FabricFixture, SameIdCompletesInIssueOrderAcrossRegions) {
  make_two(2000, 0);
  std::vector<std::uint64_t> order;
  fab().issue_read(req(0, 5), [&](ReadCompletion& c) { order.push_back(c.req.address); });
  fab().issue_read(req(2 * kGiB, 5), [&](ReadCompletion& c) { order.push_back(c.req.address); });
  sched.run_until(SimTime{100'000});
  EXPECT_EQ(order, (std::vector<std::uint64_t>{0, 2 * kGiB}));
}

TEST_F(FabricFixture, DifferentIdsMayReorder) {
  make_two(2000, 0);
  std::vector<std::uint64_t> order;
  fab().issue_read(req(0, 5), [&](ReadCompletion& c) { order.push_back(c.req.address); });
  fab().issue_read(req(2 * kGiB, 6), [&](ReadCompletion& c) { order.push_back(c.req.address); });
  sched.run_until(SimTime{100'000});
  EXPECT_EQ(order, (std::vector<std::uint64_t>{2 * kGiB, 0}));
}

TEST_F(FabricFixture, ReadAfterWriteSeesTheWrite) {
  RegionConfig a;
  a.wr_latency_ns = 3000;
  make({a});
  std::vector<std::uint8_t> data(64, 0x99);
  auto w = req(0, 1, true);
  fab().issue_write(w, make_beats(w, data), {});
  std::optional<ReadCompletion> got;
  fab().issue_read(req(0, 2), [&](ReadCompletion& c) { got = c; });
  sched.run_until(SimTime{100'000});
  ASSERT_TRUE(got);
  EXPECT_EQ(got->beats[0].data[0], 0x99);
}

TEST_F(FabricFixture, BoundaryChangeWaitsForInFlightTraffic) {
  make_two(2000, 0);
  std::optional<ReadCompletion> first;
  fab().issue_read(req(1 * kGiB + 512 * kMiB, 1), [&](ReadCompletion& c) { first = c; });
  sched.run_until(SimTime{200});
  fab().set_boundary(1, 1 * kGiB);
  EXPECT_TRUE(fab().boundary_change_pending());
  // Queued behind the pending change, then routed under the new split.
  std::optional<ReadCompletion> second;
  fab().issue_read(req(1 * kGiB + 512 * kMiB, 2), [&](ReadCompletion& c) { second = c; });
  sched.run_until(SimTime{100'000});
  ASSERT_TRUE(first && second);
  EXPECT_FALSE(fab().boundary_change_pending());
  EXPECT_EQ(fab().route(1 * kGiB + 512 * kMiB), 1u);
  EXPECT_GT(first->completed.ns, 2000u);
  EXPECT_LT(second->completed - first->completed, 1000u);
  EXPECT_EQ(fab().stats(1).read_bytes, 64u);
}

TEST_F(FabricFixture, BoundaryValidation) {
  make_two();
  EXPECT_THROW(fab().set_boundary(1, 0), std::invalid_argument);
  EXPECT_THROW(fab().set_boundary(1, 2 * kGiB + 5), std::invalid_argument);
  EXPECT_THROW(fab().set_boundary(1, 4 * kGiB), std::invalid_argument);
  EXPECT_THROW(fab().set_boundary(2, 3 * kGiB), std::invalid_argument);
  EXPECT_THROW(fab().set_boundary(0, 2 * kGiB), std::invalid_argument);
  EXPECT_NO_THROW(fab().set_boundary(1, 3 * kGiB));
  EXPECT_EQ(fab().route(2 * kGiB), 0u);
}

TEST_F(FabricFixture, PortIssueIntervalSpacesAddressPhases) {
  make_two();
  std::vector<SimTime> done;
  for (std::uint32_t i = 0; i < 3; ++i) {
    fab().issue_read(req(64 * i, i), [&](ReadCompletion& c) { done.push_back(c.completed); });
  }
  sched.run_until(SimTime{10'000});
  ASSERT_EQ(done.size(), 3u);
  EXPECT_EQ(done[1] - done[0], 140u);
  EXPECT_EQ(done[2] - done[1], 140u);
}

}  // namespace
}  // namespace memsim
