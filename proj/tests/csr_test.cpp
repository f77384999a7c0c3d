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

#include <cmath>
#include <vector>

#include "memsim/emulator.hpp"

namespace memsim {
namespace {

struct CsrFixture : ::testing::Test {
  Scheduler sched;
  std::unique_ptr<Emulator> emu;

  void SetUp() override {
    EmulatorConfig cfg;
    RegionConfig a, b;
    b.boundary = 2 * kGiB;
    cfg.regions = {a, b};
    emu = std::make_unique<Emulator>(sched, cfg);
  }
  Csr& csr() { return emu->csr(); }
};

TEST(PercentToThreshold, Conversions) {
  EXPECT_EQ(percent_to_threshold(0.0), 0u);
  EXPECT_EQ(percent_to_threshold(10.0), 429496730u);
  EXPECT_EQ(percent_to_threshold(50.0), 0x80000000u);
  EXPECT_EQ(percent_to_threshold(100.0), 0xffffffffu);
  EXPECT_THROW(percent_to_threshold(-0.1), CsrError);
  EXPECT_THROW(percent_to_threshold(100.1), CsrError);
  EXPECT_THROW(percent_to_threshold(std::nan("")), CsrError);
}

TEST_F(CsrFixture, SetBoundaryMovesTheSplit) {
  csr().set_boundary(1, 1 * kGiB);
  EXPECT_EQ(emu->fabric().route(1 * kGiB), 1u);
  EXPECT_EQ(csr().read32(0x100 + csr_reg::kBoundaryMb), 1024u);
}

TEST_F(CsrFixture, InvalidBoundaryLeavesStateUnchanged) {
  EXPECT_THROW(csr().set_boundary(1, 0), CsrError);
  EXPECT_THROW(csr().set_boundary(1, 3 * kGiB + 1), CsrError);
  EXPECT_EQ(csr().region_config(1).boundary, 2 * kGiB);
  EXPECT_EQ(emu->fabric().route(2 * kGiB - 1), 0u);
}

TEST_F(CsrFixture, LatencyUnitsAreHundredsOfNanoseconds) {
  csr().set_latency(0, 20, 4);
  EXPECT_EQ(csr().region_config(0).rd_latency_ns, 2000u);
  EXPECT_EQ(csr().region_config(0).wr_latency_ns, 400u);
  EXPECT_EQ(csr().read32(csr_reg::kRdLatency), 20u);
  EXPECT_EQ(csr().read32(csr_reg::kWrLatency), 4u);
}

TEST_F(CsrFixture, ThroughputActivatesAtTheNextPulse) {
  sched.run_until(SimTime{250});
  csr().set_throughput(0, 10, 40);
  EXPECT_EQ(csr().region_config(0).rd_bw, 100'000'000u);
  EXPECT_EQ(csr().region_config(0).wr_bw, 400'000'000u);
  EXPECT_TRUE(emu->region(0).bucket(Direction::kRead).unlimited());
  sched.run_until(SimTime{300});
  EXPECT_DOUBLE_EQ(emu->region(0).bucket(Direction::kRead).rate_bytes_per_pulse(), 10.0);
  EXPECT_DOUBLE_EQ(emu->region(0).bucket(Direction::kWrite).rate_bytes_per_pulse(), 40.0);
}

TEST_F(CsrFixture, ErrorRates) {
  csr().set_error_rate(1, 10.0, 100.0);
  EXPECT_EQ(csr().region_config(1).rd_err_threshold, 429496730u);
  EXPECT_EQ(csr().region_config(1).wr_err_threshold, 0xffffffffu);
  EXPECT_THROW(csr().set_error_rate(1, 5.0, 101.0), CsrError);
  EXPECT_EQ(csr().region_config(1).rd_err_threshold, 429496730u);
  csr().set_error_threshold(1, 7, 8);
  EXPECT_EQ(csr().read32(0x100 + csr_reg::kRdErrThreshold), 7u);
  EXPECT_EQ(csr().read32(0x100 + csr_reg::kWrErrThreshold), 8u);
}

TEST_F(CsrFixture, InvalidBankIsRejected) {
  EXPECT_THROW(csr().set_latency(2, 1, 1), CsrError);
  EXPECT_THROW(csr().get_counters(5), CsrError);
  EXPECT_THROW(csr().read32(0x200), CsrError);
}

TEST_F(CsrFixture, CountersTrackTrafficAndReset) {
  BurstRequest r;
  r.burst_len = 4;
  emu->fabric().issue_read(r, {});
  BurstRequest w = r;
  w.is_write = true;
  w.address = 2 * kGiB;
  emu->fabric().issue_write(w, make_beats(w), {});
  sched.run_until(SimTime{10'000});
  EXPECT_EQ(csr().get_counters(0).rd_bytes, 64u);
  EXPECT_EQ(csr().get_counters(0).wr_bytes, 0u);
  EXPECT_EQ(csr().get_counters(1).wr_bytes, 64u);
  EXPECT_EQ(csr().read32(csr_reg::kRdBytesLo), 64u);
  EXPECT_EQ(csr().read32(csr_reg::kRdBytesLo + 4), 0u);
  csr().write32(csr_reg::kCounterReset, 1);
  EXPECT_EQ(csr().get_counters(0), Counters{});
  EXPECT_EQ(csr().get_counters(1).wr_bytes, 64u);
}

TEST_F(CsrFixture, RegisterWritesAreIdempotentAndPreserveTheOtherDirection) {
  csr().write32(csr_reg::kRdLatency, 20);
  csr().write32(csr_reg::kRdLatency, 20);
  csr().write32(csr_reg::kWrLatency, 3);
  EXPECT_EQ(csr().region_config(0).rd_latency_ns, 2000u);
  EXPECT_EQ(csr().region_config(0).wr_latency_ns, 300u);
  csr().write32(csr_reg::kWrThpt, 5);
  EXPECT_EQ(csr().region_config(0).rd_bw, 0u);
  EXPECT_EQ(csr().region_config(0).wr_bw, 50'000'000u);
  csr().write32(csr_reg::kRdErrThreshold, 99);
  EXPECT_EQ(csr().region_config(0).wr_err_threshold, 0u);
  EXPECT_THROW(csr().write32(csr_reg::kRdBytesLo, 1), CsrError);
  EXPECT_THROW(csr().write32(csr_reg::kVersion, 1), CsrError);
}

TEST_F(CsrFixture, GlobalRegisters) {
  EXPECT_EQ(csr().read32(csr_reg::kVersion), csr_reg::kVersionValue);
  EXPECT_EQ(csr().read32(csr_reg::kBankCount), 2u);
  EXPECT_EQ(csr().bank_count(), 2u);
}

TEST_F(CsrFixture, ScheduledChangesApplyAtTheirTime) {
  csr().schedule(SimTime{500}, [](Csr& c) { c.set_latency(0, 5, 0); });
  sched.run_until(SimTime{499});
  EXPECT_EQ(csr().region_config(0).rd_latency_ns, 0u);
  sched.run_until(SimTime{500});
  EXPECT_EQ(csr().region_config(0).rd_latency_ns, 500u);
}

TEST_F(CsrFixture, MeApiDelegates) {
  MeApi& api = emu->api();
  api.SetLatency(1, 10, 12);
  api.SetThroughput(1, 30, 40);
  api.SetErrorRate(1, 5.0, 20.0);
  api.SetBoundary(1, 3 * kGiB);
  const RegionConfig& c = csr().region_config(1);
  EXPECT_EQ(c.rd_latency_ns, 1000u);
  EXPECT_EQ(c.wr_latency_ns, 1200u);
  EXPECT_EQ(c.rd_bw, 300'000'000u);
  EXPECT_EQ(c.wr_bw, 400'000'000u);
  EXPECT_EQ(c.rd_err_threshold, percent_to_threshold(5.0));
  EXPECT_EQ(c.wr_err_threshold, percent_to_threshold(20.0));
  EXPECT_EQ(c.boundary, 3 * kGiB);
  unsigned long v = 1;
  api.GetXferredRdDataAmt(1, &v);
  EXPECT_EQ(v, 0u);
  api.GetWrBitErrors(1, &v);
  EXPECT_EQ(v, 0u);
}

}  // namespace
}  // namespace memsim
