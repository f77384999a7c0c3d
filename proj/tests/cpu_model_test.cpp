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
#include <map>
#include <random>
#include <vector>

#include "memsim/workloads.hpp"

namespace memsim {
namespace {

constexpr std::uint64_t kFpga = 0x10'0000'0000;

struct Timed {
  std::uint64_t value{0};
  std::uint64_t latency{0};
};

// Issues one blocking load on `core` once the machine is quiet and returns its latency.
Timed timed_load(Machine& m, std::uint64_t addr, AccessMode mode = AccessMode::kCacheable, std::uint32_t core = 0) {
  bool done = false;
  Timed out;
  const SimTime start = m.sched().now();
  m.cpu().load(core, addr, mode, [&](std::uint64_t v, SimTime t) {
    out.value = v;
    out.latency = t - start;
    done = true;
  });
  m.run_until(done, 1'000'000'000);
  m.drain();
  return out;
}

std::uint64_t timed_store(Machine& m, std::uint64_t addr, std::uint64_t v, AccessMode mode) {
  bool done = false;
  std::uint64_t lat = 0;
  const SimTime start = m.sched().now();
  m.cpu().store(0, addr, v, mode, [&](std::uint64_t, SimTime t) {
    lat = t - start;
    done = true;
  });
  m.run_until(done, 1'000'000'000);
  m.drain();
  return lat;
}

TEST(SetAssocCache, LruReplacementWithinASet) {
  SetAssocCache c(4 * 64, 2, 64);  // 2 sets x 2 ways
  EXPECT_EQ(c.sets(), 2u);
  EXPECT_FALSE(c.insert(0).valid);
  EXPECT_FALSE(c.insert(2).valid);
  c.lookup(0);
  const auto v = c.insert(4);
  EXPECT_TRUE(v.valid);
  EXPECT_EQ(v.line, 2u);
  EXPECT_TRUE(c.lookup(0));
  EXPECT_FALSE(c.lookup(2));
  EXPECT_TRUE(c.invalidate(4));
  EXPECT_FALSE(c.lookup(4));
  EXPECT_THROW(SetAssocCache(100, 3, 64), std::invalid_argument);
}

TEST(Cpu, HitAndMissLatencies) {
  Machine m(MachineConfig{});
  const Timed miss = timed_load(m, kFpga + 4096);
  EXPECT_EQ(miss.latency, 25u + 114 + 148 + 114);
  EXPECT_EQ(timed_load(m, kFpga + 4096 + 8).latency, 2u);
  EXPECT_EQ(timed_load(m, kFpga + 4096, AccessMode::kCacheable, 1).latency, 25u);
  const Timed cpu_miss = timed_load(m, 1 * kMiB);
  // 25 ns tag check, 135 ns service, three beat intervals at 17.064 GB/s
  EXPECT_EQ(cpu_miss.latency, 25u + 138);
}

TEST(Cpu, FrequencyScaleStretchesCoreSideLatency) {
  MachineConfig mc;
  Machine m(mc);
  timed_load(m, kFpga);
  m.cpu().set_frequency_scale(2.0);
  EXPECT_EQ(timed_load(m, kFpga).latency, 4u);
  EXPECT_EQ(timed_load(m, kFpga, AccessMode::kCacheable, 2).latency, 50u);
  EXPECT_EQ(timed_load(m, kFpga + 64 * kKiB).latency, 50u + 376);
  EXPECT_THROW(m.cpu().set_frequency_scale(0.0), std::invalid_argument);
  EXPECT_THROW(m.cpu().set_frequency_scale(-1.0), std::invalid_argument);
  EXPECT_THROW(m.cpu().set_frequency_scale(std::nan("")), std::invalid_argument);
  EXPECT_THROW(m.cpu().set_frequency_scale(INFINITY), std::invalid_argument);
  EXPECT_DOUBLE_EQ(m.cpu().frequency_scale(), 2.0);
}

TEST(Cpu, NonCacheableAccessesBypassTheCaches) {
  Machine m(MachineConfig{});
  m.emulator().store().write_u64(8, 0xfeed);
  for (int i = 0; i < 3; ++i) {
    const Timed t = timed_load(m, kFpga + 8, AccessMode::kNonCacheable);
    EXPECT_EQ(t.latency, 114u + 135 + 114);
    EXPECT_EQ(t.value, 0xfeedu);
  }
  EXPECT_EQ(timed_store(m, kFpga + 8, 0xbeef, AccessMode::kNonCacheable), 114u + 17 + 114);
  EXPECT_EQ(m.emulator().store().read_u64(8), 0xbeefu);
  EXPECT_EQ(m.emulator().store().read_u64(0), 0u);
  EXPECT_EQ(m.cpu().stats(0).l2_misses, 0u);
  EXPECT_EQ(m.cpu().stats(0).uncached, 4u);
}

TEST(Cpu, AddressChecks) {
  Machine m(MachineConfig{});
  EXPECT_THROW(m.cpu().load(0, 3 * kGiB, AccessMode::kCacheable, {}), BusError);
  EXPECT_THROW(m.cpu().load(0, kFpga + 4 * kGiB, AccessMode::kCacheable, {}), BusError);
  EXPECT_THROW(m.cpu().load(0, kFpga + 4, AccessMode::kCacheable, {}), std::invalid_argument);
  EXPECT_THROW(m.cpu().load(0, kFpga + 3, AccessMode::kCacheable, {}, 3), std::invalid_argument);
  EXPECT_NO_THROW(m.cpu().load(0, kFpga + 4, AccessMode::kCacheable, {}, 4));
  m.drain();
}

TEST(Cpu, CreditsBoundOutstandingTraffic) {
  MachineConfig mc;
  mc.cpu.cache.l1 = {1 * kKiB, 2};
  mc.cpu.cache.l2 = {4 * kKiB, 4};
  // A slow write path makes writebacks pile up behind the write credits.
  mc.emulator.regions[0].wr_latency_ns = 4000;
  Machine m(mc);
  // Non-blocking stores to distinct lines: every fill past the first 64 evicts a dirty line.
  std::uint64_t i = 0;
  m.cpu().run(0, [&]() -> std::optional<Access> {
    if (i == 4000) return std::nullopt;
    Access a;
    a.kind = AccessKind::kStore;
    a.addr = kFpga + 64 * i++;
    a.value = i;
    a.wait = false;
    return a;
  });
  m.drain();
  const CoreStats& s = m.cpu().stats(0);
  EXPECT_EQ(s.max_reads_in_flight, 37u);
  EXPECT_LE(s.max_writes_in_flight, 17u);
  EXPECT_EQ(s.max_writes_in_flight, 17u);
  EXPECT_LE(s.max_eviction_queue, 17u + 37u);
  EXPECT_GT(s.stalls, 0u);
  EXPECT_GE(s.writebacks, 4000u - 64);
  EXPECT_TRUE(m.cpu().idle());
}

TEST(Cpu, WorkingSetInsideL1NeverMissesAfterWarmup) {
  Machine m(MachineConfig{});
  auto pass = [&] {
    std::uint64_t k = 0;
    bool done = false;
    m.cpu().run(0, [&]() -> std::optional<Access> {
      if (k == 16 * kKiB / 8) return std::nullopt;
      Access a;
      a.addr = kFpga + 8 * k++;
      return a;
    }, [&](SimTime) { done = true; });
    m.run_until(done, 1'000'000'000);
  };
  pass();
  const std::uint64_t misses = m.cpu().stats(0).l2_misses;
  EXPECT_EQ(misses, 16 * kKiB / 64);
  pass();
  EXPECT_EQ(m.cpu().stats(0).l2_misses, misses);
  EXPECT_EQ(m.cpu().stats(0).l2_hits, 0u);
}

// Random traces against a flat byte array. Tiny caches force heavy eviction
// and writeback-hazard traffic.
void run_oracle_trace(std::uint64_t seed, std::uint32_t cores) {
  MachineConfig mc;
  mc.cpu.cache.l1 = {256, 2};
  mc.cpu.cache.l2 = {1 * kKiB, 4};
  mc.cpu.cores = cores;
  mc.emulator.regions[0].wr_latency_ns = 800;
  mc.emulator.regions[0].rd_latency_ns = 300;
  Machine m(mc);

  constexpr std::uint64_t kSpan = 8 * kKiB;
  // Each core owns a private slice in both memories, so program order alone defines the result.
  struct Slice {
    std::uint64_t base;
    std::vector<std::uint8_t> bytes;
  };
  std::vector<std::vector<Slice>> slices(cores);
  for (std::uint32_t c = 0; c < cores; ++c) {
    slices[c].push_back({kFpga + c * kSpan, std::vector<std::uint8_t>(kSpan, 0)});
    slices[c].push_back({16 * kMiB + c * kSpan, std::vector<std::uint8_t>(kSpan, 0)});
  }
  std::mt19937_64 rng(seed);
  std::uint64_t mismatches = 0;
  std::vector<int> remaining(cores, 3000);
  std::vector<bool> done(cores, false);
  for (std::uint32_t c = 0; c < cores; ++c) {
    m.cpu().run(c, [&, c]() -> std::optional<Access> {
      if (remaining[c]-- == 0) return std::nullopt;
      Slice& s = slices[c][rng() % 2];
      Access a;
      a.size = static_cast<std::uint8_t>(1u << (rng() % 4));
      const std::uint64_t off = (rng() % (kSpan / a.size)) * a.size;
      a.addr = s.base + off;
      a.wait = rng() % 4 == 0;
      if (rng() % 2) {
        a.kind = AccessKind::kStore;
        a.value = rng();
        for (std::size_t i = 0; i < a.size; ++i) s.bytes[off + i] = static_cast<std::uint8_t>(a.value >> (8 * i));
      } else {
        std::uint64_t expect = 0;
        for (std::size_t i = 0; i < a.size; ++i) expect |= std::uint64_t{s.bytes[off + i]} << (8 * i);
        a.on_complete = [&mismatches, expect](std::uint64_t v, SimTime) { mismatches += v != expect; };
      }
      return a;
    }, [&, c](SimTime) { done[c] = true; });
  }
  m.drain(10'000'000'000ull);
  for (std::uint32_t c = 0; c < cores; ++c) EXPECT_TRUE(done[c]);
  EXPECT_EQ(mismatches, 0u) << "seed " << seed;

  bool flushed = false;
  m.cpu().flush([&](SimTime) { flushed = true; });
  m.run_until(flushed, 1'000'000'000);
  m.drain();
  for (std::uint32_t c = 0; c < cores; ++c) {
    for (const Slice& s : slices[c]) {
      auto [store, off] = m.locate(s.base);
      std::vector<std::uint8_t> image(kSpan);
      store->read(off, image);
      EXPECT_EQ(image, s.bytes) << "seed " << seed << " core " << c << " base " << s.base;
    }
  }
}

TEST(Cpu, SingleCoreTracesMatchFlatMemory) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) run_oracle_trace(seed, 1);
}

TEST(Cpu, MultiCoreTracesMatchFlatMemory) {
  for (std::uint64_t seed = 11; seed <= 13; ++seed) run_oracle_trace(seed, 4);
}

TEST(Cpu, FlushLeavesLinesCachedClean) {
  Machine m(MachineConfig{});
  timed_store(m, kFpga + 64, 77, AccessMode::kCacheable);
  EXPECT_EQ(m.emulator().store().read_u64(64), 0u);
  bool flushed = false;
  m.cpu().flush([&](SimTime) { flushed = true; });
  m.run_until(flushed, 1'000'000);
  EXPECT_EQ(m.emulator().store().read_u64(64), 77u);
  EXPECT_EQ(timed_load(m, kFpga + 64).latency, 2u);
  m.cpu().invalidate_all();
  EXPECT_GT(timed_load(m, kFpga + 64).latency, 300u);
}

}  // namespace
}  // namespace memsim
