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

#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "memsim/config.hpp"
#include "memsim/report.hpp"

namespace memsim {
namespace {

std::string error_of(std::string_view text, const std::vector<Override>& ov = {}) {
  try {
    parse_config(text, ov, "t.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, std::string_view needle) { return s.find(needle) != std::string::npos; }

TEST(Config, EmptyTextGivesDefaults) {
  unsetenv(kSeedEnvVar);
  const RunConfig c = parse_config("");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_EQ(c.seed, kDefaultSeed);
  EXPECT_EQ(c.regions.size(), 1u);
  EXPECT_EQ(c.machine.read_credits, 37u);
  EXPECT_FALSE(c.output);
}

TEST(Config, SeedFromEnvironment) {
  setenv(kSeedEnvVar, "42", 1);
  EXPECT_EQ(default_seed(), 42u);
  EXPECT_EQ(parse_config("").seed, 42u);
  EXPECT_EQ(parse_config("seed: 7").seed, 7u);
  setenv(kSeedEnvVar, "x1", 1);
  EXPECT_THROW(default_seed(), ConfigError);
  unsetenv(kSeedEnvVar);
  EXPECT_EQ(default_seed(), kDefaultSeed);
}

TEST(Config, OverlappingRegionsReportTheLine) {
  const std::string e = error_of("regions:\n  - boundary_mb: 0\n  - boundary_mb: 0\n");
  EXPECT_TRUE(contains(e, "t.yaml:3:")) << e;
  EXPECT_TRUE(contains(e, "regions[1] overlaps regions[0]")) << e;
  EXPECT_TRUE(contains(e, "3 |   - boundary_mb: 0")) << e;
  EXPECT_TRUE(contains(error_of("regions:\n  - boundary_mb: 512\n  - boundary_mb: 100\n"), "overlaps"));
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_TRUE(contains(error_of("workload:\n  bnch: x\n"), "unknown key 'bnch'"));
  EXPECT_TRUE(contains(error_of("colour: red\n"), "unknown key"));
  EXPECT_TRUE(contains(error_of("", {{"machine.bogus", "1"}}), "unknown key"));
}

TEST(Config, ValueErrors) {
  EXPECT_FALSE(error_of("workload:\n  bank: 1\n").empty());
  EXPECT_FALSE(error_of("machine:\n  cores: -1\n").empty());
  EXPECT_FALSE(error_of("workload:\n  bench: fast\n").empty());
  EXPECT_FALSE(error_of("workload:\n  threads: 5\n").empty());
  EXPECT_FALSE(error_of("workload:\n  bench: throughput\n  duration_us: 9999\n").empty());
  EXPECT_TRUE(error_of("workload:\n  bench: throughput\n  duration_us: 10000\n").empty());
  EXPECT_FALSE(error_of("regions:\n  - boundary_mb: 4096\n").empty());
  EXPECT_FALSE(error_of("regions:\n  - rd_error_threshold: 5\n    rd_error_percent: 1\n").empty());
  EXPECT_FALSE(error_of("regions:\n  - rd_error_percent: 120\n").empty());
  EXPECT_FALSE(error_of("seed: [1\n").empty());
}

TEST(Config, PercentKeysBecomeThresholds) {
  const RunConfig c = parse_config("regions:\n  - rd_error_percent: 10\n    wr_error_percent: 100\n");
  EXPECT_EQ(c.regions[0].rd_error_threshold, 429496730u);
  EXPECT_EQ(c.regions[0].wr_error_threshold, 0xffffffffu);
}

TEST(Config, OverridesApplyInOrderLastWins) {
  const RunConfig c = parse_config("regions:\n  - rd_latency_100ns: 3\n",
                                   {{"regions.0.rd_latency_100ns", "5"}, {"regions.0.rd_latency_100ns", "7"}});
  EXPECT_EQ(c.regions[0].rd_latency_100ns, 7u);
  const RunConfig d = parse_config("", {{"regions.1.boundary_mb", "1024"}, {"workload.bank", "1"}});
  ASSERT_EQ(d.regions.size(), 2u);
  EXPECT_EQ(d.regions[1].boundary_mb, 1024u);
  EXPECT_TRUE(contains(error_of("", {{"regions.1.boundary_mb", "0"}}), "(set by override)"));
  EXPECT_THROW(parse_override("novalue"), ConfigError);
  const Override o = parse_override("a.b=c=d");
  EXPECT_EQ(o.key, "a.b");
  EXPECT_EQ(o.value, "c=d");
}

TEST(Config, RenderRoundTripsDefaults) {
  const RunConfig c;
  EXPECT_EQ(parse_config(render_config(c)), c);
}

TEST(Config, RenderRoundTripsRandomConfigs) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    RunConfig c;
    c.seed = rng();
    if (rng() % 2) c.output = "out dir/r" + std::to_string(i) + ".csv";
    c.machine.l2_kib = 256u << (rng() % 3);
    c.machine.frequency_scale = 0.5 + static_cast<double>(rng() % 100) / 37.0;
    c.machine.fpga_base = (1 + rng() % 15) * 0x1'0000'0000ull;
    const std::size_t n = 1 + rng() % 4;
    c.regions.assign(n, RegionSpec{});
    for (std::size_t k = 0; k < n; ++k) {
      c.regions[k].boundary_mb = 1024 * k;
      c.regions[k].rd_latency_100ns = rng() % 100;
      c.regions[k].wr_thpt_10mbps = rng() % 50;
      c.regions[k].rd_error_threshold = static_cast<std::uint32_t>(rng());
    }
    c.workload.bench = static_cast<BenchKind>(rng() % 3);
    c.workload.target = static_cast<BenchTarget>(rng() % 2);
    c.workload.mode = static_cast<AccessMode>(rng() % 2);
    c.workload.write = rng() % 2;
    c.workload.error_mode = static_cast<ErrorBenchMode>(rng() % 2);
    c.workload.bank = rng() % n;
    c.workload.repetitions = 1 + rng() % 3;
    EXPECT_EQ(parse_config(render_config(c)), c) << render_config(c);
  }
}

TEST(Config, FlattenOrder) {
  const auto flat = flatten(RunConfig{});
  ASSERT_EQ(flat.size(), 1u + 27 + 7 + 14);
  EXPECT_EQ(flat.front().first, "seed");
  EXPECT_EQ(flat[1].first, "machine.cores");
  EXPECT_EQ(flat[16], (std::pair<std::string, std::string>{"machine.fpga_base", "0x1000000000"}));
  EXPECT_EQ(flat[28].first, "regions.0.boundary_mb");
  EXPECT_EQ(flat.back().first, "workload.repetitions");
}

TEST(Config, ToMachineConfigScalesUnits) {
  const RunConfig c = parse_config(
      "machine:\n  l2_kib: 512\n  fpga_ceiling_mbps: 1000\nregions:\n  - rd_latency_100ns: 20\n    rd_thpt_10mbps: 30\n"
      "  - boundary_mb: 1024\n");
  const MachineConfig m = to_machine_config(c, 9);
  EXPECT_EQ(m.cpu.cache.l2.size_bytes, 512 * kKiB);
  EXPECT_EQ(m.emulator.memory.ceiling_bytes_per_sec, 1'000'000'000u);
  EXPECT_EQ(m.emulator.regions[0].rd_latency_ns, 2000u);
  EXPECT_EQ(m.emulator.regions[0].rd_bw, 300'000'000u);
  EXPECT_EQ(m.emulator.regions[1].boundary, 1 * kGiB);
  EXPECT_EQ(m.emulator.seed, 9u);
}

TEST(Report, HeaderLayout) {
  RunConfig c;
  c.regions.push_back(RegionSpec{512});
  const CsvRow h = report_header(c);
  std::vector<std::string> expect;
  for (const auto& [k, v] : flatten(c)) expect.push_back(k);
  for (const char* k : {"repetition", "run_seed", "latency_ns", "rd_mbps", "wr_mbps", "error_rate", "flipped_bits",
                        "l2_misses", "sim_time_ns"}) {
    expect.emplace_back(k);
  }
  for (int b = 0; b < 2; ++b) {
    for (const char* k : {"rd_bytes", "wr_bytes", "rd_bit_errors", "wr_bit_errors"}) {
      expect.push_back("bank" + std::to_string(b) + "." + k);
    }
  }
  EXPECT_EQ(h, expect);
}

TEST(Report, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_field(""), "");
  std::ostringstream os;
  write_csv_row(os, {"a", "b,c", ""});
  EXPECT_EQ(os.str(), "a,\"b,c\",\r\n");
}

TEST(Report, AxisParsing) {
  const SweepAxis a = parse_axis("regions.0.rd_latency_100ns=0:40:4");
  EXPECT_EQ(a.key, "regions.0.rd_latency_100ns");
  ASSERT_EQ(a.values.size(), 11u);
  EXPECT_EQ(a.values.front(), "0");
  EXPECT_EQ(a.values.back(), "40");
  EXPECT_EQ(parse_axis("k=5:5:1").values, (std::vector<std::string>{"5"}));
  EXPECT_EQ(parse_axis("machine.frequency_scale=1:2:0.5").values, (std::vector<std::string>{"1", "1.5", "2"}));
  EXPECT_THROW(parse_axis("k=5:1:1"), ConfigError);
  EXPECT_THROW(parse_axis("k=0:4:0"), ConfigError);
  EXPECT_THROW(parse_axis("k=0:4"), ConfigError);
  EXPECT_THROW(parse_axis("k=a:4:1"), ConfigError);
  EXPECT_THROW(parse_axis("=0:4:1"), ConfigError);
}

TEST(Report, AxesExpandFirstOutermost) {
  const auto pts = expand_axes({parse_axis("a=1:3:1"), parse_axis("b=10:40:10")});
  ASSERT_EQ(pts.size(), 12u);
  EXPECT_EQ(pts[0][0].value, "1");
  EXPECT_EQ(pts[0][1].value, "10");
  EXPECT_EQ(pts[1][1].value, "20");
  EXPECT_EQ(pts[4][0].value, "2");
  EXPECT_EQ(pts[11][0].value, "3");
  EXPECT_EQ(pts[11][1].value, "40");
}

TEST(Report, RunPointIsDeterministic) {
  const RunConfig c = parse_config("workload:\n  size_kib: 256\n  laps: 1\n");
  EXPECT_EQ(run_point(c, 0), run_point(c, 0));
  EXPECT_EQ(run_point(c, 0).size(), report_header(c).size());
}

}  // namespace
}  // namespace memsim
