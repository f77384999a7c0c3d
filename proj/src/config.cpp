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

#include "memsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>

#include <fmt/format.h>

#include "memsim/csr.hpp"

namespace memsim {

namespace {

struct U64Field {
  const char* key;
  std::uint64_t MachineSpec::*member;
};

// Order here is the schema order used by render_config() and flatten().
constexpr U64Field kMachineFields[] = {
    {"cores", &MachineSpec::cores},
    {"line_bytes", &MachineSpec::line_bytes},
    {"l1_kib", &MachineSpec::l1_kib},
    {"l1_ways", &MachineSpec::l1_ways},
    {"l2_kib", &MachineSpec::l2_kib},
    {"l2_ways", &MachineSpec::l2_ways},
    {"l1_hit_ns", &MachineSpec::l1_hit_ns},
    {"l2_hit_ns", &MachineSpec::l2_hit_ns},
    {"issue_ns", &MachineSpec::issue_ns},
    {"read_credits", &MachineSpec::read_credits},
    {"write_credits", &MachineSpec::write_credits},
    {"beat_bytes", &MachineSpec::beat_bytes},
    {"store_mib", &MachineSpec::store_mib},
    {"cpu_dram_mib", &MachineSpec::cpu_dram_mib},
    {"fpga_base", &MachineSpec::fpga_base},
    {"pulse_ns", &MachineSpec::pulse_ns},
    {"fabric_request_ns", &MachineSpec::fabric_request_ns},
    {"fabric_response_ns", &MachineSpec::fabric_response_ns},
    {"read_issue_interval_ns", &MachineSpec::read_issue_interval_ns},
    {"write_issue_interval_ns", &MachineSpec::write_issue_interval_ns},
    {"fpga_read_service_ns", &MachineSpec::fpga_read_service_ns},
    {"fpga_write_service_ns", &MachineSpec::fpga_write_service_ns},
    {"fpga_ceiling_mbps", &MachineSpec::fpga_ceiling_mbps},
    {"cpu_read_service_ns", &MachineSpec::cpu_read_service_ns},
    {"cpu_write_service_ns", &MachineSpec::cpu_write_service_ns},
    {"cpu_ceiling_mbps", &MachineSpec::cpu_ceiling_mbps},
};

struct RegionU64Field {
  const char* key;
  std::uint64_t RegionSpec::*member;
};

constexpr RegionU64Field kRegionFields[] = {
    {"boundary_mb", &RegionSpec::boundary_mb},
    {"rd_latency_100ns", &RegionSpec::rd_latency_100ns},
    {"wr_latency_100ns", &RegionSpec::wr_latency_100ns},
    {"rd_thpt_10mbps", &RegionSpec::rd_thpt_10mbps},
    {"wr_thpt_10mbps", &RegionSpec::wr_thpt_10mbps},
};

struct WorkloadU64Field {
  const char* key;
  std::uint64_t WorkloadSpec::*member;
};

constexpr WorkloadU64Field kWorkloadFields[] = {
    {"bank", &WorkloadSpec::bank},
    {"size_kib", &WorkloadSpec::size_kib},
    {"laps", &WorkloadSpec::laps},
    {"warmup_laps", &WorkloadSpec::warmup_laps},
    {"threads", &WorkloadSpec::threads},
    {"per_thread_kib", &WorkloadSpec::per_thread_kib},
    {"duration_us", &WorkloadSpec::duration_us},
    {"warmup_us", &WorkloadSpec::warmup_us},
    {"repetitions", &WorkloadSpec::repetitions},
};

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<BenchKind> kBenchNames[] = {
    {BenchKind::kLatency, "latency"}, {BenchKind::kThroughput, "throughput"}, {BenchKind::kError, "error"}};
constexpr EnumName<BenchTarget> kTargetNames[] = {{BenchTarget::kFpga, "fpga"}, {BenchTarget::kCpu, "cpu"}};
constexpr EnumName<AccessMode> kModeNames[] = {{AccessMode::kCacheable, "cacheable"},
                                               {AccessMode::kNonCacheable, "noncacheable"}};
constexpr EnumName<ErrorBenchMode> kErrorModeNames[] = {{ErrorBenchMode::kReadOnly, "read_only"},
                                                        {ErrorBenchMode::kWriteThenRead, "write_then_read"}};

template <typename E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

std::string double_text(double v) { return fmt::format("{}", v); }
std::string hex_text(std::uint64_t v) { return fmt::format("{:#x}", v); }

// ---- reading ----

class Reader {
 public:
  Reader(std::string_view text, std::string_view source) : source_(source) {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t nl = text.find('\n', start);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      lines_.emplace_back(text.substr(start, end - start));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }

  [[noreturn]] void fail_at(const YAML::Mark& mark, const std::string& msg) const {
    if (mark.is_null() || mark.line < 0) throw ConfigError(fmt::format("{}: {} (set by override)", source_, msg));
    const auto line = static_cast<std::size_t>(mark.line);
    std::string ctx = line < lines_.size() ? lines_[line] : std::string();
    if (!ctx.empty() && ctx.back() == '\r') ctx.pop_back();
    throw ConfigError(fmt::format("{}:{}:{}: {}\n  {} | {}", source_, line + 1, mark.column + 1, msg, line + 1, ctx));
  }
  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const { fail_at(at.Mark(), msg); }

  std::string scalar(const YAML::Node& n, std::string_view key) const {
    if (!n.IsScalar()) fail(n, fmt::format("'{}' must be a scalar", key));
    return n.Scalar();
  }

  std::uint64_t u64(const YAML::Node& n, std::string_view key) const {
    const std::string s = scalar(n, key);
    std::uint64_t v = 0;
    int base = 10;
    std::string_view digits = s;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
      base = 16;
      digits.remove_prefix(2);
    }
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
    if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size()) {
      fail(n, fmt::format("'{}' expects a non-negative integer, got '{}'", key, s));
    }
    return v;
  }

  double f64(const YAML::Node& n, std::string_view key) const {
    const std::string s = scalar(n, key);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      fail(n, fmt::format("'{}' expects a number, got '{}'", key, s));
    }
    return v;
  }

  bool boolean(const YAML::Node& n, std::string_view key) const {
    const std::string s = scalar(n, key);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(n, fmt::format("'{}' expects true or false, got '{}'", key, s));
  }

  template <typename E, std::size_t N>
  E enumeration(const YAML::Node& n, std::string_view key, const EnumName<E> (&table)[N]) const {
    const std::string s = scalar(n, key);
    std::string options;
    for (const auto& e : table) {
      if (s == e.name) return e.value;
      options += options.empty() ? e.name : fmt::format(", {}", e.name);
    }
    fail(n, fmt::format("'{}' must be one of {}, got '{}'", key, options, s));
  }

  void check_map(const YAML::Node& n, std::string_view what, const std::vector<std::string>& allowed) const {
    if (!n.IsMap()) fail(n, fmt::format("'{}' must be a mapping", what));
    for (auto it = n.begin(); it != n.end(); ++it) {
      const std::string k = it->first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(it->first, fmt::format("unknown key '{}' in {}", k, what));
      }
    }
  }

 private:
  std::string source_;
  std::vector<std::string> lines_;
};

std::vector<std::string> keys_of(const auto& table) {
  std::vector<std::string> out;
  for (const auto& f : table) out.emplace_back(f.key);
  return out;
}

MachineSpec read_machine(const Reader& r, const YAML::Node& n) {
  MachineSpec m;
  auto allowed = keys_of(kMachineFields);
  allowed.emplace_back("frequency_scale");
  r.check_map(n, "machine", allowed);
  for (const auto& f : kMachineFields) {
    if (n[f.key]) m.*f.member = r.u64(n[f.key], f.key);
  }
  if (n["frequency_scale"]) m.frequency_scale = r.f64(n["frequency_scale"], "frequency_scale");

  auto pow2 = [](std::uint64_t v) { return v != 0 && std::has_single_bit(v); };
  auto need = [&](bool ok, const char* key, const char* msg) {
    if (!ok) r.fail(n[key] ? n[key] : n, fmt::format("machine.{}: {}", key, msg));
  };
  need(m.cores >= 1 && m.cores <= 256, "cores", "must be in [1, 256]");
  need(m.beat_bytes >= 8 && m.beat_bytes <= kMaxBeatBytes && pow2(m.beat_bytes), "beat_bytes",
       "must be a power of two in [8, 64]");
  need(pow2(m.line_bytes) && m.line_bytes % m.beat_bytes == 0 && m.line_bytes / m.beat_bytes <= kMaxBurstLen,
       "line_bytes", "must be a power of two and a multiple of beat_bytes");
  need(pow2(m.l1_kib), "l1_kib", "must be a power of two");
  need(pow2(m.l2_kib) && m.l2_kib >= m.l1_kib, "l2_kib", "must be a power of two no smaller than l1_kib");
  need(m.l1_ways >= 1 && (m.l1_kib * kKiB) % (m.l1_ways * m.line_bytes) == 0, "l1_ways", "must divide the L1 into whole sets");
  need(m.l2_ways >= 1 && (m.l2_kib * kKiB) % (m.l2_ways * m.line_bytes) == 0, "l2_ways", "must divide the L2 into whole sets");
  need(m.read_credits >= 1 && m.read_credits <= 0xffff, "read_credits", "must be in [1, 65535]");
  need(m.write_credits >= 1 && m.write_credits <= 0xffff, "write_credits", "must be in [1, 65535]");
  need(m.frequency_scale > 0, "frequency_scale", "must be positive");
  need(m.store_mib >= 1 && m.store_mib <= 1024 * 1024, "store_mib", "must be in [1, 1048576]");
  need(m.cpu_dram_mib >= 1 && m.cpu_dram_mib <= 1024 * 1024, "cpu_dram_mib", "must be in [1, 1048576]");
  need(m.fpga_base >= m.cpu_dram_mib * kMiB, "fpga_base", "must lie above the CPU-side DRAM window");
  need(m.pulse_ns >= 1, "pulse_ns", "must be positive");
  return m;
}

RegionSpec read_region(const Reader& r, const YAML::Node& n, std::size_t i) {
  RegionSpec reg;
  auto allowed = keys_of(kRegionFields);
  for (const char* k : {"rd_error_threshold", "wr_error_threshold", "rd_error_percent", "wr_error_percent"}) {
    allowed.emplace_back(k);
  }
  r.check_map(n, fmt::format("regions[{}]", i), allowed);
  for (const auto& f : kRegionFields) {
    if (n[f.key]) reg.*f.member = r.u64(n[f.key], f.key);
  }
  constexpr std::uint64_t kUnitLimit = 1'000'000'000;  // 100 s of latency, 10 PB/s of bandwidth
  for (const auto& f : kRegionFields) {
    if (f.member != &RegionSpec::boundary_mb && reg.*f.member > kUnitLimit) {
      r.fail(n[f.key], fmt::format("'{}' is out of range", f.key));
    }
  }
  auto threshold = [&](const char* raw, const char* pct, std::uint32_t& out) {
    if (n[raw] && n[pct]) r.fail(n[pct], fmt::format("give either '{}' or '{}', not both", raw, pct));
    if (n[raw]) {
      const std::uint64_t v = r.u64(n[raw], raw);
      if (v > 0xffffffffull) r.fail(n[raw], fmt::format("'{}' must fit in 32 bits", raw));
      out = static_cast<std::uint32_t>(v);
    } else if (n[pct]) {
      try {
        out = percent_to_threshold(r.f64(n[pct], pct));
      } catch (const CsrError& e) {
        r.fail(n[pct], e.what());
      }
    }
  };
  threshold("rd_error_threshold", "rd_error_percent", reg.rd_error_threshold);
  threshold("wr_error_threshold", "wr_error_percent", reg.wr_error_threshold);
  return reg;
}

WorkloadSpec read_workload(const Reader& r, const YAML::Node& n) {
  WorkloadSpec w;
  auto allowed = keys_of(kWorkloadFields);
  for (const char* k : {"bench", "target", "mode", "write", "error_mode"}) allowed.emplace_back(k);
  r.check_map(n, "workload", allowed);
  for (const auto& f : kWorkloadFields) {
    if (n[f.key]) w.*f.member = r.u64(n[f.key], f.key);
  }
  if (n["bench"]) w.bench = r.enumeration(n["bench"], "bench", kBenchNames);
  if (n["target"]) w.target = r.enumeration(n["target"], "target", kTargetNames);
  if (n["mode"]) w.mode = r.enumeration(n["mode"], "mode", kModeNames);
  if (n["error_mode"]) w.error_mode = r.enumeration(n["error_mode"], "error_mode", kErrorModeNames);
  if (n["write"]) w.write = r.boolean(n["write"], "write");
  return w;
}

void validate_workload(const Reader& r, const YAML::Node& root, const RunConfig& c) {
  const WorkloadSpec& w = c.workload;
  const YAML::Node wn = root["workload"];
  auto need = [&](bool ok, const char* key, const std::string& msg) {
    if (ok) return;
    YAML::Node at = wn && wn[key] ? wn[key] : (wn ? wn : root);
    r.fail(at, fmt::format("workload.{}: {}", key, msg));
  };
  need(w.bank < c.regions.size(), "bank", fmt::format("refers to an undefined bank ({} defined)", c.regions.size()));
  need(w.repetitions >= 1, "repetitions", "must be at least 1");
  need(w.size_kib >= 1, "size_kib", "must be positive");
  need(w.laps >= 1, "laps", "must be at least 1");
  need(w.threads >= 1 && w.threads <= c.machine.cores, "threads", "must be in [1, machine.cores]");
  need(w.per_thread_kib >= 1, "per_thread_kib", "must be positive");
  if (w.bench == BenchKind::kThroughput) need(w.duration_us >= 10'000, "duration_us", "must be at least 10000 (10 ms)");
}

YAML::Node parse_yaml(const Reader& r, std::string_view text) {
  try {
    YAML::Node root = YAML::Load(std::string(text));
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    return root;
  } catch (const YAML::ParserException& e) {
    r.fail_at(e.mark, e.msg);
  }
}

bool is_index(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

void apply_override(YAML::Node& root, const Override& ov) {
  std::vector<std::string> path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = ov.key.find('.', start);
    path.push_back(ov.key.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const auto& seg : path) {
    if (seg.empty()) throw ConfigError(fmt::format("override '{}': empty path segment", ov.key));
  }
  YAML::Node cur = root;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string& seg = path[i];
    const bool last = i + 1 == path.size();
    if (is_index(seg)) {
      if (!cur.IsSequence()) throw ConfigError(fmt::format("override '{}': '{}' does not index a list", ov.key, seg));
      const std::size_t idx = std::stoul(seg);
      if (idx > 4096) throw ConfigError(fmt::format("override '{}': index {} out of range", ov.key, idx));
      while (cur.size() <= idx) cur.push_back(YAML::Node(YAML::NodeType::Map));
      if (last) {
        throw ConfigError(fmt::format("override '{}': cannot assign a whole list element", ov.key));
      }
      YAML::Node next = cur[idx];
      cur.reset(next);
      continue;
    }
    if (!cur.IsMap()) throw ConfigError(fmt::format("override '{}': '{}' is not a section", ov.key, seg));
    if (last) {
      cur[seg] = YAML::Node(ov.value);
      return;
    }
    if (!cur[seg] || cur[seg].IsNull()) {
      cur[seg] = YAML::Node(is_index(path[i + 1]) ? YAML::NodeType::Sequence : YAML::NodeType::Map);
    }
    YAML::Node next = cur[seg];
    cur.reset(next);
  }
}

// One visitor so rendering and flattening cannot drift apart.
void visit(const RunConfig& c, const std::function<void(const std::string& section, const char* key, std::string text)>& f) {
  f("", "seed", std::to_string(c.seed));
  for (const auto& fld : kMachineFields) {
    const std::uint64_t v = c.machine.*fld.member;
    f("machine", fld.key, fld.member == &MachineSpec::fpga_base ? hex_text(v) : std::to_string(v));
    if (fld.member == &MachineSpec::write_credits) f("machine", "frequency_scale", double_text(c.machine.frequency_scale));
  }
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    const std::string sec = fmt::format("regions.{}", i);
    const RegionSpec& r = c.regions[i];
    for (const auto& fld : kRegionFields) f(sec, fld.key, std::to_string(r.*fld.member));
    f(sec, "rd_error_threshold", std::to_string(r.rd_error_threshold));
    f(sec, "wr_error_threshold", std::to_string(r.wr_error_threshold));
  }
  const WorkloadSpec& w = c.workload;
  f("workload", "bench", name_of(kBenchNames, w.bench));
  f("workload", "target", name_of(kTargetNames, w.target));
  f("workload", "mode", name_of(kModeNames, w.mode));
  f("workload", "write", w.write ? "true" : "false");
  f("workload", "error_mode", name_of(kErrorModeNames, w.error_mode));
  for (const auto& fld : kWorkloadFields) f("workload", fld.key, std::to_string(w.*fld.member));
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnvVar);
  if (!env || !*env) return kDefaultSeed;
  std::uint64_t v = 0;
  const std::string_view s(env);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(fmt::format("{} must be a non-negative integer, got '{}'", kSeedEnvVar, s));
  }
  return v;
}

Override parse_override(std::string_view text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError(fmt::format("override '{}' is not key=value", text));
  return Override{std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

RunConfig parse_config(std::string_view text, const std::vector<Override>& overrides, std::string_view source) {
  const Reader r(text, source);
  YAML::Node root = parse_yaml(r, text);
  if (!root.IsMap()) r.fail(root, "top level must be a mapping");
  for (const auto& ov : overrides) apply_override(root, ov);

  r.check_map(root, "top level", {"seed", "output", "machine", "regions", "workload"});
  RunConfig c;
  c.seed = root["seed"] ? r.u64(root["seed"], "seed") : default_seed();
  if (root["output"]) c.output = r.scalar(root["output"], "output");
  if (root["machine"]) c.machine = read_machine(r, root["machine"]);
  if (const YAML::Node regions = root["regions"]) {
    if (!regions.IsSequence()) r.fail(regions, "'regions' must be a list");
    if (regions.size() == 0) r.fail(regions, "at least one region is required");
    c.regions.clear();
    for (std::size_t i = 0; i < regions.size(); ++i) {
      c.regions.push_back(read_region(r, regions[i], i));
      const std::uint64_t b = c.regions.back().boundary_mb;
      if (i > 0 && b <= c.regions[i - 1].boundary_mb) {
        r.fail(regions[i], fmt::format("regions[{}] overlaps regions[{}]: boundaries must strictly increase", i, i - 1));
      }
      if (b >= c.machine.store_mib) r.fail(regions[i], fmt::format("regions[{}] starts beyond the emulator store", i));
    }
  } else if (c.regions.front().boundary_mb >= c.machine.store_mib) {
    r.fail(root, "default region starts beyond the emulator store");
  }
  if (root["workload"]) c.workload = read_workload(r, root["workload"]);
  validate_workload(r, root, c);
  return c;
}

std::string render_config(const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  std::string section = "";
  bool in_regions = false;
  auto close = [&] {
    if (section.empty()) return;
    out << YAML::EndMap;
    section.clear();
  };
  visit(c, [&](const std::string& sec, const char* key, std::string text) {
    if (sec != section) {
      close();
      const bool region = sec.rfind("regions.", 0) == 0;
      if (!region && in_regions) {
        out << YAML::EndSeq;
        in_regions = false;
      }
      if (region && !in_regions) {
        out << YAML::Key << "regions" << YAML::Value << YAML::BeginSeq;
        in_regions = true;
      }
      if (!region) out << YAML::Key << sec << YAML::Value;
      out << YAML::BeginMap;
      section = sec;
    }
    if (sec.empty() && key == std::string_view("seed")) {
      out << YAML::Key << key << YAML::Value << text;
      if (c.output) out << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << *c.output;
      return;
    }
    out << YAML::Key << key << YAML::Value << text;
  });
  close();
  if (in_regions) out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<std::pair<std::string, std::string>> flatten(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  visit(c, [&](const std::string& sec, const char* key, std::string text) {
    out.emplace_back(sec.empty() ? std::string(key) : sec + "." + key, std::move(text));
  });
  return out;
}

MachineConfig to_machine_config(const RunConfig& c, std::uint64_t run_seed) {
  const MachineSpec& m = c.machine;
  MachineConfig mc;
  EmulatorConfig& e = mc.emulator;
  e.store_bytes = m.store_mib * kMiB;
  e.beat_bytes = static_cast<std::uint16_t>(m.beat_bytes);
  e.fabric = FabricTiming{m.fabric_request_ns, m.fabric_response_ns, m.read_issue_interval_ns, m.write_issue_interval_ns};
  e.memory = MemTiming{m.fpga_read_service_ns, m.fpga_write_service_ns, m.fpga_ceiling_mbps * 1'000'000};
  e.regions.clear();
  for (const auto& r : c.regions) {
    e.regions.push_back(RegionConfig{r.boundary_mb * kMiB, r.rd_latency_100ns * kLatencyUnitNs,
                                     r.wr_latency_100ns * kLatencyUnitNs, r.rd_thpt_10mbps * kBandwidthUnit,
                                     r.wr_thpt_10mbps * kBandwidthUnit, r.rd_error_threshold, r.wr_error_threshold});
  }
  e.seed = run_seed;
  e.pulse_ns = m.pulse_ns;

  CpuConfig& p = mc.cpu;
  p.cores = static_cast<std::uint32_t>(m.cores);
  p.cache.line_bytes = static_cast<std::uint32_t>(m.line_bytes);
  p.cache.l1 = CacheGeometry{m.l1_kib * kKiB, static_cast<std::uint32_t>(m.l1_ways)};
  p.cache.l2 = CacheGeometry{m.l2_kib * kKiB, static_cast<std::uint32_t>(m.l2_ways)};
  p.cache.l1_hit_ns = m.l1_hit_ns;
  p.cache.l2_hit_ns = m.l2_hit_ns;
  p.read_credits = static_cast<std::uint32_t>(m.read_credits);
  p.write_credits = static_cast<std::uint32_t>(m.write_credits);
  p.frequency_scale = m.frequency_scale;
  p.issue_ns = m.issue_ns;
  p.cpu_dram_base = 0;
  p.cpu_dram_bytes = m.cpu_dram_mib * kMiB;
  p.cpu_dram_timing = MemTiming{m.cpu_read_service_ns, m.cpu_write_service_ns, m.cpu_ceiling_mbps * 1'000'000};
  p.fpga_base = m.fpga_base;
  p.beat_bytes = static_cast<std::uint16_t>(m.beat_bytes);
  return mc;
}

}  // namespace memsim
