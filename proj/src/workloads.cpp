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

#include "memsim/workloads.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <stdexcept>

namespace memsim {

namespace {

constexpr std::uint64_t kSliceNs = 10'000'000;

// Unbiased draw from [0, bound) (Lemire's multiply-and-reject).
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t x = rng();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t t = (0 - bound) % bound;
    while (low < t) {
      x = rng();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace

Machine::Machine(MachineConfig cfg)
    : cfg_(std::move(cfg)),
      cpu_store_(cfg_.cpu.cpu_dram_bytes),
      cpu_dram_(sched_, cpu_store_, cfg_.cpu.cpu_dram_timing) {
  const std::uint64_t dram_end = cfg_.cpu.cpu_dram_base + cfg_.cpu.cpu_dram_bytes;
  const std::uint64_t fpga_end = cfg_.cpu.fpga_base + cfg_.emulator.store_bytes;
  if (cfg_.cpu.cpu_dram_base < fpga_end && cfg_.cpu.fpga_base < dram_end) {
    throw std::invalid_argument("CPU-side DRAM window overlaps the emulator window");
  }
  cfg_.emulator.beat_bytes = cfg_.cpu.beat_bytes;
  emu_ = std::make_unique<Emulator>(sched_, cfg_.emulator);
  cpu_ = std::make_unique<Cpu>(sched_, cfg_.cpu, emu_->fabric(), &cpu_dram_);
}

std::pair<BackingStore*, std::uint64_t> Machine::locate(std::uint64_t cpu_addr) {
  if (cpu_->is_fpga(cpu_addr)) return {&emu_->store(), cpu_addr - cfg_.cpu.fpga_base};
  if (cpu_addr >= cfg_.cpu.cpu_dram_base && cpu_addr - cfg_.cpu.cpu_dram_base < cfg_.cpu.cpu_dram_bytes) {
    return {&cpu_store_, cpu_addr - cfg_.cpu.cpu_dram_base};
  }
  throw BusError("unmapped CPU address", cpu_addr);
}

std::uint64_t Machine::region_base(std::size_t bank) {
  return cfg_.cpu.fpga_base + emu_->fabric().region_extent(bank).first;
}

void Machine::run_until(const bool& done, std::uint64_t budget_ns) {
  const std::uint64_t end = sched_.now().ns + budget_ns;
  while (!done) {
    if (sched_.pending() == 0) throw std::runtime_error("simulation stalled with work outstanding");
    if (sched_.now().ns >= end) throw std::runtime_error("simulated time budget exhausted");
    sched_.run_until_stopped(SimTime{std::min(end, sched_.now().ns + kSliceNs)});
  }
}

void Machine::drain(std::uint64_t budget_ns) {
  const std::uint64_t end = sched_.now().ns + budget_ns;
  while (!(cpu_->idle() && emu_->fabric().outstanding() == 0)) {
    if (sched_.pending() == 0) throw std::runtime_error("simulation stalled with work outstanding");
    if (sched_.now().ns >= end) throw std::runtime_error("simulated time budget exhausted while draining");
    sched_.run_until(SimTime{sched_.now().ns + 1000});
  }
}

PointerChain build_pointer_chain(std::uint64_t size, std::uint64_t seed) {
  if (size % kChunkBytes != 0 || size < 2 * kChunkBytes) {
    throw std::invalid_argument("pointer chain size must be a multiple of 64 and at least 128");
  }
  const std::uint64_t n = size / kChunkBytes;
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("pointer chain too large");
  PointerChain chain;
  chain.size = size;
  chain.seed = seed;
  chain.next.resize(n);
  std::iota(chain.next.begin(), chain.next.end(), 0u);
  // Sattolo's shuffle yields a single n-cycle.
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = n - 1; i > 0; --i) std::swap(chain.next[i], chain.next[bounded(rng, i)]);
  return chain;
}

void PointerChain::install(Machine& m, std::uint64_t base) const {
  auto [store, off] = m.locate(base);
  auto [store_end, off_end] = m.locate(base + size - 1);
  if (store != store_end || off_end - off != size - 1) throw std::invalid_argument("pointer chain does not fit one memory");
  for (std::size_t k = 0; k < next.size(); ++k) store->write_u64(off + k * kChunkBytes, base + next[k] * kChunkBytes);
}

LatencyResult run_latency_bench(Machine& m, const LatencyBenchConfig& cfg) {
  if (cfg.laps == 0) throw std::invalid_argument("latency bench needs at least one measured lap");
  const std::uint64_t base = cfg.base.value_or(m.region_base(cfg.bank));
  const PointerChain chain = build_pointer_chain(cfg.size, cfg.seed);
  chain.install(m, base);

  struct State {
    std::uint64_t cur{0};
    std::uint64_t last{0};
    std::uint32_t lap{0};
    std::size_t idx{0};
    bool store_pending{false};
    std::vector<SimTime> lap_start;
    std::vector<std::uint64_t> lap_misses;
    bool done{false};
  };
  auto st = std::make_shared<State>();
  st->cur = base;
  const std::uint32_t total = cfg.warmup_laps + cfg.laps;
  const std::size_t chunks = chain.chunks();
  Cpu& cpu = m.cpu();
  Scheduler& sched = m.sched();
  const std::uint32_t core = cfg.core;

  auto program = [st, &cpu, &sched, total, chunks, core, cfg]() -> std::optional<Access> {
    if (st->store_pending) {
      st->store_pending = false;
      return Access{AccessKind::kStore, st->last + 8, st->lap, 8, cfg.mode, false, {}};
    }
    if (st->idx == chunks) {
      st->idx = 0;
      ++st->lap;
    }
    if (st->idx == 0) {
      st->lap_start.push_back(sched.now());
      st->lap_misses.push_back(cpu.stats(core).l2_misses);
      if (st->lap == total) return std::nullopt;
    }
    st->last = st->cur;
    ++st->idx;
    st->store_pending = cfg.write_each_chunk;
    return Access{AccessKind::kLoad, st->cur, 0, 8, cfg.mode, true, [st](std::uint64_t v, SimTime) { st->cur = v; }};
  };
  cpu.run(core, program, [st, &sched](SimTime) {
    st->done = true;
    sched.request_stop();
  });
  m.run_until(st->done, std::uint64_t{total} * chunks * 1'000'000);

  LatencyResult r;
  r.accesses = std::uint64_t{cfg.laps} * chunks;
  const SimTime t0 = st->lap_start[cfg.warmup_laps];
  r.avg_ns = static_cast<double>(st->lap_start[total] - t0) / static_cast<double>(r.accesses);
  for (std::uint32_t k = cfg.warmup_laps; k < total; ++k) {
    r.lap_ns.push_back(static_cast<double>(st->lap_start[k + 1] - st->lap_start[k]) / static_cast<double>(chunks));
  }
  r.l2_misses = st->lap_misses[total] - st->lap_misses[cfg.warmup_laps];
  return r;
}

ThroughputResult run_throughput_bench(Machine& m, const ThroughputBenchConfig& cfg) {
  if (cfg.duration_ns < 10'000'000) throw std::invalid_argument("throughput window must be at least 10 ms");
  if (cfg.threads == 0 || cfg.threads > m.cpu().config().cores) throw std::invalid_argument("thread count exceeds cores");
  const std::uint64_t base = cfg.base.value_or(m.region_base(cfg.bank));
  const std::uint64_t stride =
      cfg.mode == AccessMode::kCacheable ? m.cpu().config().cache.line_bytes : m.cpu().config().beat_bytes;
  if (cfg.per_thread_bytes < stride || cfg.per_thread_bytes % stride != 0) {
    throw std::invalid_argument("per-thread buffer must be a positive multiple of the access stride");
  }
  m.locate(base + std::uint64_t{cfg.threads} * cfg.per_thread_bytes - 1);

  struct State {
    bool stop{false};
    std::uint32_t first_passes{0};
    std::uint32_t finished{0};
    bool window_open{false};
    unsigned long rd0{0};
    unsigned long wr0{0};
  };
  auto st = std::make_shared<State>();
  bool all_done = false;
  Scheduler& sched = m.sched();
  MeApi& api = m.emulator().api();
  const unsigned bank = cfg.bank;
  ThroughputResult r;
  r.duration_ns = cfg.duration_ns;

  // The window opens once the warm-up time has passed and every thread has
  // streamed its buffer once, so the caches hold the steady-state mix.
  const SimTime warm_until = sched.now() + cfg.warmup_ns;
  auto open_window = [&, st] {
    st->window_open = true;
    api.GetXferredRdDataAmt(bank, &st->rd0);
    api.GetXferredWrDataAmt(bank, &st->wr0);
    sched.schedule(sched.now() + cfg.duration_ns, [&, st] {
      unsigned long rd1 = 0, wr1 = 0;
      api.GetXferredRdDataAmt(bank, &rd1);
      api.GetXferredWrDataAmt(bank, &wr1);
      r.rd_bytes = rd1 - st->rd0;
      r.wr_bytes = wr1 - st->wr0;
      st->stop = true;
    }, 61);
  };
  auto on_first_pass = [&, st, open_window] {
    if (++st->first_passes != cfg.threads) return;
    if (sched.now() >= warm_until) {
      open_window();
    } else {
      sched.schedule(warm_until, open_window, 60);
    }
  };

  for (std::uint32_t t = 0; t < cfg.threads; ++t) {
    auto off = std::make_shared<std::uint64_t>(0);
    auto wrapped = std::make_shared<bool>(false);
    const std::uint64_t buf = base + t * cfg.per_thread_bytes;
    auto program = [st, off, wrapped, buf, stride, on_first_pass, cfg]() -> std::optional<Access> {
      if (st->stop) return std::nullopt;
      const std::uint64_t addr = buf + *off;
      *off = (*off + stride) % cfg.per_thread_bytes;
      if (*off == 0 && !*wrapped) {
        *wrapped = true;
        on_first_pass();
      }
      return Access{cfg.write ? AccessKind::kStore : AccessKind::kLoad, addr, addr, 8, cfg.mode, false, {}};
    };
    m.cpu().run(t, program, [st, &all_done, &sched, n = cfg.threads](SimTime) {
      if (++st->finished == n) {
        all_done = true;
        sched.request_stop();
      }
    });
  }
  m.run_until(all_done, cfg.warmup_ns + cfg.duration_ns + 10'000'000'000ull);
  m.drain();

  const double secs = static_cast<double>(cfg.duration_ns) * 1e-9;
  r.rd_mbps = static_cast<double>(r.rd_bytes) / secs / 1e6;
  r.wr_mbps = static_cast<double>(r.wr_bytes) / secs / 1e6;
  const Counters c = m.emulator().csr().get_counters(bank);
  r.counter_rd_total = c.rd_bytes;
  r.counter_wr_total = c.wr_bytes;
  r.fabric_rd_total = m.emulator().fabric().stats(bank).read_bytes;
  r.fabric_wr_total = m.emulator().fabric().stats(bank).write_bytes;
  return r;
}

ErrorResult run_error_bench(Machine& m, const ErrorBenchConfig& cfg) {
  if (cfg.size == 0 || cfg.size % kChunkBytes != 0) throw std::invalid_argument("error bench size must be a multiple of 64");
  const std::uint64_t base = cfg.base.value_or(m.region_base(cfg.bank));
  m.locate(base + cfg.size - 1);
  Cpu& cpu = m.cpu();
  Scheduler& sched = m.sched();
  const Counters before = m.emulator().csr().get_counters(cfg.bank);

  auto sweep = [&](AccessKind kind, std::function<void(std::uint64_t)> observe) {
    auto off = std::make_shared<std::uint64_t>(0);
    bool done = false;
    auto program = [off, base, kind, observe, &cfg]() -> std::optional<Access> {
      if (*off == cfg.size) return std::nullopt;
      const std::uint64_t addr = base + *off;
      *off += 8;
      Access a{kind, addr, 0, 8, cfg.access, false, {}};
      if (observe) a.on_complete = [observe](std::uint64_t v, SimTime) { observe(v); };
      return a;
    };
    cpu.run(0, program, [&](SimTime) {
      done = true;
      sched.request_stop();
    });
    m.run_until(done, cfg.size * 100'000);
  };
  auto flush_and_drop = [&] {
    bool done = false;
    cpu.flush([&](SimTime) {
      done = true;
      sched.request_stop();
    });
    m.run_until(done, 1'000'000'000);
    m.drain();
    cpu.invalidate_all();
  };

  flush_and_drop();
  if (cfg.mode == ErrorBenchMode::kWriteThenRead) {
    sweep(AccessKind::kStore, nullptr);
    flush_and_drop();
  }
  ErrorResult r;
  sweep(AccessKind::kLoad, [&r](std::uint64_t v) { r.flipped_bits += static_cast<std::uint64_t>(std::popcount(v)); });
  m.drain();

  r.total_bits = cfg.size * 8;
  r.observed_rate = static_cast<double>(r.flipped_bits) / static_cast<double>(r.total_bits);
  const Counters after = m.emulator().csr().get_counters(cfg.bank);
  r.rd_bit_errors = after.rd_bit_errors - before.rd_bit_errors;
  r.wr_bit_errors = after.wr_bit_errors - before.wr_bit_errors;
  return r;
}

}  // namespace memsim
