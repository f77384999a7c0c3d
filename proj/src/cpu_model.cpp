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

#include "memsim/cpu_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memsim {

// ---- SetAssocCache ----

SetAssocCache::SetAssocCache(std::uint64_t size_bytes, std::uint32_t ways, std::uint32_t line_bytes) {
  if (line_bytes == 0 || !std::has_single_bit(line_bytes)) throw std::invalid_argument("line size must be a power of two");
  if (ways == 0) throw std::invalid_argument("cache needs at least one way");
  if (size_bytes == 0 || !std::has_single_bit(size_bytes)) throw std::invalid_argument("cache size must be a power of two");
  if (size_bytes % (std::uint64_t{ways} * line_bytes) != 0) throw std::invalid_argument("cache size not divisible by ways * line");
  sets_ = size_bytes / (std::uint64_t{ways} * line_bytes);
  assoc_ = ways;
  ways_.resize(sets_ * assoc_);
}

std::optional<std::size_t> SetAssocCache::lookup(std::uint64_t line, bool touch) {
  const std::size_t base = (line % sets_) * assoc_;
  for (std::size_t w = 0; w < assoc_; ++w) {
    Way& way = ways_[base + w];
    if (way.valid && way.line == line) {
      if (touch) way.stamp = ++clock_;
      return base + w;
    }
  }
  return std::nullopt;
}

SetAssocCache::Victim SetAssocCache::insert(std::uint64_t line) {
  const std::size_t base = (line % sets_) * assoc_;
  std::size_t pick = base;
  for (std::size_t w = 0; w < assoc_; ++w) {
    const Way& way = ways_[base + w];
    if (!way.valid) {
      pick = base + w;
      break;
    }
    if (way.stamp < ways_[pick].stamp) pick = base + w;
  }
  Way& way = ways_[pick];
  Victim v{way.valid, way.line, way.valid && way.dirty, pick};
  way = Way{line, ++clock_, true, false};
  return v;
}

std::optional<std::size_t> SetAssocCache::invalidate(std::uint64_t line) {
  auto slot = lookup(line, false);
  if (slot) ways_[*slot] = Way{};
  return slot;
}

// ---- Cpu ----

namespace {

void check_geometry(const CpuConfig& cfg) {
  if (cfg.cores == 0 || cfg.cores > 0xffff) throw std::invalid_argument("core count out of range");
  const auto beat = cfg.beat_bytes;
  if (beat < 8 || beat > kMaxBeatBytes || !std::has_single_bit(beat)) {
    throw std::invalid_argument("beat width must be a power of two in [8, 64]");
  }
  if (cfg.cache.line_bytes % beat != 0) throw std::invalid_argument("line size must be a multiple of the beat width");
  if (cfg.cache.line_bytes / beat > kMaxBurstLen) throw std::invalid_argument("line needs more beats than a burst allows");
  if (cfg.read_credits == 0 || cfg.write_credits == 0) throw std::invalid_argument("credits must be positive");
  if (!(cfg.frequency_scale > 0) || !std::isfinite(cfg.frequency_scale)) {
    throw std::invalid_argument("frequency scale must be positive");
  }
}

}  // namespace

Cpu::Cpu(Scheduler& sched, CpuConfig cfg, AxiFabric& fpga, MemoryController* cpu_dram)
    : sched_(sched),
      cfg_((check_geometry(cfg), cfg)),
      fpga_(fpga),
      cpu_dram_(cpu_dram),
      cores_(cfg_.cores),
      l2_(cfg_.cache.l2.size_bytes, cfg_.cache.l2.ways, cfg_.cache.line_bytes) {
  for (std::uint32_t c = 0; c < cfg_.cores; ++c) {
    l1_.emplace_back(cfg_.cache.l1.size_bytes, cfg_.cache.l1.ways, cfg_.cache.line_bytes);
  }
  if (cfg_.cache.l1.size_bytes > cfg_.cache.l2.size_bytes) throw std::invalid_argument("L1 larger than the inclusive L2");
  l2_data_.assign(l2_.slots() * cfg_.cache.line_bytes, 0);
}

void Cpu::set_frequency_scale(double factor) {
  if (!(factor > 0) || !std::isfinite(factor)) throw std::invalid_argument("frequency scale must be positive");
  cfg_.frequency_scale = factor;
}

std::uint64_t Cpu::scaled(std::uint64_t ns) const {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(ns) * cfg_.frequency_scale));
}

void Cpu::reset_stats() {
  for (auto& c : cores_) c.stats = CoreStats{};
}

bool Cpu::idle() const {
  for (const auto& c : cores_) {
    if (c.running || !c.queue.empty() || c.stalled || c.outstanding || c.reads_in_flight || c.writes_in_flight ||
        !c.evictions.empty()) {
      return false;
    }
  }
  return mshrs_.empty();
}

void Cpu::validate_access(const Access& a) const {
  if (a.size != 1 && a.size != 2 && a.size != 4 && a.size != 8) throw std::invalid_argument("access size must be 1, 2, 4 or 8");
  if (a.addr % a.size != 0) throw std::invalid_argument("misaligned access");
  if (is_fpga(a.addr)) return;
  if (cpu_dram_ && a.addr >= cfg_.cpu_dram_base && a.addr - cfg_.cpu_dram_base < cfg_.cpu_dram_bytes) return;
  throw BusError("unmapped CPU address", a.addr);
}

void Cpu::run(std::uint32_t core, Program program, std::function<void(SimTime)> on_done) {
  Core& c = cores_.at(core);
  if (c.program) throw std::logic_error("core already runs a program");
  c.program = std::move(program);
  c.on_done = std::move(on_done);
  c.running = true;
  if (!c.blocked) schedule_step(core, sched_.now());
}

void Cpu::submit(std::uint32_t core, Access a) {
  validate_access(a);
  Core& c = cores_.at(core);
  c.queue.push_back(std::move(a));
  c.running = true;
  if (!c.blocked) schedule_step(core, sched_.now());
}

void Cpu::load(std::uint32_t core, std::uint64_t addr, AccessMode mode, std::function<void(std::uint64_t, SimTime)> done,
               std::uint8_t size) {
  submit(core, Access{AccessKind::kLoad, addr, 0, size, mode, true, std::move(done)});
}

void Cpu::store(std::uint32_t core, std::uint64_t addr, std::uint64_t value, AccessMode mode,
                std::function<void(std::uint64_t, SimTime)> done, std::uint8_t size) {
  submit(core, Access{AccessKind::kStore, addr, value, size, mode, false, std::move(done)});
}

void Cpu::schedule_step(std::uint32_t c, SimTime t) {
  Core& core = cores_[c];
  if (core.step_scheduled) return;
  core.step_scheduled = true;
  sched_.schedule(t, [this, c] { step(c); }, 50);
}

void Cpu::step(std::uint32_t c) {
  Core& core = cores_[c];
  core.step_scheduled = false;
  while (!core.blocked) {
    Access a;
    if (core.stalled) {
      a = std::move(*core.stalled);
      core.stalled.reset();
    } else if (!core.queue.empty()) {
      a = std::move(core.queue.front());
      core.queue.pop_front();
    } else if (core.program) {
      auto next = core.program();
      if (!next) {
        core.program = nullptr;
        continue;
      }
      validate_access(*next);
      a = std::move(*next);
    } else {
      break;
    }
    if (a.mode == AccessMode::kNonCacheable && a.kind == AccessKind::kStore) a.wait = true;
    const bool wait = a.wait;
    if (!execute(c, a)) {
      core.stalled = std::move(a);
      ++core.stats.stalls;
      return;
    }
    if (!wait) {
      const std::uint64_t d = scaled(cfg_.issue_ns);
      if (d > 0) {
        schedule_step(c, sched_.now() + d);
        return;
      }
    }
  }
  if (core.running && !core.blocked && !core.program && core.queue.empty() && !core.stalled && core.outstanding == 0) {
    core.running = false;
    if (core.on_done) {
      auto cb = std::move(core.on_done);
      core.on_done = nullptr;
      cb(sched_.now());
    }
  }
}

bool Cpu::execute(std::uint32_t c, Access& a) {
  const bool ok = a.mode == AccessMode::kCacheable ? exec_cacheable(c, a) : exec_uncached(c, a);
  if (ok) {
    Core& core = cores_[c];
    ++core.outstanding;
    if (a.kind == AccessKind::kLoad) ++core.stats.loads; else ++core.stats.stores;
  }
  return ok;
}

void Cpu::finish(std::uint32_t c, Access& a, std::uint64_t value, SimTime t) {
  Core& core = cores_[c];
  --core.outstanding;
  const bool wait = a.wait;
  if (a.on_complete) a.on_complete(value, t);
  if (wait) core.blocked = false;
  if (!core.blocked) schedule_step(c, t);
}

void Cpu::resume(std::uint32_t c) {
  Core& core = cores_[c];
  if (core.stalled && !core.blocked) schedule_step(c, sched_.now());
}

void Cpu::apply(std::size_t slot, Access& a, std::uint64_t& value) {
  const std::uint32_t line_bytes = cfg_.cache.line_bytes;
  std::uint8_t* p = &l2_data_[slot * line_bytes + a.addr % line_bytes];
  if (a.kind == AccessKind::kLoad) {
    value = 0;
    for (std::size_t i = 0; i < a.size; ++i) value |= std::uint64_t{p[i]} << (8 * i);
  } else {
    for (std::size_t i = 0; i < a.size; ++i) p[i] = static_cast<std::uint8_t>(a.value >> (8 * i));
    l2_.set_dirty(slot, true);
    value = a.value;
  }
}

bool Cpu::exec_cacheable(std::uint32_t c, Access& a) {
  Core& core = cores_[c];
  const std::uint64_t line = a.addr / cfg_.cache.line_bytes;
  std::uint64_t latency = 0;
  std::optional<std::size_t> slot;
  if (l1_[c].lookup(line)) {
    slot = l2_.lookup(line);
    ++core.stats.l1_hits;
    latency = cfg_.cache.l1_hit_ns;
  } else if ((slot = l2_.lookup(line))) {
    l1_[c].insert(line);
    ++core.stats.l2_hits;
    latency = cfg_.cache.l2_hit_ns;
  }
  if (a.wait) core.blocked = true;
  if (slot) {
    std::uint64_t value = 0;
    apply(*slot, a, value);
    sched_.schedule_in(scaled(latency), [this, c, a = std::move(a), value]() mutable { finish(c, a, value, sched_.now()); }, 51);
    return true;
  }
  if (auto it = mshrs_.find(line); it != mshrs_.end()) {
    ++core.stats.mshr_merges;
    it->second.ops.emplace_back(c, std::move(a));
    return true;
  }
  if (core.reads_in_flight >= cfg_.read_credits || core.evictions.size() >= cfg_.write_credits) {
    core.blocked = false;
    return false;
  }
  ++core.reads_in_flight;
  core.stats.max_reads_in_flight = std::max(core.stats.max_reads_in_flight, core.reads_in_flight);
  ++core.stats.l2_misses;
  Mshr& m = mshrs_[line];
  m.core = c;
  m.ops.emplace_back(c, std::move(a));
  sched_.schedule_in(scaled(cfg_.cache.l2_hit_ns), [this, line] { issue_fill(line); }, 52);
  return true;
}

void Cpu::issue_fill(std::uint64_t line) {
  if (wb_pending_.count(line)) {
    deferred_fills_.insert(line);
    return;
  }
  const std::uint32_t line_bytes = cfg_.cache.line_bytes;
  mem_read(line * line_bytes, static_cast<std::uint16_t>(line_bytes / cfg_.beat_bytes), mshrs_.at(line).core,
           [this, line](std::vector<Beat> beats) { on_fill(line, beats); });
}

void Cpu::on_fill(std::uint64_t line, const std::vector<Beat>& beats) {
  auto node = mshrs_.extract(line);
  Mshr& m = node.mapped();
  const std::uint32_t line_bytes = cfg_.cache.line_bytes;
  --cores_[m.core].reads_in_flight;

  const auto victim = l2_.insert(line);
  if (victim.valid) {
    for (auto& l1 : l1_) l1.invalidate(victim.line);
    if (victim.dirty) evict(m.core, victim);
  }
  std::uint8_t* dst = &l2_data_[victim.slot * line_bytes];
  std::size_t off = 0;
  for (const auto& b : beats) {
    std::copy_n(b.data.begin(), b.size, dst + off);
    off += b.size;
  }

  for (auto& [oc, op] : m.ops) {
    if (!l1_[oc].lookup(line)) l1_[oc].insert(line);
    std::uint64_t value = 0;
    apply(victim.slot, op, value);
    finish(oc, op, value, sched_.now());
  }
  resume(m.core);
}

void Cpu::evict(std::uint32_t c, const SetAssocCache::Victim& v) {
  const std::uint32_t line_bytes = cfg_.cache.line_bytes;
  Core& core = cores_[c];
  Writeback wb;
  wb.line = v.line;
  wb.data.assign(l2_data_.begin() + v.slot * line_bytes, l2_data_.begin() + (v.slot + 1) * line_bytes);
  ++wb_pending_[v.line];
  core.evictions.push_back(std::move(wb));
  ++core.stats.writebacks;
  core.stats.max_eviction_queue =
      std::max<std::uint32_t>(core.stats.max_eviction_queue, static_cast<std::uint32_t>(core.evictions.size()));
  pump_evictions(c);
}

void Cpu::pump_evictions(std::uint32_t c) {
  Core& core = cores_[c];
  const std::uint32_t line_bytes = cfg_.cache.line_bytes;
  while (core.writes_in_flight < cfg_.write_credits && !core.evictions.empty()) {
    Writeback wb = std::move(core.evictions.front());
    core.evictions.pop_front();
    ++core.writes_in_flight;
    core.stats.max_writes_in_flight = std::max(core.stats.max_writes_in_flight, core.writes_in_flight);
    BurstRequest shape;
    shape.burst_len = static_cast<std::uint16_t>(line_bytes / cfg_.beat_bytes);
    shape.beat_bytes = cfg_.beat_bytes;
    shape.is_write = true;
    const std::uint64_t line = wb.line;
    mem_write(line * line_bytes, make_beats(shape, wb.data), c, [this, c, line] { on_writeback_done(c, line); });
  }
}

void Cpu::on_writeback_done(std::uint32_t c, std::uint64_t line) {
  --cores_[c].writes_in_flight;
  auto it = wb_pending_.find(line);
  if (--it->second == 0) {
    wb_pending_.erase(it);
    if (deferred_fills_.erase(line)) issue_fill(line);
  }
  pump_evictions(c);
  resume(c);
  check_flush();
}

bool Cpu::exec_uncached(std::uint32_t c, Access& a) {
  Core& core = cores_[c];
  const std::uint64_t base = a.addr & ~std::uint64_t{cfg_.beat_bytes - 1u};
  const std::size_t off = a.addr - base;
  if (a.kind == AccessKind::kLoad) {
    if (core.reads_in_flight >= cfg_.read_credits) return false;
    ++core.reads_in_flight;
    core.stats.max_reads_in_flight = std::max(core.stats.max_reads_in_flight, core.reads_in_flight);
    ++core.stats.uncached;
    if (a.wait) core.blocked = true;
    mem_read(base, 1, c, [this, c, a = std::move(a), off](std::vector<Beat> beats) mutable {
      --cores_[c].reads_in_flight;
      std::uint64_t value = 0;
      for (std::size_t i = 0; i < a.size; ++i) value |= std::uint64_t{beats[0].data[off + i]} << (8 * i);
      finish(c, a, value, sched_.now());
      resume(c);
    });
    return true;
  }
  if (core.writes_in_flight >= cfg_.write_credits) return false;
  ++core.writes_in_flight;
  core.stats.max_writes_in_flight = std::max(core.stats.max_writes_in_flight, core.writes_in_flight);
  ++core.stats.uncached;
  core.blocked = true;
  Beat beat;
  beat.size = static_cast<std::uint8_t>(cfg_.beat_bytes);
  beat.last = true;
  beat.strobe = ((std::uint64_t{1} << a.size) - 1) << off;
  for (std::size_t i = 0; i < a.size; ++i) beat.data[off + i] = static_cast<std::uint8_t>(a.value >> (8 * i));
  mem_write(base, {beat}, c, [this, c, a = std::move(a)]() mutable {
    --cores_[c].writes_in_flight;
    finish(c, a, a.value, sched_.now());
    pump_evictions(c);
    resume(c);
    check_flush();
  });
  return true;
}

void Cpu::mem_read(std::uint64_t addr, std::uint16_t burst_len, std::uint32_t core,
                   std::function<void(std::vector<Beat>)> done) {
  BurstRequest req;
  req.burst_len = burst_len;
  req.beat_bytes = cfg_.beat_bytes;
  req.txid = TransactionId{core};
  req.master = cfg_.master;
  req.issue_time = sched_.now();
  if (is_fpga(addr)) {
    req.address = addr - cfg_.fpga_base;
    fpga_.issue_read(req, [done = std::move(done)](ReadCompletion& rc) { done(std::move(rc.beats)); });
    return;
  }
  if (!cpu_dram_) throw BusError("unmapped CPU address", addr);
  req.address = addr - cfg_.cpu_dram_base;
  cpu_dram_->read_burst(req, [this, done = std::move(done)](std::vector<Beat> beats) {
    const SimTime last = beats.back().time;
    sched_.schedule(last, [done, beats = std::move(beats)]() mutable { done(std::move(beats)); }, 53);
  });
}

void Cpu::mem_write(std::uint64_t addr, std::vector<Beat> beats, std::uint32_t core, std::function<void()> done) {
  BurstRequest req;
  req.burst_len = static_cast<std::uint16_t>(beats.size());
  req.beat_bytes = cfg_.beat_bytes;
  req.is_write = true;
  req.txid = TransactionId{core};
  req.master = cfg_.master;
  req.issue_time = sched_.now();
  if (is_fpga(addr)) {
    req.address = addr - cfg_.fpga_base;
    fpga_.issue_write(req, std::move(beats), [done = std::move(done)](const WriteCompletion&) { done(); });
    return;
  }
  if (!cpu_dram_) throw BusError("unmapped CPU address", addr);
  req.address = addr - cfg_.cpu_dram_base;
  for (auto& b : beats) b.txid = req.txid;
  cpu_dram_->write_burst(req, std::move(beats), [done = std::move(done)](WriteResponse) { done(); });
}

void Cpu::flush(std::function<void(SimTime)> done) {
  for (std::size_t s = 0; s < l2_.slots(); ++s) {
    if (l2_.valid(s) && l2_.dirty(s)) {
      evict(0, SetAssocCache::Victim{true, l2_.line_at(s), true, s});
      l2_.set_dirty(s, false);
    }
  }
  flush_waiters_.push_back(std::move(done));
  sched_.schedule_in(0, [this] { check_flush(); }, 54);
}

void Cpu::check_flush() {
  if (flush_waiters_.empty()) return;
  for (const auto& c : cores_) {
    if (c.writes_in_flight || !c.evictions.empty()) return;
  }
  auto waiters = std::move(flush_waiters_);
  flush_waiters_.clear();
  for (auto& w : waiters) {
    if (w) w(sched_.now());
  }
}

void Cpu::invalidate_all() {
  for (std::size_t s = 0; s < l2_.slots(); ++s) {
    if (l2_.valid(s)) {
      const std::uint64_t line = l2_.line_at(s);
      l2_.invalidate(line);
      for (auto& l1 : l1_) l1.invalidate(line);
    }
  }
}

}  // namespace memsim
