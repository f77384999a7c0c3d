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

#include "memsim/rate_controller.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace memsim {

void validate_region_config(const RegionConfig& cfg) {
  if (cfg.boundary % kBoundaryAlign != 0) throw std::invalid_argument("region boundary must be 1 MB aligned");
  if (cfg.rd_latency_ns % kLatencyUnitNs != 0 || cfg.wr_latency_ns % kLatencyUnitNs != 0) {
    throw std::invalid_argument("latencies must be multiples of 100 ns");
  }
  if (cfg.rd_bw % kBandwidthUnit != 0 || cfg.wr_bw % kBandwidthUnit != 0) {
    throw std::invalid_argument("bandwidths must be multiples of 10 MB/s");
  }
}

std::optional<LatencyRecord> PendingLatencyMap::pop(TransactionId id) {
  auto it = map_.find(id);
  if (it == map_.end() || it->second.empty()) return std::nullopt;
  LatencyRecord rec = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) map_.erase(it);
  return rec;
}

std::size_t PendingLatencyMap::depth(TransactionId id) const {
  auto it = map_.find(id);
  return it == map_.end() ? 0 : it->second.size();
}

std::size_t PendingLatencyMap::total() const {
  std::size_t n = 0;
  for (const auto& [id, q] : map_) n += q.size();
  return n;
}

const std::deque<LatencyRecord>* PendingLatencyMap::records(TransactionId id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second;
}

void TokenBucket::configure(std::uint64_t bytes_per_sec, std::uint64_t pulse_ns, std::uint32_t beat_bytes) {
  bytes_per_sec_ = bytes_per_sec;
  if (bytes_per_sec == 0) {
    refill_ = capacity_ = tokens_ = 0;
    return;
  }
  const bool was_unlimited = capacity_ == 0;
  refill_ = bytes_per_sec * pulse_ns;
  capacity_ = refill_ + std::uint64_t{beat_bytes} * kScale;
  tokens_ = was_unlimited ? capacity_ : std::min(tokens_, capacity_);
}

bool TokenBucket::refill() {
  if (unlimited() || tokens_ >= capacity_) return false;
  tokens_ = std::min(capacity_, tokens_ + refill_);
  return true;
}

bool TokenBucket::try_consume(std::uint64_t bytes) {
  if (unlimited()) return true;
  const std::uint64_t cost = bytes * kScale;
  if (tokens_ < cost) return false;
  tokens_ -= cost;
  return true;
}

Lfsr32::Lfsr32(std::uint32_t seed) : state_(seed == 0 ? 1u : seed) {}

std::uint32_t derive_lfsr_seed(std::uint64_t run_seed, std::size_t region, Direction dir) {
  // splitmix64 finalizer over the stream key
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ull * (2 * region + static_cast<std::uint64_t>(dir) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  auto s = static_cast<std::uint32_t>(z ^ (z >> 32));
  return s == 0 ? 1u : s;
}

std::uint64_t inject_errors(std::span<std::uint8_t> payload, std::uint32_t threshold, Lfsr32& lfsr) {
  std::uint64_t flipped = 0;
  for (auto& byte : payload) {
    std::uint8_t mask = 0;
    for (int bit = 0; bit < 8; ++bit) {
      if (lfsr.next() < threshold) mask |= static_cast<std::uint8_t>(1u << bit);
    }
    byte ^= mask;
    flipped += static_cast<std::uint64_t>(std::popcount(mask));
  }
  return flipped;
}

namespace {

void saturating_add(std::uint64_t& counter, std::uint64_t v) {
  counter = (counter > std::numeric_limits<std::uint64_t>::max() - v) ? std::numeric_limits<std::uint64_t>::max()
                                                                        : counter + v;
}

// Only bytes enabled by the write strobe reach the store, so only those are exposed to injection.
std::uint64_t inject_enabled_bytes(Beat& beat, std::uint32_t threshold, Lfsr32& lfsr) {
  const std::uint64_t all = beat.size >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << beat.size) - 1;
  if ((beat.strobe & all) == all) return inject_errors(beat.payload(), threshold, lfsr);
  std::uint64_t flipped = 0;
  for (std::size_t i = 0; i < beat.size; ++i) {
    if (beat.byte_enabled(i)) flipped += inject_errors(std::span(&beat.data[i], 1), threshold, lfsr);
  }
  return flipped;
}

}  // namespace

RateController::RateController(Scheduler& sched, MemoryController& memory, std::size_t index, RegionConfig cfg,
                               std::uint64_t run_seed, std::uint16_t beat_bytes, std::uint64_t pulse_ns)
    : sched_(sched), memory_(memory), index_(index), cfg_(cfg), beat_bytes_(beat_bytes), pulse_ns_(pulse_ns) {
  rd_.dir = Direction::kRead;
  wr_.dir = Direction::kWrite;
  rd_.lfsr = Lfsr32(derive_lfsr_seed(run_seed, index, Direction::kRead));
  wr_.lfsr = Lfsr32(derive_lfsr_seed(run_seed, index, Direction::kWrite));
  rd_.bucket.configure(cfg.rd_bw, pulse_ns_, beat_bytes_);
  wr_.bucket.configure(cfg.wr_bw, pulse_ns_, beat_bytes_);
}

bool RateController::idle() const {
  return rd_.held == 0 && wr_.held == 0 && pending_rd_.total() == 0 && pending_wr_.total() == 0;
}

void RateController::on_ar(const BurstRequest& req) {
  pending_rd_.push(req.txid, LatencyRecord{cfg_.rd_latency_ns, req.burst_len});
  memory_.read_burst(req, [this](std::vector<Beat> beats) {
    const SimTime first = beats.front().time;
    on_r_burst(first, std::move(beats));
  });
}

void RateController::on_r_burst(SimTime first_beat_arrival, std::vector<Beat> beats) {
  if (beats.empty()) throw ProtocolError("empty read burst");
  const TransactionId id = beats.front().txid;
  const auto rec = pending_rd_.pop(id);
  if (!rec) throw ProtocolError("read data without a matching AR record, id=" + std::to_string(id.value));
  if (rec->burst_len != beats.size()) throw ProtocolError("read burst length does not match AR record");
  if (!beats.back().last) throw ProtocolError("read burst missing last flag");

  if (cfg_.rd_err_threshold != 0) {
    for (auto& b : beats) saturating_add(counters_.rd_bit_errors, inject_errors(b.payload(), cfg_.rd_err_threshold, rd_.lfsr));
  }
  beats.front().time = first_beat_arrival;
  BurstRequest req;
  req.txid = id;
  req.burst_len = rec->burst_len;
  req.beat_bytes = beats.front().size;
  hold(rd_, req, std::move(beats), rec->delay_ns);
}

void RateController::on_aw_w(const BurstRequest& req, std::vector<Beat> beats) {
  pending_wr_.push(req.txid, LatencyRecord{cfg_.wr_latency_ns, req.burst_len});
  const auto rec = pending_wr_.pop(req.txid);
  if (!rec || beats.size() != rec->burst_len) throw ProtocolError("write beat count does not match AW burst_len");
  if (cfg_.wr_err_threshold != 0) {
    for (auto& b : beats) saturating_add(counters_.wr_bit_errors, inject_enabled_bytes(b, cfg_.wr_err_threshold, wr_.lfsr));
  }
  const SimTime now = sched_.now();
  for (auto& b : beats) b.time = now;
  hold(wr_, req, std::move(beats), rec->delay_ns);
}

void RateController::hold(Channel& ch, const BurstRequest& req, std::vector<Beat> beats, std::uint64_t delay_ns) {
  HeldBurst burst;
  burst.req = req;
  burst.eligible.reserve(beats.size());
  for (const auto& b : beats) burst.eligible.push_back(b.time + delay_ns);
  burst.beats = std::move(beats);
  burst.seq = ch.next_seq++;
  ch.queues[req.txid].push_back(std::move(burst));
  ++ch.held;
  pump(ch);
}

void RateController::schedule_wake(Channel& ch, SimTime t) {
  if (t >= ch.wake_at) return;
  ch.wake_at = t;
  sched_.schedule(t, [this, &ch, t] {
    if (ch.wake_at == t) ch.wake_at = SimTime{std::numeric_limits<std::uint64_t>::max()};
    pump(ch);
  }, ch.dir == Direction::kRead ? 20 : 21);
}

void RateController::pump(Channel& ch) {
  const SimTime now = sched_.now();
  while (ch.held != 0) {
    if (!ch.active) {
      // Pick the per-ID head that becomes eligible first; ties go to the earlier arrival.
      const HeldBurst* best = nullptr;
      TransactionId best_id{};
      for (const auto& [id, q] : ch.queues) {
        const HeldBurst& head = q.front();
        if (!best || head.eligible[head.next] < best->eligible[best->next] ||
            (head.eligible[head.next] == best->eligible[best->next] && head.seq < best->seq)) {
          best = &head;
          best_id = id;
        }
      }
      ch.active = best_id;
    }
    auto qit = ch.queues.find(*ch.active);
    HeldBurst& burst = qit->second.front();
    const SimTime ready = burst.eligible[burst.next];
    if (ready > now) {
      if (burst.next == 0) ch.active.reset();
      schedule_wake(ch, ready);
      return;
    }
    Beat& beat = burst.beats[burst.next];
    if (!ch.bucket.try_consume(beat.size)) return;  // next pulse resumes
    if (timer_ && !ch.bucket.unlimited()) timer_->wake();
    beat.time = now;
    if (ch.dir == Direction::kRead) {
      saturating_add(counters_.rd_bytes, beat.size);
    } else {
      saturating_add(counters_.wr_bytes, beat.size);
    }
    if (observer_) observer_(ch.dir, now, beat.size);
    if (++burst.next == burst.beats.size()) {
      HeldBurst done = std::move(burst);
      qit->second.pop_front();
      if (qit->second.empty()) ch.queues.erase(qit);
      ch.active.reset();
      --ch.held;
      complete(ch, std::move(done));
    }
  }
}

void RateController::complete(Channel& ch, HeldBurst burst) {
  if (ch.dir == Direction::kRead) {
    if (read_sink_) read_sink_(std::move(burst.beats));
    return;
  }
  memory_.write_burst(burst.req, std::move(burst.beats), [this](WriteResponse resp) {
    const WriteResponse out = on_b(resp);
    if (write_sink_) write_sink_(out);
  });
}

void RateController::on_pulse(SimTime) {
  for (Channel* ch : {&rd_, &wr_}) {
    if (ch->pending_bw) {
      ch->bucket.configure(*ch->pending_bw, pulse_ns_, beat_bytes_);
      ch->pending_bw.reset();
    }
    if (!ch->bucket.unlimited()) ch->bucket.refill();
    if (ch->held != 0) pump(*ch);
  }
}

bool RateController::needs_pulse() const {
  for (const Channel* ch : {&rd_, &wr_}) {
    if (ch->pending_bw) return true;
    if (!ch->bucket.unlimited() && !ch->bucket.full()) return true;
  }
  return false;
}

void RateController::set_latency_ns(std::uint64_t rd_ns, std::uint64_t wr_ns) {
  cfg_.rd_latency_ns = rd_ns;
  cfg_.wr_latency_ns = wr_ns;
}

void RateController::set_bandwidth(std::uint64_t rd_bytes_per_sec, std::uint64_t wr_bytes_per_sec) {
  cfg_.rd_bw = rd_bytes_per_sec;
  cfg_.wr_bw = wr_bytes_per_sec;
  rd_.pending_bw = rd_bytes_per_sec;
  wr_.pending_bw = wr_bytes_per_sec;
  if (timer_) timer_->wake();
}

void RateController::set_error_thresholds(std::uint32_t rd, std::uint32_t wr) {
  cfg_.rd_err_threshold = rd;
  cfg_.wr_err_threshold = wr;
}

}  // namespace memsim
