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

#include "memsim/sim_core.hpp"

#include <algorithm>
#include <string>

namespace memsim {

namespace {

// Min-heap on (time, seq).
struct Later {
  bool operator()(const Scheduler::Event& a, const Scheduler::Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void Scheduler::schedule(SimTime t, Action action, std::uint32_t tag) {
  if (t < now_) {
    throw SchedulingError("event scheduled in the past: t=" + std::to_string(t.ns) +
                          " now=" + std::to_string(now_.ns));
  }
  heap_.push_back(Event{t, next_seq_++, tag, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

bool Scheduler::dispatch_next(SimTime limit) {
  if (heap_.empty() || heap_.front().time > limit) return false;
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Event ev = std::move(heap_.back());
  heap_.pop_back();
  now_ = ev.time;
  ++dispatched_;
  trace_hash_ = fnv_mix(trace_hash_, ev.time.ns);
  trace_hash_ = fnv_mix(trace_hash_, ev.seq);
  trace_hash_ = fnv_mix(trace_hash_, ev.tag);
  ev.action();
  return true;
}

void Scheduler::run_until(SimTime t) {
  if (t < now_) throw SchedulingError("run_until target precedes current time");
  while (dispatch_next(t)) {
  }
  now_ = t;
}

bool Scheduler::run_until_stopped(SimTime limit) {
  if (limit < now_) throw SchedulingError("run_until_stopped limit precedes current time");
  stop_requested_ = false;
  while (!stop_requested_ && dispatch_next(limit)) {
  }
  if (stop_requested_) {
    stop_requested_ = false;
    return true;
  }
  now_ = limit;
  return false;
}

PulseTimer::PulseTimer(Scheduler& sched, std::uint64_t period_ns, std::vector<PulseSink*> subscribers)
    : sched_(sched), period_ns_(period_ns), sinks_(std::move(subscribers)) {
  if (period_ns_ == 0) throw std::invalid_argument("pulse period must be positive");
}

void PulseTimer::start() {
  if (started_) return;
  started_ = true;
  wake();
}

void PulseTimer::wake() {
  if (!started_ || armed_) return;
  armed_ = true;
  const std::uint64_t next = (sched_.now().ns / period_ns_ + 1) * period_ns_;
  sched_.schedule(SimTime{next}, [this] { fire(); }, 1);
}

void PulseTimer::fire() {
  armed_ = false;
  ++pulses_;
  const SimTime now = sched_.now();
  for (PulseSink* sink : sinks_) sink->on_pulse(now);
  if (armed_) return;
  if (std::any_of(sinks_.begin(), sinks_.end(), [](const PulseSink* s) { return s->needs_pulse(); })) wake();
}

std::unique_ptr<PulseTimer> start_pulse_timer(Scheduler& sched, std::uint64_t period_ns,
                                              std::vector<PulseSink*> subscribers) {
  auto timer = std::make_unique<PulseTimer>(sched, period_ns, std::move(subscribers));
  timer->start();
  return timer;
}

}  // namespace memsim
