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
 * @file sim_core.hpp
 * @brief Deterministic discrete-event scheduler and the 100-ns pulse timer.
 *
 * All simulated components run inside one Scheduler. Events are ordered by
 * (time, insertion ordinal), so two runs with identical inputs dispatch the
 * exact same event sequence. The scheduler folds every dispatch into a
 * running trace hash that tests compare across runs.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace memsim {

/// Simulated time in integer nanoseconds.
struct SimTime {
  std::uint64_t ns{0};

  constexpr SimTime() = default;
  constexpr explicit SimTime(std::uint64_t v) : ns(v) {}

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(std::uint64_t delta_ns) const { return SimTime{ns + delta_ns}; }
  constexpr SimTime& operator+=(std::uint64_t delta_ns) {
    ns += delta_ns;
    return *this;
  }
  /// Elapsed nanoseconds; saturates at zero.
  constexpr std::uint64_t operator-(SimTime earlier) const { return ns > earlier.ns ? ns - earlier.ns : 0; }
};

constexpr SimTime kTimeZero{0};

class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Scheduler {
 public:
  using Action = std::function<void()>;

  struct Event {
    SimTime time;
    std::uint64_t seq{0};
    std::uint32_t tag{0};
    Action action;
  };

  Scheduler() = default;
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  /// Enqueues `action` at absolute time `t`. Throws SchedulingError if t < now().
  /// `tag` is folded into the trace hash and lets callers label event kinds.
  void schedule(SimTime t, Action action, std::uint32_t tag = 0);
  void schedule_in(std::uint64_t delay_ns, Action action, std::uint32_t tag = 0) {
    schedule(now_ + delay_ns, std::move(action), tag);
  }

  /// Dispatches every event with time <= t, then sets now() to t.
  void run_until(SimTime t);

  /// Like run_until(), but returns early (leaving now() at the stopping
  /// event's time) once request_stop() has been called from inside an event.
  /// Returns true when stopped by request.
  bool run_until_stopped(SimTime limit);
  void request_stop() { stop_requested_ = true; }

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }
  std::uint64_t trace_hash() const { return trace_hash_; }

 private:
  bool dispatch_next(SimTime limit);

  std::vector<Event> heap_;
  SimTime now_{};
  std::uint64_t next_seq_{0};
  std::uint64_t dispatched_{0};
  std::uint64_t trace_hash_{0xcbf29ce484222325ull};
  bool stop_requested_{false};
};

class PulseSink {
 public:
  virtual ~PulseSink() = default;
  virtual void on_pulse(SimTime now) = 0;
  /// False when a pulse right now would change nothing for this sink.
  virtual bool needs_pulse() const { return true; }
};

/// Delivers a pulse to every subscriber at t = k * period for k = 1, 2, ...
/// Subscribers receive pulse k in subscription order, all within the same
/// event, so pulse k reaches every sink before anything scheduled for pulse k+1.
///
/// When no subscriber needs_pulse() the timer goes dormant and skips the
/// pulses that would have been no-ops. wake() re-arms it on the next multiple
/// of the period.
class PulseTimer {
 public:
  static constexpr std::uint64_t kDefaultPeriodNs = 100;

  PulseTimer(Scheduler& sched, std::uint64_t period_ns = kDefaultPeriodNs,
             std::vector<PulseSink*> subscribers = {});

  void subscribe(PulseSink& sink) { sinks_.push_back(&sink); }
  /// Arms the timer. The first pulse lands on the first multiple of the period after now().
  void start();
  void wake();

  std::uint64_t period_ns() const { return period_ns_; }
  std::uint64_t pulses_delivered() const { return pulses_; }

 private:
  void fire();

  Scheduler& sched_;
  std::uint64_t period_ns_;
  std::vector<PulseSink*> sinks_;
  std::uint64_t pulses_{0};
  bool started_{false};
  bool armed_{false};
};

/// Convenience form of PulseTimer construction + start().
std::unique_ptr<PulseTimer> start_pulse_timer(Scheduler& sched, std::uint64_t period_ns,
                                              std::vector<PulseSink*> subscribers);

}  // namespace memsim
