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

#include "memsim/emulator.hpp"

#include <stdexcept>

namespace memsim {

namespace {

std::vector<std::unique_ptr<RateController>> make_regions(Scheduler& sched, MemoryController& mem,
                                                          const EmulatorConfig& cfg) {
  if (cfg.regions.empty()) throw std::invalid_argument("emulator needs at least one region");
  std::vector<std::unique_ptr<RateController>> out;
  for (std::size_t i = 0; i < cfg.regions.size(); ++i) {
    validate_region_config(cfg.regions[i]);
    out.push_back(std::make_unique<RateController>(sched, mem, i, cfg.regions[i], cfg.seed, cfg.beat_bytes, cfg.pulse_ns));
  }
  return out;
}

}  // namespace

std::vector<RateController*> Emulator::raw(const std::vector<std::unique_ptr<RateController>>& v) {
  std::vector<RateController*> out;
  for (const auto& p : v) out.push_back(p.get());
  return out;
}

Emulator::Emulator(Scheduler& sched, EmulatorConfig cfg)
    : cfg_(std::move(cfg)),
      store_(cfg_.store_bytes),
      memory_(sched, store_, cfg_.memory),
      regions_(make_regions(sched, memory_, cfg_)),
      fabric_(sched, cfg_.fabric, cfg_.store_bytes),
      csr_(sched, fabric_, raw(regions_)),
      api_(csr_) {
  std::vector<PulseSink*> sinks;
  for (auto& r : regions_) {
    fabric_.attach_region(*r);
    sinks.push_back(r.get());
  }
  timer_ = start_pulse_timer(sched, cfg_.pulse_ns, std::move(sinks));
  for (auto& r : regions_) r->set_pulse_timer(timer_.get());
}

}  // namespace memsim
