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
 * @file emulator.hpp
 * @brief The FPGA side assembled: store, DDR model, one rate controller per
 * region, the AXI fabric in front of them, the pulse timer and the CSR.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "memsim/axi_fabric.hpp"
#include "memsim/csr.hpp"
#include "memsim/memory_model.hpp"
#include "memsim/rate_controller.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

struct EmulatorConfig {
  std::uint64_t store_bytes{4 * kGiB};
  std::uint16_t beat_bytes{kDefaultBeatBytes};
  FabricTiming fabric{};
  MemTiming memory{kFpgaSideTiming};
  std::vector<RegionConfig> regions{RegionConfig{}};
  std::uint64_t seed{1};
  std::uint64_t pulse_ns{PulseTimer::kDefaultPeriodNs};
};

class Emulator {
 public:
  Emulator(Scheduler& sched, EmulatorConfig cfg);
  Emulator(const Emulator&) = delete;
  Emulator& operator=(const Emulator&) = delete;

  AxiFabric& fabric() { return fabric_; }
  Csr& csr() { return csr_; }
  MeApi& api() { return api_; }
  BackingStore& store() { return store_; }
  MemoryController& memory() { return memory_; }
  RateController& region(std::size_t i) { return *regions_.at(i); }
  std::size_t region_count() const { return regions_.size(); }
  const PulseTimer& timer() const { return *timer_; }
  const EmulatorConfig& config() const { return cfg_; }

 private:
  static std::vector<RateController*> raw(const std::vector<std::unique_ptr<RateController>>& v);

  EmulatorConfig cfg_;
  BackingStore store_;
  MemoryController memory_;
  std::vector<std::unique_ptr<RateController>> regions_;
  AxiFabric fabric_;
  Csr csr_;
  MeApi api_;
  std::unique_ptr<PulseTimer> timer_;
};

}  // namespace memsim
