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

#include "memsim/csr.hpp"

#include <cmath>
#include <string>

namespace memsim {

std::uint32_t percent_to_threshold(double pct) {
  if (!(pct >= 0.0 && pct <= 100.0)) throw CsrError("error rate percentage outside [0, 100]");
  const double t = std::round(pct / 100.0 * 4294967296.0);
  return t >= 4294967295.0 ? 0xffffffffu : static_cast<std::uint32_t>(t);
}

Csr::Csr(Scheduler& sched, AxiFabric& fabric, std::vector<RateController*> banks)
    : sched_(sched), fabric_(fabric), banks_(std::move(banks)) {}

RateController& Csr::rc(std::size_t bank) {
  if (bank >= banks_.size()) throw CsrError("invalid bank " + std::to_string(bank));
  return *banks_[bank];
}

const RateController& Csr::rc(std::size_t bank) const {
  if (bank >= banks_.size()) throw CsrError("invalid bank " + std::to_string(bank));
  return *banks_[bank];
}

void Csr::set_boundary(std::size_t bank, std::uint64_t boundary_bytes) {
  rc(bank);
  try {
    fabric_.set_boundary(bank, boundary_bytes);
  } catch (const std::invalid_argument& e) {
    throw CsrError(e.what());
  }
}

void Csr::set_latency(std::size_t bank, std::uint32_t rd_100ns, std::uint32_t wr_100ns) {
  rc(bank).set_latency_ns(std::uint64_t{rd_100ns} * kLatencyUnitNs, std::uint64_t{wr_100ns} * kLatencyUnitNs);
}

void Csr::set_throughput(std::size_t bank, std::uint32_t rd_10mbps, std::uint32_t wr_10mbps) {
  rc(bank).set_bandwidth(std::uint64_t{rd_10mbps} * kBandwidthUnit, std::uint64_t{wr_10mbps} * kBandwidthUnit);
}

void Csr::set_error_rate(std::size_t bank, double rd_percent, double wr_percent) {
  auto& r = rc(bank);
  const std::uint32_t rd = percent_to_threshold(rd_percent);
  const std::uint32_t wr = percent_to_threshold(wr_percent);
  r.set_error_thresholds(rd, wr);
}

void Csr::set_error_threshold(std::size_t bank, std::uint32_t rd, std::uint32_t wr) {
  rc(bank).set_error_thresholds(rd, wr);
}

Counters Csr::get_counters(std::size_t bank) const { return rc(bank).counters(); }

void Csr::reset_counters(std::size_t bank) { rc(bank).reset_counters(); }

void Csr::schedule(SimTime t, std::function<void(Csr&)> op) {
  sched_.schedule(t, [this, op = std::move(op)] { op(*this); }, 40);
}

std::uint32_t Csr::read32(std::uint32_t offset) const {
  if (offset == csr_reg::kVersion) return csr_reg::kVersionValue;
  if (offset == csr_reg::kBankCount) return static_cast<std::uint32_t>(banks_.size());
  const std::size_t bank = offset / csr_reg::kBankStride;
  const std::uint32_t reg = offset % csr_reg::kBankStride;
  const RateController& r = rc(bank);
  const RegionConfig& c = r.config();
  const Counters& k = r.counters();
  auto half = [reg](std::uint64_t v, std::uint32_t lo) {
    return static_cast<std::uint32_t>(reg == lo ? v & 0xffffffffu : v >> 32);
  };
  switch (reg) {
    case csr_reg::kBoundaryMb: return static_cast<std::uint32_t>(c.boundary / kBoundaryAlign);
    case csr_reg::kRdLatency: return static_cast<std::uint32_t>(c.rd_latency_ns / kLatencyUnitNs);
    case csr_reg::kWrLatency: return static_cast<std::uint32_t>(c.wr_latency_ns / kLatencyUnitNs);
    case csr_reg::kRdThpt: return static_cast<std::uint32_t>(c.rd_bw / kBandwidthUnit);
    case csr_reg::kWrThpt: return static_cast<std::uint32_t>(c.wr_bw / kBandwidthUnit);
    case csr_reg::kRdErrThreshold: return c.rd_err_threshold;
    case csr_reg::kWrErrThreshold: return c.wr_err_threshold;
    case csr_reg::kRdBytesLo:
    case csr_reg::kRdBytesLo + 4: return half(k.rd_bytes, csr_reg::kRdBytesLo);
    case csr_reg::kWrBytesLo:
    case csr_reg::kWrBytesLo + 4: return half(k.wr_bytes, csr_reg::kWrBytesLo);
    case csr_reg::kRdBitErrorsLo:
    case csr_reg::kRdBitErrorsLo + 4: return half(k.rd_bit_errors, csr_reg::kRdBitErrorsLo);
    case csr_reg::kWrBitErrorsLo:
    case csr_reg::kWrBitErrorsLo + 4: return half(k.wr_bit_errors, csr_reg::kWrBitErrorsLo);
    default: break;
  }
  throw CsrError("read of unmapped CSR offset " + std::to_string(offset));
}

void Csr::write32(std::uint32_t offset, std::uint32_t value) {
  const std::size_t bank = offset / csr_reg::kBankStride;
  const std::uint32_t reg = offset % csr_reg::kBankStride;
  const RegionConfig c = rc(bank).config();
  switch (reg) {
    case csr_reg::kBoundaryMb: set_boundary(bank, std::uint64_t{value} * kBoundaryAlign); return;
    case csr_reg::kRdLatency:
      set_latency(bank, value, static_cast<std::uint32_t>(c.wr_latency_ns / kLatencyUnitNs));
      return;
    case csr_reg::kWrLatency:
      set_latency(bank, static_cast<std::uint32_t>(c.rd_latency_ns / kLatencyUnitNs), value);
      return;
    case csr_reg::kRdThpt: set_throughput(bank, value, static_cast<std::uint32_t>(c.wr_bw / kBandwidthUnit)); return;
    case csr_reg::kWrThpt: set_throughput(bank, static_cast<std::uint32_t>(c.rd_bw / kBandwidthUnit), value); return;
    case csr_reg::kRdErrThreshold: set_error_threshold(bank, value, c.wr_err_threshold); return;
    case csr_reg::kWrErrThreshold: set_error_threshold(bank, c.rd_err_threshold, value); return;
    case csr_reg::kCounterReset:
      if (value & 1u) reset_counters(bank);
      return;
    default: break;
  }
  throw CsrError("write to read-only or unmapped CSR offset " + std::to_string(offset));
}

}  // namespace memsim
