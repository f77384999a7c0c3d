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
 * @file csr.hpp
 * @brief Control and status registers of the emulator, plus the ME_-style API.
 *
 * Register map (32-bit registers, bank stride 0x100, bank n at n * 0x100):
 *
 *   0x00  BOUNDARY_MB        region start in 1 MB units          RW
 *   0x04  RD_LATENCY_100NS                                       RW
 *   0x08  WR_LATENCY_100NS                                       RW
 *   0x0C  RD_THPT_10MBPS     0 = unlimited                       RW
 *   0x10  WR_THPT_10MBPS     0 = unlimited                       RW
 *   0x14  RD_ERR_THRESHOLD   flip probability = value / 2^32     RW
 *   0x18  WR_ERR_THRESHOLD                                       RW
 *   0x1C  COUNTER_RESET      write 1 to clear this bank's counters   WO
 *   0x20  RD_BYTES_LO / 0x24 RD_BYTES_HI                         RO
 *   0x28  WR_BYTES_LO / 0x2C WR_BYTES_HI                         RO
 *   0x30  RD_BIT_ERRORS_LO / 0x34 _HI                            RO
 *   0x38  WR_BIT_ERRORS_LO / 0x3C _HI                            RO
 *
 *   0xF000 VERSION, 0xF004 BANK_COUNT                            RO
 *
 * Writes apply at the simulated instant they are made. schedule() places a
 * configuration change at a later simulated time instead.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "memsim/axi_fabric.hpp"
#include "memsim/rate_controller.hpp"
#include "memsim/sim_core.hpp"

namespace memsim {

namespace csr_reg {
inline constexpr std::uint32_t kBankStride = 0x100;
inline constexpr std::uint32_t kBoundaryMb = 0x00;
inline constexpr std::uint32_t kRdLatency = 0x04;
inline constexpr std::uint32_t kWrLatency = 0x08;
inline constexpr std::uint32_t kRdThpt = 0x0C;
inline constexpr std::uint32_t kWrThpt = 0x10;
inline constexpr std::uint32_t kRdErrThreshold = 0x14;
inline constexpr std::uint32_t kWrErrThreshold = 0x18;
inline constexpr std::uint32_t kCounterReset = 0x1C;
inline constexpr std::uint32_t kRdBytesLo = 0x20;
inline constexpr std::uint32_t kWrBytesLo = 0x28;
inline constexpr std::uint32_t kRdBitErrorsLo = 0x30;
inline constexpr std::uint32_t kWrBitErrorsLo = 0x38;
inline constexpr std::uint32_t kGlobalBase = 0xF000;
inline constexpr std::uint32_t kVersion = kGlobalBase + 0x0;
inline constexpr std::uint32_t kBankCount = kGlobalBase + 0x4;
inline constexpr std::uint32_t kVersionValue = 0x00010000;
}  // namespace csr_reg

class CsrError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// round(pct / 100 * 2^32), clamped to [0, 2^32 - 1]. Throws CsrError outside [0, 100].
std::uint32_t percent_to_threshold(double pct);

class Csr {
 public:
  Csr(Scheduler& sched, AxiFabric& fabric, std::vector<RateController*> banks);

  std::size_t bank_count() const { return banks_.size(); }

  void set_boundary(std::size_t bank, std::uint64_t boundary_bytes);
  void set_latency(std::size_t bank, std::uint32_t rd_100ns, std::uint32_t wr_100ns);
  void set_throughput(std::size_t bank, std::uint32_t rd_10mbps, std::uint32_t wr_10mbps);
  void set_error_rate(std::size_t bank, double rd_percent, double wr_percent);
  void set_error_threshold(std::size_t bank, std::uint32_t rd, std::uint32_t wr);

  Counters get_counters(std::size_t bank) const;
  void reset_counters(std::size_t bank);
  const RegionConfig& region_config(std::size_t bank) const { return rc(bank).config(); }

  /// Runs `op` against this CSR at simulated time `t`.
  void schedule(SimTime t, std::function<void(Csr&)> op);

  std::uint32_t read32(std::uint32_t offset) const;
  void write32(std::uint32_t offset, std::uint32_t value);

 private:
  RateController& rc(std::size_t bank);
  const RateController& rc(std::size_t bank) const;

  Scheduler& sched_;
  AxiFabric& fabric_;
  std::vector<RateController*> banks_;
};

/// Configuration API using the emulator library's function names. A memory
/// region is called a bank here.
class MeApi {
 public:
  explicit MeApi(Csr& csr) : csr_(csr) {}

  void SetBoundary(unsigned bank, std::uint64_t boundary) { csr_.set_boundary(bank, boundary); }
  void SetLatency(unsigned bank, unsigned rd_latency_100ns, unsigned wr_latency_100ns) {
    csr_.set_latency(bank, rd_latency_100ns, wr_latency_100ns);
  }
  void SetThroughput(unsigned bank, unsigned rd_thpt_10mbps, unsigned wr_thpt_10mbps) {
    csr_.set_throughput(bank, rd_thpt_10mbps, wr_thpt_10mbps);
  }
  void SetErrorRate(unsigned bank, double rd_error_rate_in_percentage, double wr_error_rate_in_percentage) {
    csr_.set_error_rate(bank, rd_error_rate_in_percentage, wr_error_rate_in_percentage);
  }
  /// Raw 1/2^32-granular form of SetErrorRate.
  void SetErrorThreshold(unsigned bank, std::uint32_t rd_threshold, std::uint32_t wr_threshold) {
    csr_.set_error_threshold(bank, rd_threshold, wr_threshold);
  }

  void GetXferredRdDataAmt(unsigned bank, unsigned long* data) const { *data = csr_.get_counters(bank).rd_bytes; }
  void GetXferredWrDataAmt(unsigned bank, unsigned long* data) const { *data = csr_.get_counters(bank).wr_bytes; }
  void GetRdBitErrors(unsigned bank, unsigned long* data) const { *data = csr_.get_counters(bank).rd_bit_errors; }
  void GetWrBitErrors(unsigned bank, unsigned long* data) const { *data = csr_.get_counters(bank).wr_bit_errors; }

 private:
  Csr& csr_;
};

}  // namespace memsim
