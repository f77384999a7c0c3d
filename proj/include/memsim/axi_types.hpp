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

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "memsim/sim_core.hpp"

namespace memsim {

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * kKiB;
inline constexpr std::uint64_t kGiB = 1024 * kMiB;

inline constexpr std::size_t kMaxBeatBytes = 64;
inline constexpr std::uint16_t kDefaultBeatBytes = 16;
inline constexpr std::uint16_t kMaxBurstLen = 256;

struct TransactionId {
  std::uint32_t value{0};
  constexpr auto operator<=>(const TransactionId&) const = default;
};

using MasterId = std::uint16_t;

/// Address phase of an AR or AW transfer.
struct BurstRequest {
  std::uint64_t address{0};
  std::uint16_t burst_len{1};
  std::uint16_t beat_bytes{kDefaultBeatBytes};
  bool is_write{false};
  TransactionId txid{};
  SimTime issue_time{};
  MasterId master{0};

  std::uint64_t total_bytes() const { return std::uint64_t{burst_len} * beat_bytes; }
};

/// One data-bus transfer. `strobe` is the per-byte write enable (bit i covers
/// byte i) and is ignored on reads.
struct Beat {
  std::array<std::uint8_t, kMaxBeatBytes> data{};
  std::uint8_t size{0};
  bool last{false};
  TransactionId txid{};
  std::uint64_t strobe{~std::uint64_t{0}};
  SimTime time{};  // arrival at the current hop

  std::span<std::uint8_t> payload() { return {data.data(), size}; }
  std::span<const std::uint8_t> payload() const { return {data.data(), size}; }
  bool byte_enabled(std::size_t i) const { return (strobe >> i) & 1u; }
};

struct WriteResponse {
  TransactionId txid{};
  bool ok{true};
  MasterId master{0};
  constexpr bool operator==(const WriteResponse&) const = default;
};

/// Signaled to a master when an address falls outside every mapped region.
class BusError : public std::runtime_error {
 public:
  BusError(const std::string& what, std::uint64_t address);
  std::uint64_t address() const { return address_; }

 private:
  std::uint64_t address_;
};

/// Model-bug signal: the AXI protocol was violated inside the simulator.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Fills `burst_len` zeroed beats of `beat_bytes`, with the last flag on the final one.
std::vector<Beat> make_beats(const BurstRequest& req);

/// Splits `bytes` into beats for `req`; bytes.size() must equal req.total_bytes().
std::vector<Beat> make_beats(const BurstRequest& req, std::span<const std::uint8_t> bytes);

void validate_request(const BurstRequest& req);

}  // namespace memsim
