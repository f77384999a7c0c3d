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

#include "memsim/axi_types.hpp"

#include <charconv>

#include <algorithm>

namespace memsim {

namespace {
std::string with_address(const std::string& what, std::uint64_t address) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, address, 16);
  (void)ec;
  return what + " at 0x" + std::string(buf, end);
}
}  // namespace

BusError::BusError(const std::string& what, std::uint64_t address)
    : std::runtime_error(with_address(what, address)), address_(address) {}

void validate_request(const BurstRequest& req) {
  if (req.burst_len < 1 || req.burst_len > kMaxBurstLen) {
    throw ProtocolError("burst_len out of range: " + std::to_string(req.burst_len));
  }
  if (req.beat_bytes == 0 || req.beat_bytes > kMaxBeatBytes || (req.beat_bytes & (req.beat_bytes - 1)) != 0) {
    throw ProtocolError("beat_bytes must be a power of two <= 64");
  }
  if (req.address % req.beat_bytes != 0) {
    throw ProtocolError("burst address not aligned to beat size");
  }
}

std::vector<Beat> make_beats(const BurstRequest& req) {
  std::vector<Beat> beats(req.burst_len);
  for (std::size_t i = 0; i < beats.size(); ++i) {
    beats[i].size = static_cast<std::uint8_t>(req.beat_bytes);
    beats[i].txid = req.txid;
    beats[i].last = (i + 1 == beats.size());
  }
  return beats;
}

std::vector<Beat> make_beats(const BurstRequest& req, std::span<const std::uint8_t> bytes) {
  if (bytes.size() != req.total_bytes()) throw ProtocolError("payload size does not match burst");
  auto beats = make_beats(req);
  for (std::size_t i = 0; i < beats.size(); ++i) {
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(i * req.beat_bytes), req.beat_bytes, beats[i].data.begin());
  }
  return beats;
}

}  // namespace memsim
