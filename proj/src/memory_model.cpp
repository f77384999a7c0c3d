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

#include "memsim/memory_model.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

namespace memsim {

BackingStore::BackingStore(std::uint64_t size_bytes) : size_(size_bytes) {}

void BackingStore::check_range(std::uint64_t offset, std::uint64_t len) const {
  if (!contains(offset, len)) {
    throw BusError("store access out of range", offset);
  }
}

const BackingStore::Page* BackingStore::find_page(std::uint64_t page_index) const {
  auto it = pages_.find(page_index);
  return it == pages_.end() ? nullptr : it->second.get();
}

BackingStore::Page& BackingStore::page_for_write(std::uint64_t page_index) {
  auto& slot = pages_[page_index];
  if (!slot) slot = std::make_unique<Page>(Page{});
  return *slot;
}

void BackingStore::read(std::uint64_t offset, std::span<std::uint8_t> out) const {
  check_range(offset, out.size());
  std::size_t done = 0;
  while (done < out.size()) {
    const std::uint64_t addr = offset + done;
    const std::size_t in_page = addr % kPageBytes;
    const std::size_t chunk = std::min(out.size() - done, kPageBytes - in_page);
    if (const Page* p = find_page(addr / kPageBytes)) {
      std::memcpy(out.data() + done, p->data() + in_page, chunk);
    } else {
      std::memset(out.data() + done, 0, chunk);
    }
    done += chunk;
  }
}

void BackingStore::write(std::uint64_t offset, std::span<const std::uint8_t> in) {
  check_range(offset, in.size());
  std::size_t done = 0;
  while (done < in.size()) {
    const std::uint64_t addr = offset + done;
    const std::size_t in_page = addr % kPageBytes;
    const std::size_t chunk = std::min(in.size() - done, kPageBytes - in_page);
    std::memcpy(page_for_write(addr / kPageBytes).data() + in_page, in.data() + done, chunk);
    done += chunk;
  }
}

void BackingStore::write_masked(std::uint64_t offset, std::span<const std::uint8_t> in, std::uint64_t strobe) {
  if (in.size() > 64) throw std::invalid_argument("masked write wider than 64 bytes");
  check_range(offset, in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if ((strobe >> i) & 1u) {
      const std::uint64_t addr = offset + i;
      page_for_write(addr / kPageBytes)[addr % kPageBytes] = in[i];
    }
  }
}

std::uint64_t BackingStore::read_u64(std::uint64_t offset) const {
  std::array<std::uint8_t, 8> buf{};
  read(offset, buf);
  std::uint64_t v = 0;
  std::memcpy(&v, buf.data(), 8);
  return v;
}

void BackingStore::write_u64(std::uint64_t offset, std::uint64_t value) {
  std::array<std::uint8_t, 8> buf{};
  std::memcpy(buf.data(), &value, 8);
  write(offset, buf);
}

void BackingStore::dump_image(std::ostream& os, std::uint64_t offset, std::uint64_t len) const {
  check_range(offset, len);
  std::vector<std::uint8_t> buf(kPageBytes);
  for (std::uint64_t done = 0; done < len;) {
    const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(len - done, kPageBytes));
    read(offset + done, std::span(buf.data(), chunk));
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(chunk));
    done += chunk;
  }
}

std::uint64_t BackingStore::load_image(std::istream& is, std::uint64_t offset) {
  std::vector<std::uint8_t> buf(kPageBytes);
  std::uint64_t loaded = 0;
  while (is) {
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(is.gcount());
    if (got == 0) break;
    write(offset + loaded, std::span(buf.data(), got));
    loaded += got;
  }
  return loaded;
}

MemoryController::MemoryController(Scheduler& sched, BackingStore& store, MemTiming timing)
    : sched_(sched), store_(store), timing_(timing) {}

std::uint64_t MemoryController::beat_interval_ps(std::uint16_t beat_bytes) const {
  if (timing_.ceiling_bytes_per_sec == 0) return 0;
  return std::uint64_t{beat_bytes} * 1'000'000'000'000ull / timing_.ceiling_bytes_per_sec;
}

// Claims the pipeline for the burst; returns its start time in picoseconds.
std::uint64_t MemoryController::reserve(Pipeline& p, const BurstRequest& req) {
  const std::uint64_t now_ps = sched_.now().ns * 1000;
  const std::uint64_t start = std::max(now_ps, p.free_ps);
  p.free_ps = start + beat_interval_ps(req.beat_bytes) * req.burst_len;
  return start;
}

namespace {
std::uint64_t ps_to_ns_ceil(std::uint64_t ps) { return (ps + 999) / 1000; }
}  // namespace

void MemoryController::read_burst(const BurstRequest& req, ReadDone done) {
  validate_request(req);
  if (!store_.contains(req.address, req.total_bytes())) throw BusError("read outside backing store", req.address);
  ++read_bursts_;
  const std::uint64_t start_ps = reserve(read_pipe_, req);
  const std::uint64_t first_ps = start_ps + timing_.read_service_ns * 1000;
  const std::uint64_t step_ps = beat_interval_ps(req.beat_bytes);
  const SimTime first{ps_to_ns_ceil(first_ps)};
  sched_.schedule(first, [this, req, first_ps, step_ps, done = std::move(done)] {
    auto beats = make_beats(req);
    for (std::size_t i = 0; i < beats.size(); ++i) {
      store_.read(req.address + i * req.beat_bytes, beats[i].payload());
      beats[i].time = SimTime{ps_to_ns_ceil(first_ps + i * step_ps)};
    }
    done(std::move(beats));
  }, 10);
}

void MemoryController::write_burst(const BurstRequest& req, std::vector<Beat> beats, WriteDone done) {
  validate_request(req);
  if (beats.size() != req.burst_len) throw ProtocolError("write beat count does not match burst_len");
  if (!store_.contains(req.address, req.total_bytes())) throw BusError("write outside backing store", req.address);
  ++write_bursts_;
  reserve(write_pipe_, req);
  const std::uint64_t commit_ps = write_pipe_.free_ps + timing_.write_service_ns * 1000;
  sched_.schedule(SimTime{ps_to_ns_ceil(commit_ps)}, [this, req, beats = std::move(beats), done = std::move(done)] {
    for (std::size_t i = 0; i < beats.size(); ++i) {
      store_.write_masked(req.address + i * req.beat_bytes, beats[i].payload(), beats[i].strobe);
    }
    done(WriteResponse{req.txid, true, req.master});
  }, 11);
}

}  // namespace memsim
