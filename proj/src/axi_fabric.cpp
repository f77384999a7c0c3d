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

#include "memsim/axi_fabric.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace memsim {

AxiFabric::AxiFabric(Scheduler& sched, FabricTiming timing, std::uint64_t span_bytes)
    : sched_(sched), timing_(timing), span_(span_bytes) {}

void AxiFabric::attach_region(RateController& rc) {
  const std::uint64_t b = rc.config().boundary;
  if (b >= span_) throw std::invalid_argument("region boundary outside the emulator span");
  if (!regions_.empty() && b <= regions_.back()->config().boundary) {
    throw std::invalid_argument("region boundaries must be strictly increasing");
  }
  const std::size_t index = regions_.size();
  regions_.push_back(&rc);
  stats_.emplace_back();
  rc.set_read_sink([this, index](std::vector<Beat> beats) { on_read_released(index, std::move(beats)); });
  rc.set_write_sink([this, index](WriteResponse resp) { on_write_response(index, resp); });
}

std::pair<std::uint64_t, std::uint64_t> AxiFabric::region_extent(std::size_t i) const {
  const std::uint64_t start = regions_.at(i)->config().boundary;
  const std::uint64_t end = i + 1 < regions_.size() ? regions_[i + 1]->config().boundary : span_;
  return {start, end};
}

std::size_t AxiFabric::route(std::uint64_t address) const {
  if (regions_.empty()) throw BusError("no memory region configured", address);
  if (address >= span_) throw BusError("address outside the emulator span", address);
  // Last region whose boundary is <= address.
  auto it = std::upper_bound(regions_.begin(), regions_.end(), address,
                             [](std::uint64_t a, const RateController* rc) { return a < rc->config().boundary; });
  if (it == regions_.begin()) throw BusError("address below the first region", address);
  return static_cast<std::size_t>(std::distance(regions_.begin(), it) - 1);
}

void AxiFabric::check_route(const BurstRequest& req) const {
  validate_request(req);
  const std::size_t first = route(req.address);
  const std::size_t last = route(req.address + req.total_bytes() - 1);
  if (first != last) throw ProtocolError("burst crosses a region boundary");
}

AxiFabric::Handle AxiFabric::issue_read(BurstRequest req, ReadCallback cb) {
  if (req.is_write) throw ProtocolError("issue_read called with a write request");
  check_route(req);
  req.issue_time = sched_.now();
  Entry e;
  e.req = req;
  e.read_cb = std::move(cb);
  return enqueue(std::move(e));
}

AxiFabric::Handle AxiFabric::issue_write(BurstRequest req, std::vector<Beat> beats, WriteCallback cb) {
  if (!req.is_write) throw ProtocolError("issue_write called with a read request");
  if (beats.size() != req.burst_len) {
    throw ProtocolError("write carries " + std::to_string(beats.size()) + " beats for burst_len " +
                        std::to_string(req.burst_len));
  }
  check_route(req);
  for (std::size_t i = 0; i < beats.size(); ++i) {
    if (beats[i].size != req.beat_bytes) throw ProtocolError("write beat width does not match request");
    if (beats[i].last != (i + 1 == beats.size())) throw ProtocolError("last flag must mark only the final beat");
    beats[i].txid = req.txid;
  }
  req.issue_time = sched_.now();
  Entry e;
  e.req = req;
  e.beats = std::move(beats);
  e.write_cb = std::move(cb);
  return enqueue(std::move(e));
}

AxiFabric::Handle AxiFabric::enqueue(Entry e) {
  const Handle h = next_handle_++;
  e.handle = h;
  const StreamKey key{e.req.master, e.req.is_write, e.req.txid.value};
  if (e.req.is_write) writes_by_master_[e.req.master].push_back(h);
  entries_.emplace(h, std::move(e));
  streams_[key].push_back(h);
  try_launch(key);
  return h;
}

bool AxiFabric::read_blocked_by_write(const Entry& e) const {
  auto it = writes_by_master_.find(e.req.master);
  if (it == writes_by_master_.end()) return false;
  const std::uint64_t lo = e.req.address;
  const std::uint64_t hi = lo + e.req.total_bytes();
  for (Handle wh : it->second) {
    if (wh > e.handle) break;
    const Entry& w = entries_.at(wh);
    const std::uint64_t wlo = w.req.address;
    const std::uint64_t whi = wlo + w.req.total_bytes();
    if (wlo < hi && lo < whi) return true;
  }
  return false;
}

void AxiFabric::try_launch(const StreamKey& key) {
  if (pending_boundary_) return;
  auto sit = streams_.find(key);
  if (sit == streams_.end()) return;
  std::optional<std::size_t> launched_region;
  for (Handle h : sit->second) {
    Entry& e = entries_.at(h);
    if (e.launched) {
      launched_region = e.region;
      continue;
    }
    const std::size_t region = route(e.req.address);
    if (launched_region && *launched_region != region) return;
    if (!e.req.is_write && read_blocked_by_write(e)) return;
    e.region = region;
    launch(e);
    launched_region = region;
  }
}

void AxiFabric::try_launch_master(MasterId master) {
  for (auto it = streams_.lower_bound(StreamKey{master, false, 0});
       it != streams_.end() && it->first.master == master; ++it) {
    try_launch(it->first);
  }
}

void AxiFabric::try_launch_all() {
  for (auto& [key, q] : streams_) try_launch(key);
}

void AxiFabric::launch(Entry& e) {
  e.launched = true;
  ++in_flight_;
  std::uint64_t& port_free = e.req.is_write ? write_port_free_ : read_port_free_;
  const std::uint64_t interval = e.req.is_write ? timing_.write_issue_interval_ns : timing_.read_issue_interval_ns;
  const std::uint64_t accept = std::max(sched_.now().ns, port_free);
  port_free = accept + interval;

  BurstRequest slave_req = e.req;
  slave_req.txid = TransactionId{slave_id(e.req)};
  in_flight_by_id_[InFlightKey{e.region, e.req.is_write, slave_req.txid.value}].push_back(e.handle);

  RateController* rc = regions_[e.region];
  const SimTime arrive{accept + timing_.request_ns};
  if (e.req.is_write) {
    std::vector<Beat> beats = e.beats;
    for (auto& b : beats) b.txid = slave_req.txid;
    sched_.schedule(arrive, [rc, slave_req, beats = std::move(beats)]() mutable { rc->on_aw_w(slave_req, std::move(beats)); }, 30);
  } else {
    sched_.schedule(arrive, [rc, slave_req] { rc->on_ar(slave_req); }, 31);
  }
}

void AxiFabric::on_read_released(std::size_t region, std::vector<Beat> beats) {
  auto it = in_flight_by_id_.find(InFlightKey{region, false, beats.front().txid.value});
  if (it == in_flight_by_id_.end() || it->second.empty()) throw ProtocolError("read data for an unknown transaction");
  const Handle h = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) in_flight_by_id_.erase(it);

  auto& st = stats_[region];
  ++st.read_bursts;
  st.read_beats += beats.size();
  for (const auto& b : beats) st.read_bytes += b.size;

  sched_.schedule_in(timing_.response_ns, [this, h, beats = std::move(beats)]() mutable {
    auto node = entries_.extract(h);
    Entry& e = node.mapped();
    for (auto& b : beats) b.txid = e.req.txid;
    ReadCompletion done{h, e.req, std::move(beats), sched_.now()};
    ReadCallback cb = std::move(e.read_cb);
    retire(e);
    if (cb) cb(done);
  }, 32);
}

void AxiFabric::on_write_response(std::size_t region, WriteResponse resp) {
  auto it = in_flight_by_id_.find(InFlightKey{region, true, resp.txid.value});
  if (it == in_flight_by_id_.end() || it->second.empty()) throw ProtocolError("write response for an unknown transaction");
  const Handle h = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) in_flight_by_id_.erase(it);

  auto& st = stats_[region];
  {
    const Entry& e = entries_.at(h);
    ++st.write_bursts;
    st.write_beats += e.beats.size();
    for (const auto& b : e.beats) st.write_bytes += b.size;
  }

  sched_.schedule_in(timing_.response_ns, [this, h, resp] {
    auto node = entries_.extract(h);
    Entry& e = node.mapped();
    WriteCompletion done{h, e.req, WriteResponse{e.req.txid, resp.ok, e.req.master}, sched_.now()};
    WriteCallback cb = std::move(e.write_cb);
    retire(e);
    if (cb) cb(done);
  }, 33);
}

void AxiFabric::retire(const Entry& e) {
  const StreamKey key{e.req.master, e.req.is_write, e.req.txid.value};
  auto sit = streams_.find(key);
  auto& q = sit->second;
  q.erase(std::find(q.begin(), q.end(), e.handle));
  if (q.empty()) streams_.erase(sit);
  if (e.req.is_write) {
    auto& w = writes_by_master_[e.req.master];
    w.erase(std::find(w.begin(), w.end(), e.handle));
    if (w.empty()) writes_by_master_.erase(e.req.master);
  }
  --in_flight_;
  if (pending_boundary_ && in_flight_ == 0) {
    apply_pending_boundary();
    try_launch_all();
    return;
  }
  try_launch_master(e.req.master);
}

void AxiFabric::validate_boundary(std::size_t bank, std::uint64_t boundary) const {
  if (bank >= regions_.size()) throw std::invalid_argument("bank index out of range");
  if (boundary % kBoundaryAlign != 0) throw std::invalid_argument("boundary must be 1 MB aligned");
  if (boundary >= span_) throw std::invalid_argument("boundary outside the emulator span");
  if (bank > 0 && boundary <= regions_[bank - 1]->config().boundary) {
    throw std::invalid_argument("boundary must exceed the previous bank's boundary");
  }
  if (bank + 1 < regions_.size() && boundary >= regions_[bank + 1]->config().boundary) {
    throw std::invalid_argument("boundary must precede the next bank's boundary");
  }
}

void AxiFabric::set_boundary(std::size_t bank, std::uint64_t boundary) {
  validate_boundary(bank, boundary);
  if (pending_boundary_) throw std::logic_error("a boundary change is already pending");
  pending_boundary_ = {bank, boundary};
  if (in_flight_ == 0) {
    apply_pending_boundary();
    try_launch_all();
  }
}

void AxiFabric::apply_pending_boundary() {
  const auto [bank, boundary] = *pending_boundary_;
  pending_boundary_.reset();
  regions_[bank]->set_boundary(boundary);
}

}  // namespace memsim
