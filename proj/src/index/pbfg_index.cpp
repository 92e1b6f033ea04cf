// Copyright 2026 The sgcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.


#include "sgc/index/pbfg_index.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "sgc/core/error.hpp"

namespace sgc::index {

PbfgIndex::PbfgIndex(flash::ZonedDevice& device, std::uint32_t first_zone,
                     std::uint32_t zone_count, PbfgConfig config)
    : device_(device),
      first_zone_(first_zone),
      zones_per_group_(zones_per_group(config.sets_per_sg, device.geometry().pages_per_zone)),
      config_(config) {
  if (config_.sets_per_sg == 0 || config_.sgs_per_group == 0 || config_.shape.bits == 0) {
    throw ConfigError("index: sets_per_sg, group size and filter size must be positive");
  }
  const std::uint64_t packed = std::uint64_t{config_.sgs_per_group} * config_.shape.bytes();
  if (packed > device.geometry().page_size) {
    throw ConfigError("nemo.sgs_per_index_group: " + std::to_string(config_.sgs_per_group) +
                      " filters of " + std::to_string(config_.shape.bytes()) +
                      " bytes do not fit one page");
  }
  if (std::uint64_t{first_zone} + zone_count > device.geometry().zone_count) {
    throw ConfigError("index: zone range exceeds device");
  }
  for (std::uint32_t s = 0; s + 1 <= zone_count / zones_per_group_; ++s) free_slots_.push_back(s);
  page_buf_.resize(device.geometry().page_size);
}

void PbfgIndex::open_sg(std::uint64_t seq) {
  if (seq < states_.size()) throw std::logic_error("index: sequence opened twice");
  states_.resize(seq + 1, SgState::kNone);
  states_[seq] = SgState::kOpen;
  const std::uint64_t g = group_of(seq);
  auto [it, inserted] = open_.try_emplace(g);
  if (inserted) {
    it->second.filters.assign(std::size_t{config_.sets_per_sg} * config_.sgs_per_group *
                                  config_.shape.bytes(),
                              std::byte{0});
  }
}

void PbfgIndex::record_object(std::uint64_t seq, std::uint32_t offset, const KeyDigest& digest) {
  if (state(seq) != SgState::kOpen) {
    throw ImmutableFilter("filters of SG " + std::to_string(seq) + " are not writable");
  }
  OpenGroup& og = open_.at(group_of(seq));
  const auto member = static_cast<std::uint32_t>(seq % config_.sgs_per_group);
  bloom_add(std::span(og.filters).subspan(filter_offset(offset, member), config_.shape.bytes()),
            config_.shape, digest);
}

std::uint32_t PbfgIndex::seal_sg(std::uint64_t seq) {
  if (state(seq) != SgState::kOpen) throw std::logic_error("index: sealing a non-open SG");
  states_[seq] = SgState::kLive;
  const std::uint64_t g = group_of(seq);
  auto it = open_.find(g);
  if (++it->second.sealed < config_.sgs_per_group) return 0;
  flush_group(g, it->second);
  open_.erase(it);
  return config_.sets_per_sg;
}

flash::FlashAddress PbfgIndex::page_address(std::uint32_t slot, std::uint32_t offset) const {
  const std::uint32_t ppz = device_.geometry().pages_per_zone;
  return {first_zone_ + slot * zones_per_group_ + offset / ppz, offset % ppz};
}

void PbfgIndex::flush_group(std::uint64_t group, OpenGroup& og) {
  if (free_slots_.empty()) throw PoolExhausted("index pool has no free group slot");
  const std::uint32_t slot = free_slots_.front();
  free_slots_.pop_front();
  const std::size_t packed = std::size_t{config_.sgs_per_group} * config_.shape.bytes();
  for (std::uint32_t j = 0; j < config_.sets_per_sg; ++j) {
    std::memcpy(page_buf_.data(), og.filters.data() + filter_offset(j, 0), packed);
    std::memset(page_buf_.data() + packed, 0, page_buf_.size() - packed);
    const flash::FlashAddress want = page_address(slot, j);
    const flash::FlashAddress got = device_.append(want.zone, page_buf_);
    if (!(got == want)) throw std::logic_error("index: page landed at an unexpected address");
    ++pages_written_;
  }
  FlashGroup fg;
  fg.slot = slot;
  for (std::uint32_t m = 0; m < config_.sgs_per_group; ++m) {
    if (state(group * config_.sgs_per_group + m) == SgState::kLive) ++fg.live;
  }
  flash_.emplace(group, fg);
  if (fg.live == 0) reclaim(group);
}

void PbfgIndex::reclaim(std::uint64_t group) {
  auto it = flash_.find(group);
  for (std::uint32_t z = 0; z < zones_per_group_; ++z) {
    device_.reset(first_zone_ + it->second.slot * zones_per_group_ + z);
  }
  for (std::uint32_t j = 0; j < config_.sets_per_sg; ++j) {
    auto c = cache_.find(page_key(group, j));
    if (c == cache_.end()) continue;
    fifo_.erase(c->second.fifo_pos);
    cache_.erase(c);
  }
  free_slots_.push_back(it->second.slot);
  flash_.erase(it);
}

void PbfgIndex::invalidate_sg(std::uint64_t seq) {
  if (state(seq) != SgState::kLive) return;
  states_[seq] = SgState::kDead;
  auto it = flash_.find(group_of(seq));
  if (it != flash_.end() && --it->second.live == 0) reclaim(it->first);
}

bool PbfgIndex::is_live(std::uint64_t seq) const { return state(seq) == SgState::kLive; }

bool PbfgIndex::page_resident(std::uint64_t seq, std::uint32_t offset) const {
  const std::uint64_t g = group_of(seq);
  return open_.count(g) != 0 || cache_.count(page_key(g, offset)) != 0;
}

void PbfgIndex::drop_cache() {
  fifo_.clear();
  cache_.clear();
}

std::vector<std::byte> PbfgIndex::read_page(std::uint64_t group, std::uint32_t offset) {
  const FlashGroup& fg = flash_.at(group);
  auto bytes = device_.read(page_address(fg.slot, offset));
  ++pages_read_;
  return {bytes.begin(), bytes.end()};
}

const std::vector<std::byte>& PbfgIndex::fetch(std::uint64_t group, std::uint32_t offset,
                                               std::vector<std::byte>& scratch, bool& was_read,
                                               bool admit) {
  const std::uint64_t key = page_key(group, offset);
  auto c = cache_.find(key);
  if (c != cache_.end()) {
    was_read = false;
    return c->second.bytes;
  }
  was_read = true;
  scratch = read_page(group, offset);
  scratch.resize(std::size_t{config_.sgs_per_group} * config_.shape.bytes());
  if (!admit || config_.cache_capacity_pages == 0) return scratch;
  if (cache_.size() >= config_.cache_capacity_pages) {
    cache_.erase(fifo_.front());
    fifo_.pop_front();
  }
  fifo_.push_back(key);
  CachedPage& page = cache_[key];
  page.fifo_pos = std::prev(fifo_.end());
  page.bytes = std::move(scratch);
  return page.bytes;
}

void PbfgIndex::probe_members(std::uint64_t group, std::span<const std::byte> filters,
                              const KeyDigest& digest, std::uint64_t min_seq,
                              std::vector<std::uint64_t>& out) const {
  const std::uint32_t fb = config_.shape.bytes();
  for (std::uint32_t m = config_.sgs_per_group; m-- > 0;) {
    const std::uint64_t seq = group * config_.sgs_per_group + m;
    if (seq < min_seq) break;
    if (state(seq) != SgState::kLive) continue;
    if (bloom_may_contain(filters.subspan(std::size_t{m} * fb, fb), config_.shape, digest)) {
      out.push_back(seq);
    }
  }
}

CandidateQuery PbfgIndex::query_candidates(const KeyDigest& digest) {
  return query(digest, 0, true);
}

CandidateQuery PbfgIndex::query_newer(const KeyDigest& digest, std::uint64_t seq) {
  return query(digest, seq + 1, false);
}

CandidateQuery PbfgIndex::query(const KeyDigest& digest, std::uint64_t min_seq, bool admit) {
  CandidateQuery q;
  const std::uint32_t offset = digest.intra_sg_offset;
  const std::size_t packed = std::size_t{config_.sgs_per_group} * config_.shape.bytes();
  for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
    if (it->second.sealed == 0) continue;
    probe_members(it->first, std::span(it->second.filters).subspan(filter_offset(offset, 0), packed),
                  digest, min_seq, q.candidates);
  }
  std::vector<std::byte> scratch;
  for (auto it = flash_.rbegin(); it != flash_.rend(); ++it) {
    if ((it->first + 1) * config_.sgs_per_group <= min_seq) break;
    bool was_read = false;
    const auto& page = fetch(it->first, offset, scratch, was_read, admit);
    if (was_read) ++q.index_pages_read;
    probe_members(it->first, page, digest, min_seq, q.candidates);
  }
  return q;
}

}  // namespace sgc::index
