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


#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <list>
#include <map>
#include <unordered_map>
#include <vector>

#include "sgc/core/types.hpp"
#include "sgc/flash/device.hpp"
#include "sgc/index/bloom.hpp"

namespace sgc::index {

struct PbfgConfig {
  std::uint32_t sets_per_sg = 4096;
  std::uint32_t sgs_per_group = 50;
  FilterShape shape;
  std::uint64_t cache_capacity_pages = 0;
};

struct CandidateQuery {
  std::vector<std::uint64_t> candidates;  // sg sequences, newest first
  std::uint32_t index_pages_read = 0;
};

// Set-level filters for every SG, packed by offset into one page per
// (index group, offset). Groups of G consecutive SG sequences are buffered in
// memory until every member is flushed, then written to a dedicated range of
// zones. A FIFO cache holds recently read pages.
class PbfgIndex {
 public:
  // Zones [first_zone, first_zone + zone_count) hold the index pool.
  PbfgIndex(flash::ZonedDevice& device, std::uint32_t first_zone, std::uint32_t zone_count,
            PbfgConfig config);

  static std::uint32_t zones_per_group(std::uint32_t sets_per_sg, std::uint32_t pages_per_zone) {
    return (sets_per_sg + pages_per_zone - 1) / pages_per_zone;
  }

  const PbfgConfig& config() const { return config_; }
  std::uint64_t group_of(std::uint64_t seq) const { return seq / config_.sgs_per_group; }

  // Starts collecting filters for a new in-memory SG. Sequences must be
  // opened in increasing order.
  void open_sg(std::uint64_t seq);

  // Throws ImmutableFilter when `seq` is not an open SG.
  void record_object(std::uint64_t seq, std::uint32_t offset, const KeyDigest& digest);

  // Marks `seq` as flushed. When it completes its group, the group's pages are
  // written to the pool; returns the number of index pages written.
  std::uint32_t seal_sg(std::uint64_t seq);

  // Flushed, live SGs whose filter at the key's offset may contain it.
  CandidateQuery query_candidates(const KeyDigest& digest);

  // Candidates strictly newer than `seq`. Pages read here are not admitted to
  // the cache.
  CandidateQuery query_newer(const KeyDigest& digest, std::uint64_t seq);

  void invalidate_sg(std::uint64_t seq);
  bool is_live(std::uint64_t seq) const;

  // True when the PBFG page covering (seq's group, offset) is in memory,
  // either cached or still in the group buffer.
  bool page_resident(std::uint64_t seq, std::uint32_t offset) const;

  void drop_cache();

  // Reads and returns the raw page (counted as an index read).
  std::vector<std::byte> read_page(std::uint64_t group, std::uint32_t offset);

  std::uint64_t index_pages_written() const { return pages_written_; }
  std::uint64_t index_pages_read() const { return pages_read_; }
  std::uint64_t resident_pages() const { return cache_.size(); }
  std::uint64_t cached_filter_bits() const {
    return cache_.size() * config_.sgs_per_group * config_.shape.bits;
  }
  std::size_t groups_on_flash() const { return flash_.size(); }
  std::size_t open_groups() const { return open_.size(); }

 private:
  enum class SgState : std::uint8_t { kNone, kOpen, kLive, kDead };

  struct OpenGroup {
    std::vector<std::byte> filters;  // [offset][member][filter bytes]
    std::uint32_t sealed = 0;
  };
  struct FlashGroup {
    std::uint32_t slot = 0;
    std::uint32_t live = 0;
  };
  struct CachedPage {
    std::list<std::uint64_t>::iterator fifo_pos;
    std::vector<std::byte> bytes;
  };

  SgState state(std::uint64_t seq) const {
    return seq < states_.size() ? states_[seq] : SgState::kNone;
  }
  std::uint64_t page_key(std::uint64_t group, std::uint32_t offset) const {
    return group * config_.sets_per_sg + offset;
  }
  std::size_t filter_offset(std::uint32_t offset, std::uint32_t member) const {
    return (std::size_t{offset} * config_.sgs_per_group + member) * config_.shape.bytes();
  }
  void flush_group(std::uint64_t group, OpenGroup& og);
  void reclaim(std::uint64_t group);
  flash::FlashAddress page_address(std::uint32_t slot, std::uint32_t offset) const;
  const std::vector<std::byte>& fetch(std::uint64_t group, std::uint32_t offset,
                                      std::vector<std::byte>& scratch, bool& was_read,
                                      bool admit);
  void probe_members(std::uint64_t group, std::span<const std::byte> filters,
                     const KeyDigest& digest, std::uint64_t min_seq,
                     std::vector<std::uint64_t>& out) const;
  CandidateQuery query(const KeyDigest& digest, std::uint64_t min_seq, bool admit);

  flash::ZonedDevice& device_;
  std::uint32_t first_zone_;
  std::uint32_t zones_per_group_;
  PbfgConfig config_;
  std::vector<SgState> states_;
  std::map<std::uint64_t, OpenGroup> open_;
  std::map<std::uint64_t, FlashGroup> flash_;
  std::deque<std::uint32_t> free_slots_;
  std::list<std::uint64_t> fifo_;
  std::unordered_map<std::uint64_t, CachedPage> cache_;
  std::uint64_t pages_written_ = 0;
  std::uint64_t pages_read_ = 0;
  std::vector<std::byte> page_buf_;
};

}  // namespace sgc::index
