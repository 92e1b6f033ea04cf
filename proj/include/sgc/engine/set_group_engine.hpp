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

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgc/core/set_page.hpp"
#include "sgc/core/types.hpp"
#include "sgc/engine/cache_engine.hpp"
#include "sgc/engine/hotness.hpp"
#include "sgc/flash/device.hpp"
#include "sgc/index/pbfg_index.hpp"

namespace sgc {

struct InsertResult {
  bool replaced = false;
  std::uint32_t early_evicted = 0;
};

struct LookupResult {
  std::optional<std::string> value;
  bool from_memory = false;
  std::uint32_t index_pages_read = 0;
  std::uint32_t candidate_sets_read = 0;
  std::uint32_t false_positive_reads = 0;
};

struct EvictionResult {
  std::uint64_t sg_sequence = 0;
  std::uint32_t writeback_count = 0;
  std::uint32_t dropped_count = 0;
};

struct SetGroupStats {
  std::uint64_t inserts = 0;
  std::uint64_t replaced = 0;
  std::uint64_t early_evicted_objects = 0;
  std::uint64_t early_evicted_bytes = 0;
  std::uint64_t logical_new_bytes = 0;
  std::uint64_t sg_flushes = 0;
  std::uint64_t sg_evictions = 0;
  std::uint64_t sg_data_bytes_written = 0;
  std::uint64_t index_bytes_written = 0;
  std::uint64_t flushed_object_bytes = 0;
  std::uint64_t flushed_writeback_bytes = 0;
  double fill_sum = 0;
  std::uint64_t writeback_objects = 0;
  std::uint64_t writeback_dropped = 0;  // hot, but no room in the target set
  std::uint64_t writeback_stale = 0;    // hot, but a newer copy exists
  std::uint64_t evicted_cold = 0;
  std::uint64_t writeback_check_reads = 0;
  std::uint64_t lookups = 0;
  std::uint64_t hits = 0;
  std::uint64_t memory_hits = 0;
  std::uint64_t index_pages_read = 0;
  std::uint64_t candidate_sets_read = 0;
  std::uint64_t false_positive_reads = 0;
  std::uint64_t lookups_touching_index_pool = 0;
  std::uint64_t cooling_events = 0;
  std::uint64_t hotness_bits_cleared = 0;
  std::uint64_t superseded_skips = 0;  // flash copies hidden by an early eviction
};

struct MemoryBreakdown {
  std::uint64_t live_objects = 0;
  double cached_filter_bits = 0;
  double hotness_bits = 0;
  double index_buffer_bits = 0;

  double per_object(double bits) const { return live_objects ? bits / live_objects : 0.0; }
  double total_per_object() const {
    return per_object(cached_filter_bits + hotness_bits + index_buffer_bits);
  }
};

// Set-group cache: objects are batched into in-memory set-groups (arrays of
// page-sized sets addressed by key hash), flushed whole to a FIFO pool of
// on-flash SGs, and located through per-set bloom filters.
class SetGroupEngine : public CacheEngine {
 public:
  // Zones used: sg_count_on_flash * zones_per_sg for data, then the index pool.
  static std::uint32_t zones_per_sg(const EngineConfig& c, std::uint32_t pages_per_zone);
  static std::uint32_t required_zones(const EngineConfig& c, std::uint32_t pages_per_zone);

  SetGroupEngine(flash::ZonedDevice& device, EngineConfig config);

  EngineKind kind() const override { return EngineKind::kSetGroup; }
  std::uint32_t page_size() const override { return config_.page_size; }

  InsertResult insert(std::string_view key, std::string_view value);
  LookupResult lookup(std::string_view key);

  void set(std::string_view key, std::string_view value) override { insert(key, value); }
  std::optional<std::string> get(std::string_view key) override { return lookup(key).value; }

  EngineCounters counters() const override;
  std::optional<double> bits_per_object() const override {
    return memory().total_per_object();
  }
  flash::IoCounters io() const override { return device_.counters(); }

  const EngineConfig& config() const { return config_; }
  const SetGroupStats& stats() const { return stats_; }
  MemoryBreakdown memory() const;

  // Flushes the front in-memory SG now; returns its sequence.
  std::uint64_t flush_front();

  std::size_t live_sgs() const { return pool_.size(); }
  std::size_t in_memory_sgs() const { return queue_.size(); }
  std::uint64_t front_sequence() const { return queue_.front().seq; }
  std::uint32_t front_hold_counter() const { return queue_.front().hold; }
  // Sequence of the in-memory SG holding `key`, if any.
  std::optional<std::uint64_t> in_memory_sequence(std::string_view key) const;
  const std::vector<std::uint64_t>& eviction_log() const { return evicted_; }
  const EvictionResult& last_eviction() const { return last_eviction_; }
  // Keys whose newest copy was evicted early while older copies remain on flash.
  std::size_t superseded_entries() const { return superseded_.size(); }

  index::PbfgIndex& pbfg() { return *index_; }
  HotnessTracker& hotness() { return *hotness_; }

 private:
  struct MemSg {
    std::uint64_t seq = 0;
    std::vector<SetPage> sets;
    std::uint64_t object_bytes = 0;
    std::uint64_t writeback_bytes = 0;
    std::uint64_t objects = 0;
    std::uint32_t hold = 0;
    bool flushing = false;
  };
  struct FlashSg {
    std::uint64_t seq = 0;
    std::uint32_t slot = 0;
    std::uint64_t objects = 0;
  };

  void push_new_sg();
  void place(MemSg& sg, const KeyDigest& d, ObjectRecord obj);
  void maybe_flush_front();
  void evict_oldest(MemSg& target);
  bool newer_copy_exists(const KeyDigest& d, std::string_view key, std::uint64_t seq);
  std::optional<std::string> find_in_flash_set(std::uint64_t seq, std::uint32_t offset,
                                               std::string_view key, std::uint32_t* slot);
  flash::FlashAddress set_address(std::uint32_t slot, std::uint32_t offset) const;
  const FlashSg* flash_sg(std::uint64_t seq) const;
  void note_superseded(std::uint64_t digest, std::uint64_t seq);
  bool superseded(std::uint64_t digest, std::uint64_t seq) const {
    auto it = superseded_.find(digest);
    return it != superseded_.end() && seq < it->second;
  }
  bool resident(std::uint64_t seq, std::uint32_t offset) const {
    return index_->page_resident(seq, offset);
  }
  std::uint64_t sg_capacity_bytes() const {
    return std::uint64_t{config_.sets_per_sg} * config_.page_size;
  }

  flash::ZonedDevice& device_;
  EngineConfig config_;
  std::uint32_t zones_per_sg_;
  std::unique_ptr<index::PbfgIndex> index_;
  std::unique_ptr<HotnessTracker> hotness_;
  CoolingClock cooling_;
  std::deque<MemSg> queue_;  // front = oldest
  std::deque<FlashSg> pool_;  // front = oldest
  std::uint64_t next_seq_ = 0;
  std::uint64_t flush_count_ = 0;
  std::uint64_t flash_objects_ = 0;
  std::vector<std::uint64_t> evicted_;
  // digest -> sequence of the SG the newest copy was evicted from; flash
  // copies older than that are stale. Pruned as the pool drains past them.
  std::unordered_map<std::uint64_t, std::uint64_t> superseded_;
  std::deque<std::pair<std::uint64_t, std::uint64_t>> superseded_order_;  // (seq, digest)
  EvictionResult last_eviction_;
  SetGroupStats stats_;
  std::vector<std::byte> page_buf_;
};

}  // namespace sgc
