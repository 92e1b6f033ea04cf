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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgc/core/set_page.hpp"
#include "sgc/engine/cache_engine.hpp"
#include "sgc/flash/device.hpp"

namespace sgc {

// Objects are buffered into a page and appended to a FIFO log of zones; an
// exact in-memory index maps each key to its newest copy.
class LogEngine : public CacheEngine {
 public:
  explicit LogEngine(flash::ZonedDevice& device);

  EngineKind kind() const override { return EngineKind::kLog; }
  std::uint32_t page_size() const override { return device_.geometry().page_size; }

  void set(std::string_view key, std::string_view value) override;
  std::optional<std::string> get(std::string_view key) override;

  EngineCounters counters() const override;
  flash::IoCounters io() const override { return device_.counters(); }

  std::size_t indexed_objects() const { return index_.size(); }

 private:
  static constexpr std::uint32_t kInBuffer = ~std::uint32_t{0};

  struct Location {
    std::uint32_t zone = kInBuffer;
    std::uint32_t page = 0;
  };

  void flush_buffer();
  void open_next_zone();

  flash::ZonedDevice& device_;
  SetPage buffer_;
  std::unordered_map<std::string, Location> index_;
  std::vector<std::vector<std::string>> zone_keys_;
  std::uint32_t open_zone_ = 0;
  bool wrapped_ = false;
  EngineCounters c_;
  std::vector<std::byte> page_buf_;
};

// Every insert rewrites the object's whole set page through a page-mapped FTL.
class SetAssocEngine : public CacheEngine {
 public:
  SetAssocEngine(flash::DeviceGeometry geometry, double op_fraction, std::uint64_t seed = 0);

  EngineKind kind() const override { return EngineKind::kSetAssoc; }
  std::uint32_t page_size() const override { return ftl_.geometry().page_size; }

  void set(std::string_view key, std::string_view value) override;
  std::optional<std::string> get(std::string_view key) override;

  EngineCounters counters() const override;
  flash::IoCounters io() const override { return ftl_.counters(); }

  std::uint64_t sets_total() const { return ftl_.logical_pages(); }

 private:
  std::uint64_t set_of(std::string_view key) const;

  flash::FtlDevice ftl_;
  std::uint64_t seed_;
  EngineCounters c_;
  std::vector<std::byte> page_buf_;
};

enum class HierMode { kKangaroo, kFairywren };

struct HierConfig {
  double log_fraction = 0.05;  // share of zones used by the log tier
  double op_fraction = 0.05;   // X: share of set-tier pages reserved for GC
  double bucket_fraction = 1.0;  // log index buckets per usable set
  std::uint32_t gc_low_watermark = 2;
  HierMode mode = HierMode::kFairywren;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Two-tier cache: a circular log of zones in front of a page-mapped tier of
// sets. Log objects are bucketed by destination set and moved to their set
// either when the log wraps (passive) or, in fairywren mode, when GC rewrites
// the set anyway (active).
class HierEngine : public CacheEngine {
 public:
  HierEngine(flash::ZonedDevice& device, HierConfig config);

  EngineKind kind() const override {
    return config_.mode == HierMode::kKangaroo ? EngineKind::kHierKangaroo
                                               : EngineKind::kHierFairywren;
  }
  std::uint32_t page_size() const override { return device_.geometry().page_size; }

  void set(std::string_view key, std::string_view value) override;
  std::optional<std::string> get(std::string_view key) override;

  EngineCounters counters() const override;
  flash::IoCounters io() const override { return device_.counters(); }

  const HierConfig& config() const { return config_; }
  std::uint32_t log_zones() const { return log_zones_; }
  std::uint64_t log_pages() const;
  std::uint64_t set_pages_physical() const;
  std::uint64_t usable_sets() const { return usable_sets_; }
  std::uint64_t bucket_count() const { return buckets_.size(); }
  std::uint64_t gc_passes() const { return region_->gc_passes(); }

  // Mean pending-list length (in objects) over passive flushes so far.
  double mean_passive_list_length() const {
    return passive_lists_ ? static_cast<double>(passive_list_objects_) / passive_lists_ : 0.0;
  }

 private:
  static constexpr std::uint32_t kInBuffer = ~std::uint32_t{0};

  struct LogEntry {
    std::string value;
    std::uint64_t version = 0;
    std::uint32_t zone = kInBuffer;
    std::uint32_t page = 0;
    std::uint64_t set = 0;
  };
  struct Pending {
    std::string key;
    std::uint64_t version = 0;
  };

  void flush_buffer();
  void open_next_zone();
  void passive_migrate_zone(std::uint32_t zone);
  // Removes live, flushed log objects bound for `set` from bucket `b`.
  std::vector<ObjectRecord> take_pending(std::uint64_t b, std::optional<std::uint64_t> set,
                                         std::vector<std::uint64_t>* sets);
  void merge_into(SetPage& page, std::vector<ObjectRecord>& objects) const;
  bool gc_rewrite(std::uint64_t lpn, std::span<const std::byte> old_page, std::vector<std::byte>& out);

  flash::ZonedDevice& device_;
  HierConfig config_;
  std::uint32_t log_zones_;
  std::uint64_t usable_sets_;
  std::unique_ptr<flash::PageMappedRegion> region_;
  SetPage buffer_;
  std::vector<Pending> buffer_entries_;
  std::unordered_map<std::string, LogEntry> log_index_;
  std::vector<std::vector<Pending>> buckets_;
  std::vector<std::vector<Pending>> zone_entries_;
  std::uint32_t open_zone_ = 0;
  bool wrapped_ = false;
  std::uint64_t version_ = 0;
  std::uint64_t passive_lists_ = 0;
  std::uint64_t passive_list_objects_ = 0;
  EngineCounters c_;
  std::vector<std::byte> page_buf_;
};

}  // namespace sgc
