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
#include <optional>
#include <string>
#include <string_view>

#include "sgc/flash/device.hpp"

namespace sgc {

enum class EngineKind { kSetGroup, kLog, kSetAssoc, kHierKangaroo, kHierFairywren };

const char* engine_kind_name(EngineKind kind);

// Additive counters. A steady-state window is the difference of two samples.
struct EngineCounters {
  std::uint64_t logical_new_bytes = 0;
  std::uint64_t data_bytes_written = 0;
  std::uint64_t index_bytes_written = 0;
  std::uint64_t host_pages_written = 0;
  std::uint64_t device_copied_pages = 0;
  std::uint64_t lookups = 0;
  std::uint64_t misses = 0;
  std::uint64_t lookup_flash_reads = 0;
  std::uint64_t lookups_touching_index_pool = 0;
  double fill_sum = 0;  // sum of per-unit fill rates at flush
  std::uint64_t fill_units = 0;
  std::uint64_t passive_set_writes = 0;
  std::uint64_t passive_new_bytes = 0;
  std::uint64_t active_set_writes = 0;
  std::uint64_t active_new_bytes = 0;

  EngineCounters operator-(const EngineCounters& earlier) const;
};

struct EngineMetrics {
  std::optional<double> wa_data;
  std::optional<double> wa_with_index;
  std::optional<double> dlwa;
  std::optional<double> miss_ratio;
  std::optional<double> mean_fill_rate;
  std::optional<double> l2swa_p;
  std::optional<double> l2swa_a;
  std::optional<double> l2swa;
  std::optional<double> passive_fraction;
  std::optional<double> index_pool_read_fraction;
  std::optional<double> reads_per_lookup;
  std::optional<double> bits_per_object;
};

// Metrics over a counter window; fields that do not apply to `kind` stay empty.
EngineMetrics derive_metrics(EngineKind kind, const EngineCounters& c, std::uint32_t page_size);

class CacheEngine {
 public:
  virtual ~CacheEngine() = default;

  virtual EngineKind kind() const = 0;
  virtual std::uint32_t page_size() const = 0;

  virtual void set(std::string_view key, std::string_view value) = 0;
  virtual std::optional<std::string> get(std::string_view key) = 0;

  virtual EngineCounters counters() const = 0;
  // Gauge, not a counter; empty when not tracked.
  virtual std::optional<double> bits_per_object() const { return std::nullopt; }
  virtual flash::IoCounters io() const = 0;
};

}  // namespace sgc
