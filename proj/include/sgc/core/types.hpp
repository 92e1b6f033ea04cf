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
#include <string>
#include <string_view>

namespace sgc {

// On-page bytes that precede every object: 2-byte key length, 4-byte value length.
inline constexpr std::uint32_t kObjectHeaderBytes = 6;
// Page header: 2-byte magic, 2-byte entry count.
inline constexpr std::uint32_t kPageHeaderBytes = 4;

// Largest object (header included) a page of `page_size` bytes can hold.
constexpr std::uint32_t set_payload_capacity(std::uint32_t page_size) {
  return page_size - kPageHeaderBytes;
}

struct ObjectRecord {
  std::string key;
  std::string value;

  std::uint32_t total_size() const {
    return static_cast<std::uint32_t>(key.size() + value.size()) + kObjectHeaderBytes;
  }

  friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

// Parameters of the set-group engine. Defaults follow the published
// configuration except sets_per_sg and sg_count_on_flash, which are desk-scale.
struct EngineConfig {
  std::uint32_t page_size = 4096;
  std::uint32_t sets_per_sg = 4096;
  std::uint32_t sg_count_on_flash = 64;
  std::uint32_t in_memory_sg_count = 2;
  std::uint32_t flush_threshold = 4096;  // hold budget (count of set-full events)
  std::uint32_t sgs_per_index_group = 50;
  double bf_false_positive_rate = 0.001;
  std::uint32_t objects_per_set_target = 40;
  double cached_pbfg_fraction = 0.5;
  double hotness_window_fraction = 0.3;
  double cooling_period_fraction = 0.1;
  double near_full_fraction = 0.95;
  std::uint64_t rng_seed = 0;

  // Ablation switches for the three fill-rate techniques.
  bool buffered_sgs = true;
  bool delayed_flush = true;
  bool writeback = true;

  // Throws ConfigError naming the offending field.
  void validate() const;

  std::uint32_t effective_in_memory_sgs() const { return buffered_sgs ? in_memory_sg_count : 1; }
};

// Hash of a key plus everything derived from it. Pure function of (key, seed,
// sets_per_sg).
struct KeyDigest {
  std::uint64_t digest = 0;
  std::uint32_t intra_sg_offset = 0;
  std::uint32_t probe_a = 0;
  std::uint32_t probe_b = 0;

  // i-th filter bit position in a filter of `m` bits (enhanced double hashing).
  std::uint32_t probe(std::uint32_t i, std::uint32_t m) const {
    const std::uint64_t ii = i;
    const std::uint64_t v = probe_a + ii * probe_b + (ii * ii * ii - ii) / 6;
    return static_cast<std::uint32_t>(v % m);
  }

  friend bool operator==(const KeyDigest&, const KeyDigest&) = default;
};

// Throws BadKey on an empty key.
KeyDigest hash_key(std::string_view key, std::uint64_t seed, std::uint32_t sets_per_sg);
KeyDigest hash_key(std::string_view key, const EngineConfig& config);

}  // namespace sgc
