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

#include "sgc/core/types.hpp"

#include <cmath>

#include "sgc/core/error.hpp"
#include "sgc/core/hash.hpp"

namespace sgc {
namespace {

void require(bool ok, const char* field, const char* why) {
  if (!ok) throw ConfigError(std::string("nemo.") + field + ": " + why);
}

bool is_fraction(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void EngineConfig::validate() const {
  require(page_size > kPageHeaderBytes + kObjectHeaderBytes, "page_size", "too small");
  require(page_size <= 65536, "page_size", "entry count field limits pages to 64 KiB");
  require(sets_per_sg > 0, "sets_per_sg", "must be positive");
  require(sg_count_on_flash > 0, "sg_count_on_flash", "must be positive");
  require(in_memory_sg_count > 0, "in_memory_sg_count", "must be positive");
  require(sgs_per_index_group > 0, "sgs_per_index_group", "must be positive");
  require(bf_false_positive_rate > 0.0 && bf_false_positive_rate < 1.0, "bf_false_positive_rate",
          "must lie in (0, 1)");
  require(objects_per_set_target > 0, "objects_per_set_target", "must be positive");
  require(is_fraction(cached_pbfg_fraction), "cached_pbfg_fraction", "must lie in [0, 1]");
  require(is_fraction(hotness_window_fraction), "hotness_window_fraction", "must lie in [0, 1]");
  require(cooling_period_fraction > 0.0 && cooling_period_fraction <= 1.0,
          "cooling_period_fraction", "must lie in (0, 1]");
  require(near_full_fraction > 0.0 && near_full_fraction <= 1.0, "near_full_fraction",
          "must lie in (0, 1]");
}

KeyDigest hash_key(std::string_view key, std::uint64_t seed, std::uint32_t sets_per_sg) {
  if (key.empty()) throw BadKey("empty key");
  KeyDigest d;
  d.digest = xxh64(key, seed);
  d.intra_sg_offset = static_cast<std::uint32_t>(d.digest % sets_per_sg);
  // Probes come from a remix so that keys sharing an offset (and hence the low
  // digest bits) still get independent filter positions.
  const std::uint64_t p = mix64(d.digest);
  d.probe_a = static_cast<std::uint32_t>(p);
  d.probe_b = static_cast<std::uint32_t>(p >> 32);
  return d;
}

KeyDigest hash_key(std::string_view key, const EngineConfig& config) {
  return hash_key(key, config.rng_seed, config.sets_per_sg);
}

}  // namespace sgc
