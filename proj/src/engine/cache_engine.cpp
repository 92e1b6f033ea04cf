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


#include "sgc/engine/cache_engine.hpp"

namespace sgc {

const char* engine_kind_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::kSetGroup: return "nemo";
    case EngineKind::kLog: return "log";
    case EngineKind::kSetAssoc: return "setassoc";
    case EngineKind::kHierKangaroo: return "hier_kangaroo";
    case EngineKind::kHierFairywren: return "hier_fairywren";
  }
  return "unknown";
}

EngineCounters EngineCounters::operator-(const EngineCounters& e) const {
  EngineCounters d;
  d.logical_new_bytes = logical_new_bytes - e.logical_new_bytes;
  d.data_bytes_written = data_bytes_written - e.data_bytes_written;
  d.index_bytes_written = index_bytes_written - e.index_bytes_written;
  d.host_pages_written = host_pages_written - e.host_pages_written;
  d.device_copied_pages = device_copied_pages - e.device_copied_pages;
  d.lookups = lookups - e.lookups;
  d.misses = misses - e.misses;
  d.lookup_flash_reads = lookup_flash_reads - e.lookup_flash_reads;
  d.lookups_touching_index_pool = lookups_touching_index_pool - e.lookups_touching_index_pool;
  d.fill_sum = fill_sum - e.fill_sum;
  d.fill_units = fill_units - e.fill_units;
  d.passive_set_writes = passive_set_writes - e.passive_set_writes;
  d.passive_new_bytes = passive_new_bytes - e.passive_new_bytes;
  d.active_set_writes = active_set_writes - e.active_set_writes;
  d.active_new_bytes = active_new_bytes - e.active_new_bytes;
  return d;
}

namespace {

std::optional<double> ratio(double num, double den) {
  if (den <= 0) return std::nullopt;
  return num / den;
}

bool is_hier(EngineKind k) {
  return k == EngineKind::kHierKangaroo || k == EngineKind::kHierFairywren;
}

}  // namespace

EngineMetrics derive_metrics(EngineKind kind, const EngineCounters& c, std::uint32_t page_size) {
  EngineMetrics m;
  if (c.data_bytes_written > 0) {
    m.wa_data = ratio(static_cast<double>(c.data_bytes_written), static_cast<double>(c.logical_new_bytes));
    if (kind == EngineKind::kSetGroup) {
      m.wa_with_index = ratio(static_cast<double>(c.data_bytes_written + c.index_bytes_written),
                              static_cast<double>(c.logical_new_bytes));
    }
  }
  if (c.host_pages_written > 0) {
    m.dlwa = static_cast<double>(c.host_pages_written + c.device_copied_pages) /
             static_cast<double>(c.host_pages_written);
  }
  m.miss_ratio = ratio(static_cast<double>(c.misses), static_cast<double>(c.lookups));
  m.reads_per_lookup = ratio(static_cast<double>(c.lookup_flash_reads), static_cast<double>(c.lookups));
  if (kind != EngineKind::kSetAssoc) {
    m.mean_fill_rate = ratio(c.fill_sum, static_cast<double>(c.fill_units));
  }
  if (kind == EngineKind::kSetGroup) {
    m.index_pool_read_fraction = ratio(static_cast<double>(c.lookups_touching_index_pool),
                                       static_cast<double>(c.lookups));
  }
  if (is_hier(kind)) {
    const double w = page_size;
    m.l2swa_p = ratio(w * c.passive_set_writes, static_cast<double>(c.passive_new_bytes));
    m.l2swa_a = ratio(w * c.active_set_writes, static_cast<double>(c.active_new_bytes));
    m.l2swa = ratio(w * (c.passive_set_writes + c.active_set_writes),
                    static_cast<double>(c.passive_new_bytes + c.active_new_bytes));
    m.passive_fraction = ratio(static_cast<double>(c.passive_set_writes),
                               static_cast<double>(c.passive_set_writes + c.active_set_writes));
  }
  return m;
}

}  // namespace sgc
