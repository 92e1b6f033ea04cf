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
#include <ostream>
#include <string>
#include <vector>

#include "sgc/baseline/baselines.hpp"
#include "sgc/engine/cache_engine.hpp"
#include "sgc/engine/set_group_engine.hpp"
#include "sgc/flash/device.hpp"
#include "sgc/harness/config.hpp"

namespace sgc::harness {

// A device plus the engine configured on it.
class Simulation {
 public:
  explicit Simulation(const RunConfig& config);
  ~Simulation();

  CacheEngine& engine() { return *engine_; }
  const RunConfig& config() const { return config_; }
  const flash::DeviceGeometry& geometry() const { return geometry_; }

  SetGroupEngine* set_group() { return set_group_; }
  HierEngine* hier() { return hier_; }

  // One trace record with get-before-set semantics; returns true on a hit.
  bool apply(const workload::TraceRecord& record);

  std::uint64_t ops_done() const { return ops_; }
  std::uint64_t objects_inserted() const { return inserted_; }
  std::uint64_t object_bytes_inserted() const { return inserted_bytes_; }

 private:
  void insert(const std::string& key, std::uint32_t value_size);

  RunConfig config_;
  flash::DeviceGeometry geometry_;
  std::unique_ptr<flash::ZonedDevice> device_;
  std::unique_ptr<CacheEngine> engine_;
  SetGroupEngine* set_group_ = nullptr;
  HierEngine* hier_ = nullptr;
  std::uint64_t ops_ = 0;
  std::uint64_t inserted_ = 0;
  std::uint64_t inserted_bytes_ = 0;
};

struct Snapshot {
  std::string row;  // "snapshot", "final" or "steady"
  std::uint64_t ops_done = 0;
  EngineMetrics metrics;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  Snapshot final_row;
  Snapshot steady;
  EngineCounters final_counters;
  EngineCounters steady_counters;
  double mean_object_bytes = 0;
  // Filled for hier engines.
  std::uint64_t log_pages = 0;
  std::uint64_t set_pages = 0;
  double mean_passive_list_length = 0;
};

// Number of records the run will replay (streams the trace once if needed).
std::uint64_t planned_ops(const RunConfig& config);

// Replays the configured workload; snapshot rows go to `csv` as they are taken.
RunResult run(const RunConfig& config, std::ostream* csv);

void write_csv_header(std::ostream& out, bool with_sweep_columns = false);
void write_csv_row(std::ostream& out, const Snapshot& s);

// One steady-state row per value of config.sweep_parameter.
void sweep(const RunConfig& config, std::ostream& out);

struct Check {
  std::string name;
  double measured = 0;
  double expected = 0;
  double tolerance = 0;  // relative unless `absolute`
  bool absolute = false;
  bool pass = false;
};

std::vector<Check> validate(const RunConfig& config);
// Tab-separated report; returns true when every check passed.
bool write_validation(const std::vector<Check>& checks, std::ostream& out);

// Mean index pages read by a lookup of an absent key with a cold index cache,
// measured on a fresh engine whose pool holds sg_count_on_flash SGs in whole
// index groups.
double cold_lookup_index_pages(const RunConfig& config, int probes = 64);

// Closed-form predictions for the configured engine, tab-separated.
void write_model(const RunConfig& config, std::ostream& out);

}  // namespace sgc::harness
