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
#include <vector>

#include "json.hpp"
#include "sgc/baseline/baselines.hpp"
#include "sgc/core/types.hpp"
#include "sgc/engine/cache_engine.hpp"
#include "sgc/flash/device.hpp"
#include "sgc/workload/workload.hpp"

namespace sgc::harness {

struct RunConfig {
  EngineKind engine = EngineKind::kSetGroup;
  flash::DeviceGeometry device;
  bool auto_zone_count = false;     // size the device to the engine's need
  double setassoc_op_fraction = 0.5;
  EngineConfig set_group;
  HierConfig hier;

  workload::ZipfSpec zipf;
  workload::SizeSpec sizes;
  std::string trace_path;  // replaces the generator when set

  std::uint64_t seed = 1;
  std::uint64_t snapshot_interval_ops = 100000;
  double steady_state_fraction = 0.5;  // window starts at this share of ops

  std::string sweep_parameter;
  std::vector<nlohmann::json> sweep_values;

  nlohmann::json document;  // normalized source, used to derive sweep points
};

// Throws ConfigError whose message starts with the offending field path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
// Parsed JSON (comments allowed); throws ConfigError.
nlohmann::json load_document(const std::string& path);

// Copy of `doc` with the dotted `path` set to `value`.
nlohmann::json with_override(const nlohmann::json& doc, const std::string& path,
                             const nlohmann::json& value);

EngineKind parse_engine_kind(const std::string& name);

}  // namespace sgc::harness
