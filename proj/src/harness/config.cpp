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


#include "sgc/harness/config.hpp"

#include <fstream>
#include <set>

#include "sgc/core/error.hpp"

namespace sgc::harness {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (node_->at(key).is_number_integer() && node_->at(key).get<std::int64_t>() < 0) {
        throw ConfigError(field(key) + ": must be non-negative");
      }
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(has(key) ? &node_->at(key) : nullptr, field(key));
  }

  void done() const {
    if (!node_) return;
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError((path_.empty() ? it.key() : path_ + "." + it.key()) + ": unknown field");
      }
    }
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace

EngineKind parse_engine_kind(const std::string& name) {
  for (EngineKind k : {EngineKind::kSetGroup, EngineKind::kLog, EngineKind::kSetAssoc,
                       EngineKind::kHierKangaroo, EngineKind::kHierFairywren}) {
    if (name == engine_kind_name(k)) return k;
  }
  throw ConfigError("engine: unknown engine '" + name + "'");
}

RunConfig parse_config(const json& doc) {
  RunConfig rc;
  rc.document = doc;
  Section root(&doc, "");

  std::string engine = "nemo";
  root.get("engine", engine);
  rc.engine = parse_engine_kind(engine);
  root.get("seed", rc.seed);

  Section dev = root.child("device");
  rc.auto_zone_count = rc.engine == EngineKind::kSetGroup && !dev.has("zone_count");
  dev.get("page_size", rc.device.page_size);
  dev.get("pages_per_zone", rc.device.pages_per_zone);
  dev.get("zone_count", rc.device.zone_count);
  dev.get("op_fraction", rc.setassoc_op_fraction);
  dev.done();

  Section ne = root.child("nemo");
  if (rc.engine != EngineKind::kSetGroup && root.has("nemo")) {
    throw ConfigError("nemo: section only valid with engine 'nemo'");
  }
  EngineConfig& n = rc.set_group;
  ne.get("sets_per_sg", n.sets_per_sg);
  ne.get("sg_count_on_flash", n.sg_count_on_flash);
  ne.get("in_memory_sg_count", n.in_memory_sg_count);
  ne.get("flush_threshold", n.flush_threshold);
  ne.get("sgs_per_index_group", n.sgs_per_index_group);
  ne.get("bf_false_positive_rate", n.bf_false_positive_rate);
  ne.get("objects_per_set_target", n.objects_per_set_target);
  ne.get("cached_pbfg_fraction", n.cached_pbfg_fraction);
  ne.get("hotness_window_fraction", n.hotness_window_fraction);
  ne.get("cooling_period_fraction", n.cooling_period_fraction);
  ne.get("near_full_fraction", n.near_full_fraction);
  ne.done();
  n.page_size = rc.device.page_size;

  Section ab = root.child("ablation");
  if (rc.engine != EngineKind::kSetGroup && root.has("ablation")) {
    throw ConfigError("ablation: flags only valid with engine 'nemo'");
  }
  ab.get("buffered_sgs", n.buffered_sgs);
  ab.get("delayed_flush", n.delayed_flush);
  ab.get("writeback", n.writeback);
  ab.done();

  Section hi = root.child("hier");
  const bool is_hier = rc.engine == EngineKind::kHierKangaroo || rc.engine == EngineKind::kHierFairywren;
  if (!is_hier && root.has("hier")) throw ConfigError("hier: section only valid with hier engines");
  hi.get("log_fraction", rc.hier.log_fraction);
  hi.get("op_fraction", rc.hier.op_fraction);
  hi.get("bucket_fraction", rc.hier.bucket_fraction);
  hi.get("gc_low_watermark", rc.hier.gc_low_watermark);
  hi.done();
  rc.hier.mode = rc.engine == EngineKind::kHierKangaroo ? HierMode::kKangaroo : HierMode::kFairywren;

  Section wl = root.child("workload");
  wl.get("alpha", rc.zipf.alpha);
  wl.get("keyspace", rc.zipf.keyspace);
  wl.get("op_count", rc.zipf.op_count);
  wl.get("get_fraction", rc.zipf.get_fraction);
  wl.get("key_shards", rc.zipf.key_shards);
  wl.get("trace_path", rc.trace_path);
  Section vs = wl.child("value_size");
  std::string dist = "normal";
  vs.get("distribution", dist);
  if (dist == "normal") {
    rc.sizes.kind = workload::SizeSpec::Kind::kNormal;
  } else if (dist == "fixed") {
    rc.sizes.kind = workload::SizeSpec::Kind::kFixed;
  } else {
    throw ConfigError("workload.value_size.distribution: expected 'normal' or 'fixed'");
  }
  vs.get("mean", rc.sizes.mean);
  vs.get("stddev", rc.sizes.stddev);
  vs.get("min", rc.sizes.min);
  vs.get("max", rc.sizes.max);
  vs.get("bytes", rc.sizes.fixed);
  vs.done();
  wl.done();

  Section run = root.child("run");
  run.get("snapshot_interval_ops", rc.snapshot_interval_ops);
  run.get("steady_state_fraction", rc.steady_state_fraction);
  run.done();

  Section sw = root.child("sweep");
  sw.get("parameter", rc.sweep_parameter);
  if (sw.has("values")) {
    json values;
    sw.get("values", values);
    if (!values.is_array() || values.empty()) throw ConfigError("sweep.values: expected a non-empty array");
    rc.sweep_values.assign(values.begin(), values.end());
  }
  sw.done();

  root.done();

  rc.device.validate();
  if (!(rc.setassoc_op_fraction > 0.0 && rc.setassoc_op_fraction < 1.0)) {
    throw ConfigError("device.op_fraction: must lie in (0, 1)");
  }
  rc.zipf.seed = rc.seed;
  rc.set_group.rng_seed = rc.seed;
  rc.hier.seed = rc.seed;
  if (rc.engine == EngineKind::kSetGroup) {
    rc.set_group.validate();
  }
  if (is_hier) rc.hier.validate();
  rc.zipf.validate();
  rc.sizes.validate();
  if (rc.snapshot_interval_ops == 0) throw ConfigError("run.snapshot_interval_ops: must be positive");
  if (!(rc.steady_state_fraction >= 0 && rc.steady_state_fraction < 1)) {
    throw ConfigError("run.steady_state_fraction: must lie in [0, 1)");
  }
  return rc;
}

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return doc;
}

RunConfig load_config(const std::string& path) { return parse_config(load_document(path)); }

json with_override(const json& doc, const std::string& path, const json& value) {
  json out = doc;
  json* node = &out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("sweep.parameter: malformed path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return out;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    if (!node->is_object()) throw ConfigError("sweep.parameter: '" + path + "' crosses a non-object");
    start = dot + 1;
  }
}

}  // namespace sgc::harness
