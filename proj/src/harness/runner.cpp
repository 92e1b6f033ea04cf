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


#include "sgc/harness/runner.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "sgc/core/error.hpp"
#include "sgc/model/analytic.hpp"
#include "sgc/workload/workload.hpp"

namespace sgc::harness {

namespace {

bool is_hier(EngineKind k) {
  return k == EngineKind::kHierKangaroo || k == EngineKind::kHierFairywren;
}

// Pulls records from the generator or the trace file.
class Source {
 public:
  explicit Source(const RunConfig& c) {
    if (c.trace_path.empty()) {
      gen_.emplace(c.zipf, c.sizes);
    } else {
      trace_.emplace(c.trace_path);
    }
  }
  bool next(workload::TraceRecord& r) { return gen_ ? gen_->next(r) : trace_->next(r); }

 private:
  std::optional<workload::WorkloadGenerator> gen_;
  std::optional<workload::TraceReader> trace_;
};

void put(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (!v) return;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  out << buf;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Snapshot make_snapshot(const char* row, std::uint64_t ops, CacheEngine& e, const EngineCounters& c) {
  Snapshot s;
  s.row = row;
  s.ops_done = ops;
  s.metrics = derive_metrics(e.kind(), c, e.page_size());
  s.metrics.bits_per_object = e.bits_per_object();
  return s;
}

Check relative(std::string name, double measured, double expected, double tol) {
  Check c{std::move(name), measured, expected, tol, false, false};
  c.pass = expected != 0 && std::abs(measured - expected) <= tol * std::abs(expected);
  return c;
}

Check absolute(std::string name, double measured, double expected, double tol) {
  Check c{std::move(name), measured, expected, tol, true, false};
  c.pass = std::abs(measured - expected) <= tol;
  return c;
}

// Mean stored object size (key + value + entry header) over a prefix of the
// workload; used where the model needs s before anything has run.
double sample_object_bytes(const RunConfig& config, std::uint64_t limit = 10000) {
  Source src(config);
  workload::TraceRecord r;
  double sum = 0;
  std::uint64_t n = 0;
  while (n < limit && src.next(r)) {
    sum += r.key_size + r.value_size + kObjectHeaderBytes;
    ++n;
  }
  return n ? sum / n : 0.0;
}

}  // namespace

Simulation::Simulation(const RunConfig& config) : config_(config), geometry_(config.device) {
  switch (config_.engine) {
    case EngineKind::kSetGroup: {
      if (config_.auto_zone_count) {
        geometry_.zone_count = SetGroupEngine::required_zones(config_.set_group, geometry_.pages_per_zone);
      }
      device_ = std::make_unique<flash::ZonedDevice>(geometry_);
      auto e = std::make_unique<SetGroupEngine>(*device_, config_.set_group);
      set_group_ = e.get();
      engine_ = std::move(e);
      break;
    }
    case EngineKind::kLog:
      device_ = std::make_unique<flash::ZonedDevice>(geometry_);
      engine_ = std::make_unique<LogEngine>(*device_);
      break;
    case EngineKind::kSetAssoc:
      engine_ = std::make_unique<SetAssocEngine>(geometry_, config_.setassoc_op_fraction, config_.seed);
      break;
    case EngineKind::kHierKangaroo:
    case EngineKind::kHierFairywren: {
      device_ = std::make_unique<flash::ZonedDevice>(geometry_);
      auto e = std::make_unique<HierEngine>(*device_, config_.hier);
      hier_ = e.get();
      engine_ = std::move(e);
      break;
    }
  }
}

Simulation::~Simulation() {
  engine_.reset();  // engines hold references into the device
}

void Simulation::insert(const std::string& key, std::uint32_t value_size) {
  engine_->set(key, workload::filler_value(key, value_size));
  ++inserted_;
  inserted_bytes_ += key.size() + value_size + kObjectHeaderBytes;
}

bool Simulation::apply(const workload::TraceRecord& r) {
  ++ops_;
  const std::string key = workload::materialize_key(r);
  if (r.op == workload::Op::kSet) {
    insert(key, r.value_size);
    return false;
  }
  if (engine_->get(key)) return true;
  insert(key, r.value_size);
  return false;
}

std::uint64_t planned_ops(const RunConfig& config) {
  if (config.trace_path.empty()) return config.zipf.op_count;
  workload::TraceReader reader(config.trace_path);
  workload::TraceRecord r;
  std::uint64_t n = 0;
  while (reader.next(r)) ++n;
  return n;
}

void write_csv_header(std::ostream& out, bool with_sweep_columns) {
  if (with_sweep_columns) out << "parameter,value,";
  out << "row,ops_done,wa_data,wa_with_index,dlwa,miss_ratio,mean_sg_fill_rate,l2swa_p,l2swa_a,"
         "l2swa,p,index_pool_read_fraction,reads_per_lookup,bits_per_object\n";
}

void write_csv_row(std::ostream& out, const Snapshot& s) {
  const EngineMetrics& m = s.metrics;
  out << s.row << ',' << s.ops_done;
  put(out, m.wa_data);
  put(out, m.wa_with_index);
  put(out, m.dlwa);
  put(out, m.miss_ratio);
  put(out, m.mean_fill_rate);
  put(out, m.l2swa_p);
  put(out, m.l2swa_a);
  put(out, m.l2swa);
  put(out, m.passive_fraction);
  put(out, m.index_pool_read_fraction);
  put(out, m.reads_per_lookup);
  put(out, m.bits_per_object);
  out << '\n';
}

RunResult run(const RunConfig& config, std::ostream* csv) {
  const std::uint64_t total = planned_ops(config);
  const auto steady_start = static_cast<std::uint64_t>(std::floor(config.steady_state_fraction * total));

  Simulation sim(config);
  CacheEngine& e = sim.engine();
  Source src(config);
  RunResult res;
  EngineCounters at_steady;
  if (csv) write_csv_header(*csv);

  workload::TraceRecord r;
  while (src.next(r)) {
    if (sim.ops_done() == steady_start) at_steady = e.counters();
    sim.apply(r);
    if (sim.ops_done() % config.snapshot_interval_ops == 0) {
      res.snapshots.push_back(make_snapshot("snapshot", sim.ops_done(), e, e.counters()));
      if (csv) write_csv_row(*csv, res.snapshots.back());
    }
  }

  res.final_counters = e.counters();
  res.steady_counters = res.final_counters - at_steady;
  res.final_row = make_snapshot("final", sim.ops_done(), e, res.final_counters);
  res.steady = make_snapshot("steady", sim.ops_done(), e, res.steady_counters);
  if (csv) {
    write_csv_row(*csv, res.final_row);
    write_csv_row(*csv, res.steady);
  }
  if (sim.objects_inserted()) {
    res.mean_object_bytes = static_cast<double>(sim.object_bytes_inserted()) / sim.objects_inserted();
  }
  if (HierEngine* h = sim.hier()) {
    res.log_pages = h->log_pages();
    res.set_pages = h->set_pages_physical();
    res.mean_passive_list_length = h->mean_passive_list_length();
  }
  return res;
}

void sweep(const RunConfig& config, std::ostream& out) {
  if (config.sweep_parameter.empty() || config.sweep_values.empty()) {
    throw ConfigError("sweep: needs 'parameter' and 'values'");
  }
  write_csv_header(out, true);
  nlohmann::json base = config.document;
  base.erase("sweep");
  for (const auto& value : config.sweep_values) {
    RunConfig point = parse_config(with_override(base, config.sweep_parameter, value));
    const RunResult res = run(point, nullptr);
    out << config.sweep_parameter << ',' << value.dump() << ',';
    write_csv_row(out, res.steady);
  }
}

double cold_lookup_index_pages(const RunConfig& config, int probes) {
  if (config.engine != EngineKind::kSetGroup) throw ConfigError("engine: cold lookup needs 'nemo'");
  Simulation sim(config);
  SetGroupEngine& e = *sim.set_group();
  const std::uint32_t n = config.set_group.sg_count_on_flash;
  const std::uint32_t g = config.set_group.sgs_per_index_group;
  while (e.live_sgs() < n || e.front_sequence() % g != 0) e.flush_front();
  double pages = 0;
  for (int i = 0; i < probes; ++i) {
    e.pbfg().drop_cache();
    pages += e.lookup("absent:" + std::to_string(i)).index_pages_read;
  }
  return pages / probes;
}

std::vector<Check> validate(const RunConfig& config) {
  std::vector<Check> checks;
  const RunResult res = run(config, nullptr);
  const EngineMetrics& m = res.steady.metrics;
  auto need = [](const std::optional<double>& v, const char* what) {
    if (!v) throw BadParams(std::string("validate: run produced no ") + what);
    return *v;
  };

  if (config.engine != EngineKind::kSetAssoc && config.engine != EngineKind::kHierKangaroo) {
    checks.push_back(absolute("dlwa_zoned", need(m.dlwa, "device writes"), 1.0, 0.0));
  }

  switch (config.engine) {
    case EngineKind::kSetGroup: {
      if (!config.set_group.writeback) {
        // The identity is checked over the whole run; a window boundary cuts
        // through SGs that were filled before it opened.
        const EngineMetrics& whole = res.final_row.metrics;
        const double fill = need(whole.mean_fill_rate, "flushes");
        checks.push_back(relative("wa_vs_inverse_fill", need(whole.wa_data, "writes"), 1.0 / fill, 0.02));
      }
      const double expect = std::ceil(static_cast<double>(config.set_group.sg_count_on_flash) /
                                      config.set_group.sgs_per_index_group);
      checks.push_back(absolute("cold_lookup_index_pages", cold_lookup_index_pages(config), expect, 0.0));
      break;
    }
    case EngineKind::kLog: {
      const double fill = need(m.mean_fill_rate, "flushes");
      checks.push_back(relative("wa_vs_inverse_fill", need(m.wa_data, "writes"), 1.0 / fill, 0.02));
      break;
    }
    case EngineKind::kSetAssoc:
      checks.push_back(relative("alwa_vs_page_over_object", need(m.wa_data, "writes"),
                                config.device.page_size / res.mean_object_bytes, 0.01));
      break;
    case EngineKind::kHierKangaroo:
    case EngineKind::kHierFairywren: {
      model::HierParams h;
      h.w = config.device.page_size;
      h.s = res.mean_object_bytes;
      h.n_log = static_cast<double>(res.log_pages);
      h.n_set = static_cast<double>(res.set_pages);
      h.x = config.hier.op_fraction;
      const double p_meas = need(m.l2swa_p, "passive set writes");
      const double a_meas = need(m.l2swa_a, "active set writes");
      const double p = need(m.passive_fraction, "set writes");
      const double total = need(m.l2swa, "set writes");
      checks.push_back(relative("l2swa_passive_vs_model", p_meas, model::l2swa_p(h), 0.15));
      checks.push_back(relative("l2swa_vs_mixed_model", total, model::l2swa_total(p, p_meas), 0.15));
      checks.push_back(absolute("active_over_passive", a_meas / p_meas, 2.0, 0.3));
      checks.push_back(relative("wa_vs_two_tier_model", need(m.wa_data, "writes"),
                                model::wa_two_tier(need(m.mean_fill_rate, "log flushes"), total), 0.15));
      checks.push_back(relative("passive_list_length_vs_model", res.mean_passive_list_length,
                                model::expected_list_len(h), 0.15));
      break;
    }
  }
  return checks;
}

bool write_validation(const std::vector<Check>& checks, std::ostream& out) {
  bool ok = true;
  out << "check\tmeasured\texpected\ttolerance\tresult\n";
  for (const Check& c : checks) {
    out << c.name << '\t' << fmt(c.measured) << '\t' << fmt(c.expected) << '\t'
        << (c.absolute ? "abs " : "rel ") << fmt(c.tolerance) << '\t' << (c.pass ? "PASS" : "FAIL") << '\n';
    ok = ok && c.pass;
  }
  return ok;
}

void write_model(const RunConfig& config, std::ostream& out) {
  const double s = sample_object_bytes(config);
  out << "quantity\tvalue\n";
  auto row = [&](const char* name, double v) { out << name << '\t' << fmt(v) << '\n'; };
  row("mean_object_bytes", s);

  if (config.engine == EngineKind::kSetGroup) {
    const EngineConfig& c = config.set_group;
    const double n = c.sg_count_on_flash;
    const double o = model::bf_bits_per_object(c.bf_false_positive_rate);
    row("bf_bits_per_object", o);
    row("pbfg_cost", model::pbfg_cost({n, s, o, c.bf_false_positive_rate}));
    row("pbfg_cost_absent", model::pbfg_cost_absent({n, s, o, c.bf_false_positive_rate}));
    const std::uint32_t f =
        model::filters_per_page(c.bf_false_positive_rate, c.objects_per_set_target, c.page_size);
    row("filters_per_page", f);
    row("pbfg_cost_paged", model::pbfg_cost_paged(n, f, c.bf_false_positive_rate));
    const model::BfChoice best = model::optimal_bf_config(n, s, model::log_grid());
    row("optimal_bf_fpr", best.x);
    row("optimal_bf_cost", best.cost);
  } else if (is_hier(config.engine)) {
    Simulation sim(config);
    model::HierParams h;
    h.w = config.device.page_size;
    h.s = s;
    h.n_log = static_cast<double>(sim.hier()->log_pages());
    h.n_set = static_cast<double>(sim.hier()->set_pages_physical());
    h.x = config.hier.op_fraction;
    row("log_pages", h.n_log);
    row("set_pages", h.n_set);
    row("usable_sets", model::usable_sets(h));
    row("expected_list_len", model::expected_list_len(h));
    row("l2swa_passive", model::l2swa_p(h));
    row("l2swa_all_passive", model::l2swa_total(1.0, model::l2swa_p(h)));
    row("l2swa_all_active", model::l2swa_total(0.0, model::l2swa_p(h)));
  } else if (config.engine == EngineKind::kSetAssoc) {
    row("alwa", config.device.page_size / s);
  } else {
    row("wa_full_pages", 1.0);
  }
}

}  // namespace sgc::harness
