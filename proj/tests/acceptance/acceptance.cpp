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

// End-to-end acceptance run. One PASS/FAIL line per criterion; exits nonzero
// when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sgc/harness/config.hpp"
#include "sgc/harness/runner.hpp"
#include "sgc/index/bloom.hpp"
#include "sgc/model/analytic.hpp"
#include "sgc/workload/workload.hpp"

using namespace sgc;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Accumulates sub-check results and a human-readable detail line.
struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

bool within_rel(double measured, double expected, double tol) {
  return std::fabs(measured - expected) <= tol * std::fabs(expected);
}

double value_or_nan(const std::optional<double>& v) { return v ? *v : std::nan(""); }

harness::RunConfig cfg(const std::string& text) { return harness::parse_config(json::parse(text)); }

// Zipf workload shared by the ladder, the WA identity and the head-to-head.
const char* kLadderBase = R"({
  "engine": "nemo", "seed": 1,
  "device": {"page_size": 4096, "pages_per_zone": 256},
  "nemo": {"sets_per_sg": 256, "sg_count_on_flash": 64, "in_memory_sg_count": 2,
           "flush_threshold": 4, "sgs_per_index_group": 50},
  "workload": {"alpha": 1.2, "keyspace": 4000000, "op_count": 4000000,
               "value_size": {"distribution": "normal", "mean": 250, "stddev": 200,
                              "min": 16, "max": 3500}},
  "run": {"snapshot_interval_ops": 1000000, "steady_state_fraction": 0.5}
})";

struct Ablation {
  const char* name;
  bool buffered, delayed, writeback;
};
constexpr std::array<Ablation, 4> kLadder = {{
    {"naive", false, false, false},
    {"B", true, false, false},
    {"B+P", true, true, false},
    {"B+P+W", true, true, true},
}};

std::map<std::string, harness::RunResult>& ladder_results() {
  static std::map<std::string, harness::RunResult> results;
  if (results.empty()) {
    for (const Ablation& a : kLadder) {
      json doc = json::parse(kLadderBase);
      doc["ablation"] = {{"buffered_sgs", a.buffered}, {"delayed_flush", a.delayed}, {"writeback", a.writeback}};
      results[a.name] = harness::run(harness::parse_config(doc), nullptr);
    }
  }
  return results;
}

// 1. Closed-form arithmetic.
Verdict model_arithmetic() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  model::HierParams h;
  h.n_log = 5;
  h.n_set = 95;
  h.x = 0.05;
  const double p6 = model::l2swa_p(h);
  const double t7 = model::l2swa_total(0.25, p6);
  const double t7_rounded = model::l2swa_total(0.25, std::round(p6));
  const double w9 = model::wa_set_group(0.6413);
  const double bits = model::bf_bits_per_object(0.001);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.check(std::fabs(p6 - 9.025) < 1e-12, "l2swa_p " + num(p6));
  v.check(std::fabs(t7 - 15.79375) < 1e-12 && std::fabs(t7_rounded - 15.75) < 1e-12,
          "l2swa(p=0.25) " + num(t7) + " (rounded input " + num(t7_rounded) + ")");
  v.check(std::fabs(w9 - 1.0 / 0.6413) < 1e-12 && std::round(w9 * 100) / 100 == 1.56, "wa(0.6413) " + num(w9));
  v.check(std::fabs(bits - 14.3775876) < 1e-6 && std::round(bits * 10) / 10 == 14.4, "bf bits " + num(bits));
  v.check(secs < 1.0, "runtime " + num(secs) + " s");
  return v;
}

// Fairywren on a device of `zones` zones; uniform keys, objects averaging 246 B.
harness::RunConfig fairywren_uniform(std::uint32_t zones, double op_fraction, std::uint64_t ops) {
  json doc = json::parse(R"({
    "engine": "hier_fairywren", "seed": 3,
    "device": {"page_size": 4096, "pages_per_zone": 256},
    "hier": {"log_fraction": 0.05},
    "workload": {"alpha": 0, "keyspace": 4000000000, "get_fraction": 0,
                 "value_size": {"distribution": "fixed", "bytes": 226}},
    "run": {"steady_state_fraction": 0.5}
  })");
  doc["device"]["zone_count"] = zones;
  doc["hier"]["op_fraction"] = op_fraction;
  doc["workload"]["op_count"] = ops;
  doc["run"]["snapshot_interval_ops"] = ops;
  return harness::parse_config(doc);
}

harness::RunResult& hier_2gb() {
  static harness::RunResult res = harness::run(fairywren_uniform(2048, 0.05, 10000000), nullptr);
  return res;
}

// 2. Passive/active set rewrite cost against the model on a 2 GB device.
Verdict hier_model() {
  Verdict v;
  const harness::RunConfig c = fairywren_uniform(2048, 0.05, 10000000);
  const harness::RunResult& res = hier_2gb();
  const EngineMetrics& m = res.steady.metrics;
  model::HierParams h;
  h.w = c.device.page_size;
  h.s = res.mean_object_bytes;
  h.n_log = static_cast<double>(res.log_pages);
  h.n_set = static_cast<double>(res.set_pages);
  h.x = c.hier.op_fraction;
  const double pm = value_or_nan(m.l2swa_p), am = value_or_nan(m.l2swa_a);
  const double p = value_or_nan(m.passive_fraction), total = value_or_nan(m.l2swa);
  const double model_p = model::l2swa_p(h);
  v.check(within_rel(pm, model_p, 0.15), "l2swa_p " + num(pm) + " vs model " + num(model_p));
  v.check(am / pm >= 1.7 && am / pm <= 2.3, "l2swa_a/l2swa_p " + num(am / pm));
  const double mixed = model::l2swa_total(p, pm);
  v.check(within_rel(total, mixed, 0.15), "l2swa " + num(total) + " vs (2-p)*l2swa_p " + num(mixed) + " at p " + num(p));
  v.check(std::fabs(res.mean_object_bytes - 246) <= 1, "object bytes " + num(res.mean_object_bytes));
  return v;
}

// 3. Share of passive set rewrites grows with over-provisioning.
Verdict p_monotonic() {
  Verdict v;
  std::vector<double> ps;
  std::string series;
  for (double x : {0.05, 0.20, 0.35, 0.50}) {
    const harness::RunResult res = harness::run(fairywren_uniform(256, x, 3000000), nullptr);
    ps.push_back(value_or_nan(res.steady.metrics.passive_fraction));
    series += (series.empty() ? "" : " ") + num(ps.back());
  }
  bool increasing = true;
  for (std::size_t i = 1; i < ps.size(); ++i) increasing = increasing && ps[i] > ps[i - 1];
  v.check(increasing, "p " + series);
  v.check(ps.back() >= 0.90, "p(0.50) " + num(ps.back()));
  return v;
}

// 4. SG fill rate per ablation.
Verdict fill_ladder() {
  Verdict v;
  std::vector<double> fill;
  std::string series;
  for (const Ablation& a : kLadder) {
    fill.push_back(value_or_nan(ladder_results().at(a.name).steady.metrics.mean_fill_rate));
    series += std::string(series.empty() ? "" : " ") + a.name + "=" + num(fill.back());
  }
  bool ordered = true;
  for (std::size_t i = 1; i < fill.size(); ++i) ordered = ordered && fill[i] > fill[i - 1];
  v.check(ordered, "fill " + series);
  v.check(fill.back() >= 0.85, "full " + num(fill.back()));
  v.check(fill.front() <= 0.15, "naive " + num(fill.front()));
  return v;
}

// 5. wa_data * fill == 1 for every writeback-off ablation, whole run.
Verdict wa_identity() {
  Verdict v;
  for (const Ablation& a : kLadder) {
    if (a.writeback) continue;
    const EngineMetrics& m = ladder_results().at(a.name).final_row.metrics;
    const double prod = value_or_nan(m.wa_data) * value_or_nan(m.mean_fill_rate);
    v.check(std::fabs(prod - 1.0) <= 0.01, std::string(a.name) + " wa*fill " + num(prod));
  }
  return v;
}

// 6. Same Zipf workload on a hierarchical cache of the same flash size.
Verdict head_to_head() {
  Verdict v;
  const double sg = value_or_nan(ladder_results().at("B+P+W").steady.metrics.wa_data);
  json doc = json::parse(kLadderBase);
  doc.erase("nemo");
  doc["engine"] = "hier_fairywren";
  doc["device"]["zone_count"] = 64;
  doc["hier"] = {{"op_fraction", 0.05}};
  const harness::RunResult fw = harness::run(harness::parse_config(doc), nullptr);
  const double hier = value_or_nan(fw.steady.metrics.wa_data);
  v.check(sg <= 2.0, "wa set-group " + num(sg));
  v.check(hier >= 4 * sg, "wa fairywren " + num(hier) + " ratio " + num(hier / sg));
  return v;
}

// 7. Filter false-positive rate, no false negatives, cold lookup page count.
Verdict pbfg_calibration() {
  Verdict v;
  const double x = 0.001;
  const std::uint32_t load = 40;
  const index::FilterShape shape = index::filter_shape(x, load);
  const std::uint32_t filters = 25000;  // 25000 * 40 = 10^6 probes each way
  std::vector<std::byte> f(shape.bytes());
  std::uint64_t fp = 0, fn = 0, probes = 0;
  for (std::uint32_t i = 0; i < filters; ++i) {
    std::fill(f.begin(), f.end(), std::byte{0});
    const std::string base = "f" + std::to_string(i) + ":";
    for (std::uint32_t k = 0; k < load; ++k) index::bloom_add(f, shape, hash_key(base + std::to_string(k), 17, 1));
    for (std::uint32_t k = 0; k < load; ++k) {
      if (!index::bloom_may_contain(f, shape, hash_key(base + std::to_string(k), 17, 1))) ++fn;
      if (index::bloom_may_contain(f, shape, hash_key(base + "n" + std::to_string(k), 17, 1))) ++fp;
      ++probes;
    }
  }
  const double fpr = static_cast<double>(fp) / static_cast<double>(probes);
  v.check(fpr >= x / 2 && fpr <= 2 * x, "fpr " + num(fpr) + " over " + std::to_string(probes));
  v.check(fn == 0, "false negatives " + std::to_string(fn));

  const harness::RunConfig c = cfg(R"({
    "engine": "nemo", "seed": 5,
    "device": {"page_size": 4096, "pages_per_zone": 16},
    "nemo": {"sets_per_sg": 16, "sg_count_on_flash": 350, "sgs_per_index_group": 50, "flush_threshold": 1},
    "workload": {"alpha": 1.2, "keyspace": 1000000, "op_count": 1000}
  })");
  const double pages = harness::cold_lookup_index_pages(c);
  v.check(pages == 7, "cold lookup pages " + num(pages));
  return v;
}

// 8. Paged lookup cost and the filter-size optimizer.
Verdict tradeoff() {
  Verdict v;
  const double c3 = model::pbfg_cost_paged(350, model::filters_per_page(0.001, 40, 4096), 0.001);
  const double c4 = model::pbfg_cost_paged(350, model::filters_per_page(0.0001, 40, 4096), 0.0001);
  v.check(std::fabs(c3 - 8.35) <= 0.01, "cost(1e-3) " + num(c3));
  v.check(std::fabs(c4 - 10.03) <= 0.01, "cost(1e-4) " + num(c4));
  const model::BfChoice pick = model::optimal_bf_config(350, 246, {0.0001, 0.001});
  v.check(pick.x == 0.001, "optimizer picks " + num(pick.x));

  bool same = true;
  const std::vector<double> grid = model::log_grid();
  for (double n : {10.0, 100.0, 350.0, 1000.0, 5000.0}) {
    for (double s : {64.0, 246.0, 1000.0}) {
      model::BfChoice best{0, 0, INFINITY};
      for (double x : grid) {
        const double o = model::bf_bits_per_object(x);
        const double cost = n * o / (8 * s) + 1 + (n - 1) * x;
        if (cost < best.cost) best = {x, o, cost};
      }
      same = same && model::optimal_bf_config(n, s, grid).x == best.x;
    }
  }
  v.check(same, "argmin equals grid scan");
  return v;
}

// 9. Index memory per object with the pool full.
Verdict memory_accounting() {
  Verdict v;
  const harness::RunConfig c = cfg(R"({
    "engine": "nemo", "seed": 11,
    "device": {"page_size": 4096, "pages_per_zone": 16},
    "nemo": {"sets_per_sg": 16, "sg_count_on_flash": 950, "sgs_per_index_group": 50, "flush_threshold": 1},
    "workload": {"alpha": 1.2, "keyspace": 20000000, "op_count": 3500000, "get_fraction": 0.5,
                 "value_size": {"distribution": "fixed", "bytes": 81}}
  })");
  harness::Simulation sim(c);
  workload::WorkloadGenerator gen(c.zipf, c.sizes);
  workload::TraceRecord r;
  while (gen.next(r)) sim.apply(r);
  SetGroupEngine& e = *sim.set_group();
  const MemoryBreakdown m = e.memory();
  const double filt = m.per_object(m.cached_filter_bits);
  const double hot = m.per_object(m.hotness_bits);
  const double buf = m.per_object(m.index_buffer_bits);
  v.check(e.live_sgs() == c.set_group.sg_count_on_flash, "live sgs " + std::to_string(e.live_sgs()));
  v.check(std::fabs(m.total_per_object() - 8.3) <= 0.5, "bits/object " + num(m.total_per_object()));
  v.check(std::fabs(filt - 7.2) <= 0.3, "cached filters " + num(filt));
  v.check(std::fabs(hot - 0.3) <= 0.1, "hotness " + num(hot));
  v.check(std::fabs(buf - 0.8) <= 0.3, "group buffer " + num(buf));
  return v;
}

// 10. Share of lookups that read the index pool, half the index cached.
Verdict index_cache_skew() {
  Verdict v;
  const harness::RunConfig c = cfg(R"({
    "engine": "nemo", "seed": 11,
    "device": {"page_size": 4096, "pages_per_zone": 16384},
    "nemo": {"sets_per_sg": 16384, "sg_count_on_flash": 10, "sgs_per_index_group": 5,
             "flush_threshold": 16, "objects_per_set_target": 4, "cached_pbfg_fraction": 0.5},
    "workload": {"alpha": 1.2, "keyspace": 20000000, "op_count": 12000000,
                 "value_size": {"distribution": "fixed", "bytes": 950}},
    "run": {"snapshot_interval_ops": 2000000, "steady_state_fraction": 0.6}
  })");
  const harness::RunResult res = harness::run(c, nullptr);
  const double frac = value_or_nan(res.steady.metrics.index_pool_read_fraction);
  v.check(res.steady_counters.index_bytes_written > 0, "index groups flushed in window");
  v.check(frac <= 0.15, "index pool fraction " + num(frac));
  return v;
}

// 11. Device write amplification.
Verdict device_layer() {
  Verdict v;
  const double sg = value_or_nan(ladder_results().at("B+P+W").final_row.metrics.dlwa);
  v.check(sg == 1.0, "set-group dlwa " + num(sg));
  const harness::RunResult log = harness::run(cfg(R"({
    "engine": "log", "seed": 3,
    "device": {"page_size": 4096, "pages_per_zone": 256, "zone_count": 64},
    "workload": {"alpha": 0, "keyspace": 4000000000, "op_count": 1000000, "get_fraction": 0,
                 "value_size": {"distribution": "fixed", "bytes": 228}},
    "run": {"snapshot_interval_ops": 1000000}
  })"), nullptr);
  const double lg = value_or_nan(log.final_row.metrics.dlwa);
  v.check(lg == 1.0, "log dlwa " + num(lg));
  const double fw = value_or_nan(hier_2gb().final_row.metrics.dlwa);
  v.check(fw == 1.0, "fairywren dlwa " + num(fw));
  const harness::RunResult sa = harness::run(cfg(R"({
    "engine": "setassoc", "seed": 3,
    "device": {"page_size": 4096, "pages_per_zone": 256, "zone_count": 64, "op_fraction": 0.5},
    "workload": {"alpha": 0, "keyspace": 400000, "op_count": 1500000, "get_fraction": 0,
                 "value_size": {"distribution": "fixed", "bytes": 228}},
    "run": {"snapshot_interval_ops": 1500000}
  })"), nullptr);
  const double sd = value_or_nan(sa.steady.metrics.dlwa);
  v.check(sd >= 1.0 && sd < 1.5, "setassoc dlwa " + num(sd));
  return v;
}

std::string run_csv(const json& doc) {
  std::ostringstream out;
  harness::run(harness::parse_config(doc), &out);
  return out.str();
}

// 12. Same seed, same bytes.
Verdict determinism() {
  Verdict v;
  const json base = json::parse(R"({
    "engine": "nemo",
    "device": {"page_size": 4096, "pages_per_zone": 64},
    "nemo": {"sets_per_sg": 64, "sg_count_on_flash": 100, "sgs_per_index_group": 50, "flush_threshold": 1},
    "workload": {"alpha": 1.2, "keyspace": 1000000, "op_count": 300000},
    "run": {"snapshot_interval_ops": 50000}
  })");
  const json a = harness::with_override(base, "seed", 42);
  const std::string first = run_csv(a);
  const std::string second = run_csv(a);
  v.check(first == second, "nemo rerun identical (" + std::to_string(first.size()) + " bytes)");
  v.check(run_csv(harness::with_override(base, "seed", 43)) != first, "other seed differs");

  json hier = json::parse(R"({
    "engine": "hier_kangaroo",
    "device": {"page_size": 4096, "pages_per_zone": 64, "zone_count": 64},
    "workload": {"alpha": 0.9, "keyspace": 2000000, "op_count": 200000},
    "run": {"snapshot_interval_ops": 50000}
  })");
  hier = harness::with_override(hier, "seed", 42);
  v.check(run_csv(hier) == run_csv(hier), "kangaroo rerun identical");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"model_arithmetic", model_arithmetic},
      {"hier_model_validation", hier_model},
      {"passive_share_vs_op", p_monotonic},
      {"fill_rate_ladder", fill_ladder},
      {"wa_identity", wa_identity},
      {"head_to_head", head_to_head},
      {"pbfg_calibration", pbfg_calibration},
      {"lookup_cost_tradeoff", tradeoff},
      {"memory_accounting", memory_accounting},
      {"index_cache_skew", index_cache_skew},
      {"device_layer", device_layer},
      {"determinism", determinism},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s %2d %-22s %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", n, name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
