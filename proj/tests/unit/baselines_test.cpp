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


#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "sgc/baseline/baselines.hpp"
#include "sgc/core/error.hpp"
#include "sgc/model/analytic.hpp"
#include "sgc/workload/workload.hpp"

using namespace sgc;

namespace {

std::string key_of(std::uint64_t i) { return "key:" + std::to_string(i); }

// Uniform set-only traffic over a huge key space: every insert is new.
template <typename Engine>
std::uint64_t fill_unique(Engine& e, std::uint64_t ops, std::uint32_t value_bytes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t bytes = 0;
  for (std::uint64_t i = 0; i < ops; ++i) {
    const std::string k = "u" + std::to_string(rng());
    e.set(k, std::string(value_bytes, 'v'));
    bytes += k.size() + value_bytes + kObjectHeaderBytes;
  }
  return bytes;
}

}  // namespace

TEST(LogEngine, NewestValueAndExactIndex) {
  flash::ZonedDevice dev({4096, 16, 8});
  LogEngine e(dev);
  e.set("a", "1");
  e.set("b", "2");
  e.set("a", "3");
  EXPECT_EQ(*e.get("a"), "3");
  EXPECT_EQ(*e.get("b"), "2");
  EXPECT_FALSE(e.get("c"));
  EXPECT_EQ(e.indexed_objects(), 2u);
  EXPECT_THROW(e.set("big", std::string(5000, 'x')), ObjectTooLarge);
}

TEST(LogEngine, WrapKeepsOneEntryPerLiveObject) {
  flash::ZonedDevice dev({4096, 16, 8});
  LogEngine e(dev);
  const int n = 20000;
  for (int i = 0; i < n; ++i) e.set(key_of(i), std::string(200, 'x'));
  // Capacity is 8 zones of 16 pages; everything older has been dropped.
  const std::uint64_t per_page = 4092 / (200 + 6 + 9);
  EXPECT_LE(e.indexed_objects(), 8 * 16 * per_page + per_page);
  EXPECT_GE(e.indexed_objects(), 7 * 16 * (per_page - 1));
  std::uint64_t hits = 0;
  for (int i = 0; i < n; ++i) hits += e.get(key_of(i)).has_value();
  EXPECT_EQ(hits, e.indexed_objects());
  EXPECT_TRUE(e.get(key_of(n - 1)));
  EXPECT_FALSE(e.get(key_of(0)));
}

TEST(LogEngine, WaNearOneOnSmallObjects) {
  flash::ZonedDevice dev({4096, 64, 16});
  LogEngine e(dev);
  fill_unique(e, 100000, 228, 1);
  const EngineMetrics m = derive_metrics(EngineKind::kLog, e.counters(), 4096);
  EXPECT_LE(*m.wa_data, 1.1);
  EXPECT_NEAR(*m.wa_data, 1.0 / *m.mean_fill_rate, 0.02 / *m.mean_fill_rate);
  EXPECT_EQ(*m.dlwa, 1.0);
  EXPECT_FALSE(m.l2swa_p);
  EXPECT_FALSE(m.index_pool_read_fraction);
}

TEST(SetAssocEngine, OnePageWritePerInsert) {
  SetAssocEngine e({4096, 64, 32}, 0.25);
  EXPECT_EQ(e.sets_total(), static_cast<std::uint64_t>(std::floor(0.75 * 64 * 32)));
  std::uint64_t bytes = 0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const std::string k = key_of(i);
    const std::string v(200 - k.size() - kObjectHeaderBytes, 'z');
    e.set(k, v);
    bytes += 200;
  }
  EXPECT_EQ(e.io().host_pages_written, static_cast<std::uint64_t>(n));
  const EngineMetrics m = derive_metrics(EngineKind::kSetAssoc, e.counters(), 4096);
  EXPECT_NEAR(*m.wa_data, 4096.0 / 200.0, 1e-9);  // 20.48
  EXPECT_FALSE(m.mean_fill_rate);
  EXPECT_TRUE(e.get(key_of(n - 1)));
  e.set(key_of(n - 1), "new");
  EXPECT_EQ(*e.get(key_of(n - 1)), "new");
  EXPECT_THROW(SetAssocEngine({4096, 64, 32}, 1.0), ConfigError);
}

TEST(SetAssocEngine, HalfOverProvisionedDlwa) {
  SetAssocEngine e({4096, 64, 64}, 0.5);
  fill_unique(e, 40 * e.sets_total(), 300, 9);
  const EngineMetrics m = derive_metrics(EngineKind::kSetAssoc, e.counters(), 4096);
  EXPECT_GT(*m.dlwa, 1.0);
  EXPECT_LT(*m.dlwa, 1.5);
}

TEST(HierEngine, Layout) {
  flash::ZonedDevice dev({4096, 64, 200});
  HierConfig c;
  HierEngine e(dev, c);
  EXPECT_EQ(e.log_zones(), 10u);
  EXPECT_EQ(e.log_pages(), 640u);
  EXPECT_EQ(e.set_pages_physical(), 190u * 64);
  EXPECT_EQ(e.usable_sets(), static_cast<std::uint64_t>(std::floor(0.95 * 190 * 64)));
  EXPECT_EQ(e.bucket_count(), e.usable_sets());
  HierConfig half = c;
  half.bucket_fraction = 0.5;
  flash::ZonedDevice dev2({4096, 64, 200});
  EXPECT_EQ(HierEngine(dev2, half).bucket_count(), static_cast<std::uint64_t>(std::round(0.5 * e.usable_sets())));
}

TEST(HierEngine, ConfigErrors) {
  flash::ZonedDevice dev({4096, 64, 40});
  HierConfig c;
  c.log_fraction = 0.01;  // rounds to zero zones
  EXPECT_THROW(HierEngine(dev, c), ConfigError);
  c = HierConfig{};
  c.op_fraction = 0.0;
  EXPECT_THROW(HierEngine(dev, c), ConfigError);
  c = HierConfig{};
  c.bucket_fraction = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(HierEngine, ReadsNewestAcrossTiers) {
  flash::ZonedDevice dev({4096, 16, 60});
  HierConfig c;
  c.log_fraction = 0.05;
  HierEngine e(dev, c);
  std::map<std::string, std::string> newest;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 60000; ++i) {
    const std::string k = key_of(rng() % 3000);
    const std::string v = std::to_string(i) + std::string(rng() % 300, 'q');
    e.set(k, v);
    newest[k] = v;
  }
  ASSERT_GT(e.counters().passive_set_writes, 0u);
  std::uint64_t hits = 0;
  for (const auto& [k, v] : newest) {
    const auto got = e.get(k);
    if (!got) continue;
    ++hits;
    EXPECT_EQ(*got, v) << k;
  }
  EXPECT_GT(hits, newest.size() / 2);
}

namespace {

struct HierRun {
  EngineMetrics m;
  double list_len = 0;
  double eq6 = 0;
  double eq5 = 0;
  flash::IoCounters io;
};

HierRun run_hier(HierMode mode, double x, std::uint64_t ops) {
  flash::ZonedDevice dev({4096, 64, 400});
  HierConfig c;
  c.mode = mode;
  c.op_fraction = x;
  HierEngine e(dev, c);
  const std::uint64_t warm = ops / 2;
  const std::uint64_t warm_bytes = fill_unique(e, warm, 228, 5);
  const EngineCounters half = e.counters();
  const std::uint64_t bytes = fill_unique(e, ops - warm, 228, 6);
  HierRun r;
  r.m = derive_metrics(e.kind(), e.counters() - half, 4096);
  r.list_len = e.mean_passive_list_length();
  model::HierParams h;
  h.s = static_cast<double>(warm_bytes + bytes) / ops;
  h.n_log = static_cast<double>(e.log_pages());
  h.n_set = static_cast<double>(e.set_pages_physical());
  h.x = x;
  r.eq6 = model::l2swa_p(h);
  r.eq5 = model::expected_list_len(h);
  r.io = e.io();
  return r;
}

}  // namespace

TEST(HierEngine, FairywrenMatchesModels) {
  const HierRun r = run_hier(HierMode::kFairywren, 0.05, 1500000);
  const double P = *r.m.l2swa_p, A = *r.m.l2swa_a, p = *r.m.passive_fraction;
  EXPECT_NEAR(P, r.eq6, 0.15 * r.eq6);
  EXPECT_GE(A / P, 1.7);
  EXPECT_LE(A / P, 2.3);
  EXPECT_NEAR(*r.m.l2swa, (2 - p) * P, 0.15 * (2 - p) * P);
  const double eq1 = 1 / *r.m.mean_fill_rate + *r.m.l2swa;
  EXPECT_NEAR(*r.m.wa_data, eq1, 0.15 * eq1);
  EXPECT_NEAR(r.list_len, r.eq5, 0.15 * r.eq5);
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
  EXPECT_EQ(r.io.device_copied_pages, 0u);
  EXPECT_EQ(*r.m.dlwa, 1.0);
}

TEST(HierEngine, KangarooCopiesDuringGc) {
  const HierRun r = run_hier(HierMode::kKangaroo, 0.05, 600000);
  EXPECT_GT(r.io.device_copied_pages, 0u);
  EXPECT_GT(*r.m.dlwa, 1.0);
  EXPECT_EQ(*r.m.passive_fraction, 1.0);  // no merge hook, so no active writes
  EXPECT_FALSE(r.m.l2swa_a);
}

TEST(HierEngine, PassiveShareGrowsWithOverProvisioning) {
  double prev = -1;
  for (double x : {0.05, 0.2, 0.35, 0.5}) {
    const double p = *run_hier(HierMode::kFairywren, x, 600000).m.passive_fraction;
    EXPECT_GT(p, prev) << "X=" << x;
    prev = p;
  }
}
