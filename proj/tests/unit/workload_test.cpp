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
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <unistd.h>

#include "sgc/core/error.hpp"
#include "sgc/workload/workload.hpp"

using namespace sgc;
using namespace sgc::workload;

namespace {

std::string temp_path(const char* tag) {
  return ::testing::TempDir() + "sgc_" + tag + "_" + std::to_string(::getpid()) + ".csv";
}

std::string write_file(const char* tag, const std::string& body) {
  const std::string p = temp_path(tag);
  std::ofstream(p) << body;
  return p;
}

std::size_t parse_error_line(const std::string& path) {
  try {
    TraceReader r(path);
    TraceRecord rec;
    while (r.next(rec)) {
    }
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

long rss_kb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmRSS:", 0) == 0) return std::stol(line.substr(6));
  }
  return -1;
}

std::vector<std::uint64_t> frequencies(double alpha, std::uint64_t n, std::uint64_t draws, std::uint64_t seed) {
  ZipfSampler z(n, alpha);
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> f(n);
  for (std::uint64_t i = 0; i < draws; ++i) ++f[z.sample(rng) - 1];
  return f;
}

}  // namespace

TEST(Zipf, UniformWithinFivePercent) {
  // 10^6 draws over 1000 keys: goodness of fit at the 0.001 level.
  const auto f = frequencies(0.0, 1000, 1000000, 11);
  double chi2 = 0;
  for (std::uint64_t c : f) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  const double k = 999, z = 3.090232;
  const double crit = k * std::pow(1 - 2 / (9 * k) + z * std::sqrt(2 / (9 * k)), 3);
  EXPECT_LT(chi2, crit);
  // 10^7 draws put +-5% at five standard deviations for every key.
  const auto g = frequencies(0.0, 1000, 10000000, 12);
  for (std::uint64_t c : g) {
    EXPECT_GE(c, 9500u);
    EXPECT_LE(c, 10500u);
  }
}

TEST(Zipf, TopFifthCarriesSeventyPercent) {
  const std::uint64_t n = 100000, draws = 1000000;
  const auto f = frequencies(1.21, n, draws, 3);
  const double top = std::accumulate(f.begin(), f.begin() + n / 5, 0.0);
  EXPECT_GE(top / draws, 0.70);
  // Exact mass of the top ranks as an oracle for the sampler itself.
  double head = 0, all = 0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const double p = std::pow(static_cast<double>(k), -1.21);
    all += p;
    if (k <= n / 5) head += p;
  }
  EXPECT_NEAR(top / draws, head / all, 0.003);
}

TEST(Zipf, RankFrequencySlope) {
  const auto f = frequencies(1.2, 10000, 2000000, 9);
  // Least squares of log f against log rank over the head.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = 100;
  for (int k = 1; k <= m; ++k) {
    const double x = std::log(k), y = std::log(static_cast<double>(f[k - 1]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  EXPECT_NEAR(slope, -1.2, 0.05);
}

TEST(Zipf, SingleKey) {
  ZipfSampler z(1, 1.5);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(z.sample(rng), 1u);
}

TEST(Workload, SameSeedSameStream) {
  ZipfSpec spec;
  spec.alpha = 0.9;
  spec.keyspace = 5000;
  spec.op_count = 20000;
  spec.get_fraction = 0.7;
  spec.seed = 42;
  WorkloadGenerator a(spec, SizeSpec{}), b(spec, SizeSpec{});
  TraceRecord ra, rb;
  std::uint64_t n = 0, gets = 0;
  while (a.next(ra)) {
    ASSERT_TRUE(b.next(rb));
    ASSERT_EQ(ra, rb);
    gets += ra.op == Op::kGet;
    ++n;
  }
  EXPECT_FALSE(b.next(rb));
  EXPECT_EQ(n, 20000u);
  EXPECT_NEAR(static_cast<double>(gets) / n, 0.7, 0.02);

  spec.seed = 43;
  WorkloadGenerator c(spec, SizeSpec{});
  WorkloadGenerator d(ZipfSpec{spec.alpha, spec.keyspace, spec.op_count, spec.get_fraction, 42, 1}, SizeSpec{});
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    c.next(ra);
    d.next(rb);
    same += ra == rb;
  }
  EXPECT_LT(same, 1000);
}

TEST(Workload, ShardsAreDisjointAndRoundRobin) {
  ZipfSpec spec;
  spec.keyspace = 10;
  spec.op_count = 12;
  spec.key_shards = 4;
  WorkloadGenerator g(spec, SizeSpec{});
  TraceRecord r;
  for (int i = 0; i < 12; ++i) {
    ASSERT_TRUE(g.next(r));
    EXPECT_EQ(r.key.rfind("s" + std::to_string(i % 4) + ":k", 0), 0u) << r.key;
  }
}

TEST(Workload, SizesClampedAndStablePerKey) {
  SizeSpec s;
  std::map<std::uint64_t, std::uint32_t> seen;
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const std::uint32_t v = s.value_size_for(i, 7);
    ASSERT_GE(v, s.min);
    ASSERT_LE(v, s.max);
    sum += v;
    if (i < 100) seen[i] = v;
  }
  for (auto [id, v] : seen) EXPECT_EQ(s.value_size_for(id, 7), v);
  // Mean of normal(250, 200) clamped below at 16 (the upper clamp is ~16 sigma away).
  const double a = (16.0 - 250.0) / 200.0;
  const double cdf = 0.5 * std::erfc(-a / std::sqrt(2.0));
  const double pdf = std::exp(-a * a / 2) / std::sqrt(2 * M_PI);
  EXPECT_NEAR(sum / n, 16 * cdf + 250 * (1 - cdf) + 200 * pdf, 1.5);

  SizeSpec fixed;
  fixed.kind = SizeSpec::Kind::kFixed;
  fixed.fixed = 228;
  EXPECT_EQ(fixed.value_size_for(123, 1), 228u);

  SizeSpec bad;
  bad.mean = 10;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Workload, SpecValidation) {
  ZipfSpec z;
  z.alpha = -1;
  EXPECT_THROW(z.validate(), ConfigError);
  z.alpha = 1;
  z.keyspace = 0;
  EXPECT_THROW(z.validate(), ConfigError);
}

TEST(Trace, ThreeRecordsInOrder) {
  const auto p = write_file("ok", "op,key,key_size,value_size\nget,a,4,100\nset,bb,2,7\r\n\nget,c,1,1\n");
  TraceReader r(p);
  TraceRecord rec;
  ASSERT_TRUE(r.next(rec));
  EXPECT_EQ(rec, (TraceRecord{Op::kGet, "a", 4, 100}));
  EXPECT_EQ(materialize_key(rec), "a###");
  ASSERT_TRUE(r.next(rec));
  EXPECT_EQ(rec, (TraceRecord{Op::kSet, "bb", 2, 7}));
  ASSERT_TRUE(r.next(rec));
  EXPECT_EQ(rec, (TraceRecord{Op::kGet, "c", 1, 1}));
  EXPECT_FALSE(r.next(rec));
  std::remove(p.c_str());
}

TEST(Trace, Errors) {
  EXPECT_THROW(TraceReader("/nonexistent/trace.csv"), FileNotFound);
  const std::string h = "op,key,key_size,value_size\n";
  const std::pair<std::string, std::size_t> cases[] = {
      {h + "get,a,1,10\nset,b,1,-5\n", 3},
      {h + "get,a,1,10\nget,a,1\n", 3},
      {h + "put,a,1,10\n", 2},
      {h + "get,,1,10\n", 2},
      {h + "get,abc,2,10\n", 2},
      {h + "get,a,1,10,3\n", 2},
      {h + "get,a,1,0\n", 2},
      {h + "get,a,x,4\n", 2},
      {"key,op\nget,a,1,1\n", 1},
  };
  for (const auto& [body, line] : cases) {
    const auto p = write_file("bad", body);
    EXPECT_EQ(parse_error_line(p), line) << body;
    std::remove(p.c_str());
  }
}

TEST(Trace, StreamsWithBoundedMemory) {
  const auto p = temp_path("big");
  {
    std::ofstream out(p);
    out << "op,key,key_size,value_size\n";
    for (int i = 0; i < 1500000; ++i) out << "get,key" << i << ",24,250\n";
  }
  const long before = rss_kb();
  TraceReader r(p);
  TraceRecord rec;
  std::uint64_t n = 0;
  long peak = before;
  while (r.next(rec)) {
    if (++n % 100000 == 0) peak = std::max(peak, rss_kb());
  }
  EXPECT_EQ(n, 1500000u);
  // The file is ~35 MB; reading it must not grow the process by more than a few MB.
  EXPECT_LT(peak - before, 4096);
  std::remove(p.c_str());
}

TEST(Filler, DeterministicAndSized) {
  EXPECT_EQ(filler_value("k", 50), filler_value("k", 50));
  EXPECT_EQ(filler_value("k", 50).size(), 50u);
  EXPECT_NE(filler_value("k", 50), filler_value("j", 50));
  EXPECT_NE(filler_value("k", 50).substr(0, 49), filler_value("k", 49));
}
