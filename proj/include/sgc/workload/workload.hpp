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
#include <fstream>
#include <random>
#include <string>
#include <string_view>

namespace sgc::workload {

enum class Op { kGet, kSet };

struct TraceRecord {
  Op op = Op::kGet;
  std::string key;
  std::uint32_t key_size = 0;
  std::uint32_t value_size = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct ZipfSpec {
  double alpha = 1.0;
  std::uint64_t keyspace = 1000000;
  std::uint64_t op_count = 1000000;
  double get_fraction = 1.0;
  std::uint64_t seed = 1;
  std::uint32_t key_shards = 1;  // disjoint key-prefix spaces, round-robin

  void validate() const;  // throws ConfigError
};

struct SizeSpec {
  enum class Kind { kNormal, kFixed };
  Kind kind = Kind::kNormal;
  double mean = 250;
  double stddev = 200;
  std::uint32_t min = 16;
  std::uint32_t max = 3500;
  std::uint32_t fixed = 250;

  void validate() const;  // throws ConfigError

  // Value size for a key id; the same id always gets the same size.
  std::uint32_t value_size_for(std::uint64_t key_id, std::uint64_t seed) const;
};

// Rejection-inversion sampler (Hormann and Derflinger) over ranks 1..n with
// P(k) proportional to k^-alpha. alpha = 0 samples uniformly.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double alpha);

  std::uint64_t sample(std::mt19937_64& rng) const;

 private:
  double h(double x) const;
  double h_integral(double x) const;
  double h_integral_inverse(double x) const;

  std::uint64_t n_;
  double alpha_;
  double h_integral_x1_;
  double h_integral_n_;
  double s_;
};

// Uniform double in [0, 1) from 53 random bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class WorkloadGenerator {
 public:
  WorkloadGenerator(ZipfSpec spec, SizeSpec sizes);

  // False once op_count records have been produced.
  bool next(TraceRecord& out);
  std::uint64_t produced() const { return produced_; }

  static std::string key_name(std::uint32_t shard, std::uint64_t key_id);

 private:
  ZipfSpec spec_;
  SizeSpec sizes_;
  ZipfSampler zipf_;
  std::mt19937_64 rng_;
  std::uint64_t produced_ = 0;
};

// Streams `op,key,key_size,value_size` records after a header line.
class TraceReader {
 public:
  explicit TraceReader(const std::string& path);  // throws FileNotFound

  // False at end of file; throws ParseError on a malformed line.
  bool next(TraceRecord& out);
  std::size_t line() const { return line_; }

 private:
  std::ifstream in_;
  std::string buf_;
  std::size_t line_ = 0;
};

// Replay key: the trace key padded with '#' up to key_size.
std::string materialize_key(const TraceRecord& r);
// Deterministic filler bytes derived from the key and size.
std::string filler_value(std::string_view key, std::uint32_t size);

}  // namespace sgc::workload
