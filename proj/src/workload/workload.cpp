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


#include "sgc/workload/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "sgc/core/error.hpp"
#include "sgc/core/hash.hpp"

namespace sgc::workload {

void ZipfSpec::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("workload.alpha: must be >= 0");
  if (keyspace == 0) throw ConfigError("workload.keyspace: must be >= 1");
  if (!(get_fraction >= 0.0 && get_fraction <= 1.0)) {
    throw ConfigError("workload.get_fraction: must lie in [0, 1]");
  }
  if (key_shards == 0) throw ConfigError("workload.key_shards: must be >= 1");
}

void SizeSpec::validate() const {
  if (kind == Kind::kFixed) {
    if (fixed == 0) throw ConfigError("workload.value_size.bytes: must be positive");
    return;
  }
  if (min == 0 || min > max) throw ConfigError("workload.value_size: need 0 < min <= max");
  if (!(mean >= min && mean <= max)) throw ConfigError("workload.value_size.mean: outside [min, max]");
  if (!(stddev >= 0)) throw ConfigError("workload.value_size.stddev: must be >= 0");
}

std::uint32_t SizeSpec::value_size_for(std::uint64_t key_id, std::uint64_t seed) const {
  if (kind == Kind::kFixed) return fixed;
  const std::uint64_t a = mix64(key_id ^ mix64(seed));
  const std::uint64_t b = mix64(a);
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double v = std::round(mean + stddev * z);
  return static_cast<std::uint32_t>(std::clamp(v, static_cast<double>(min), static_cast<double>(max)));
}

namespace {

double helper1(double x) {
  return std::abs(x) > 1e-8 ? std::log1p(x) / x : 1 - x * (0.5 - x * (1.0 / 3 - 0.25 * x));
}

double helper2(double x) {
  return std::abs(x) > 1e-8 ? std::expm1(x) / x : 1 + x * 0.5 * (1 + x * (1.0 / 3) * (1 + 0.25 * x));
}

}  // namespace

ZipfSampler::ZipfSampler(std::uint64_t n, double alpha) : n_(n), alpha_(alpha) {
  if (n == 0) throw ConfigError("workload.keyspace: must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("workload.alpha: must be >= 0");
  if (alpha_ > 0) {
    h_integral_x1_ = h_integral(1.5) - 1;
    h_integral_n_ = h_integral(static_cast<double>(n_) + 0.5);
    s_ = 2 - h_integral_inverse(h_integral(2.5) - h(2));
  }
}

double ZipfSampler::h(double x) const { return std::exp(-alpha_ * std::log(x)); }

double ZipfSampler::h_integral(double x) const {
  const double log_x = std::log(x);
  return helper2((1 - alpha_) * log_x) * log_x;
}

double ZipfSampler::h_integral_inverse(double x) const {
  double t = x * (1 - alpha_);
  if (t < -1) t = -1;
  return std::exp(helper1(t) * x);
}

std::uint64_t ZipfSampler::sample(std::mt19937_64& rng) const {
  if (alpha_ == 0) return 1 + static_cast<std::uint64_t>(unit_double(rng) * static_cast<double>(n_));
  for (;;) {
    const double u = h_integral_n_ + unit_double(rng) * (h_integral_x1_ - h_integral_n_);
    const double x = h_integral_inverse(u);
    double kd = std::floor(x + 0.5);
    kd = std::clamp(kd, 1.0, static_cast<double>(n_));
    if (kd - x <= s_ || u >= h_integral(kd + 0.5) - h(kd)) return static_cast<std::uint64_t>(kd);
  }
}

WorkloadGenerator::WorkloadGenerator(ZipfSpec spec, SizeSpec sizes)
    : spec_(spec), sizes_(sizes), zipf_((spec.validate(), spec.keyspace), spec.alpha), rng_(spec.seed) {
  sizes_.validate();
}

std::string WorkloadGenerator::key_name(std::uint32_t shard, std::uint64_t key_id) {
  std::string k = "s";
  k += std::to_string(shard);
  k += ":k";
  k += std::to_string(key_id);
  return k;
}

bool WorkloadGenerator::next(TraceRecord& out) {
  if (produced_ >= spec_.op_count) return false;
  const auto shard = static_cast<std::uint32_t>(produced_ % spec_.key_shards);
  const std::uint64_t id = zipf_.sample(rng_) - 1;
  const bool get = spec_.get_fraction >= 1.0 || unit_double(rng_) < spec_.get_fraction;
  out.op = get ? Op::kGet : Op::kSet;
  out.key = key_name(shard, id);
  out.key_size = static_cast<std::uint32_t>(out.key.size());
  out.value_size = sizes_.value_size_for(id * spec_.key_shards + shard, spec_.seed);
  ++produced_;
  return true;
}

TraceReader::TraceReader(const std::string& path) : in_(path) {
  if (!in_) throw FileNotFound("cannot open trace file " + path);
  if (!std::getline(in_, buf_)) throw ParseError(1, "missing header line");
  line_ = 1;
  if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
  if (buf_ != "op,key,key_size,value_size") {
    throw ParseError(1, "expected header 'op,key,key_size,value_size'");
  }
}

namespace {

std::uint32_t parse_size(std::string_view field, std::size_t line, const char* name) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size() || v == 0 || v > 0xffffffffULL) {
    throw ParseError(line, std::string(name) + " must be a positive integer, got '" +
                               std::string(field) + "'");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

bool TraceReader::next(TraceRecord& out) {
  while (std::getline(in_, buf_)) {
    ++line_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    if (buf_.empty()) continue;
    std::string_view rest(buf_);
    std::string_view fields[4];
    for (int i = 0; i < 4; ++i) {
      const std::size_t comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos)) {
        throw ParseError(line_, "expected 4 comma-separated fields");
      }
      fields[i] = rest.substr(0, comma);
      if (i < 3) rest.remove_prefix(comma + 1);
    }
    if (fields[0] == "get") {
      out.op = Op::kGet;
    } else if (fields[0] == "set") {
      out.op = Op::kSet;
    } else {
      throw ParseError(line_, "op must be 'get' or 'set'");
    }
    if (fields[1].empty()) throw ParseError(line_, "empty key");
    out.key.assign(fields[1]);
    out.key_size = parse_size(fields[2], line_, "key_size");
    out.value_size = parse_size(fields[3], line_, "value_size");
    if (out.key_size < out.key.size()) throw ParseError(line_, "key_size shorter than key");
    return true;
  }
  return false;
}

std::string materialize_key(const TraceRecord& r) {
  std::string k = r.key;
  if (k.size() < r.key_size) k.resize(r.key_size, '#');
  return k;
}

std::string filler_value(std::string_view key, std::uint32_t size) {
  std::string v(size, '\0');
  std::uint64_t state = xxh64(key, size);
  for (std::uint32_t i = 0; i < size; ++i) {
    if (i % 8 == 0) state = mix64(state);
    v[i] = static_cast<char>('a' + ((state >> (8 * (i % 8))) & 0xff) % 26);
  }
  return v;
}

}  // namespace sgc::workload
