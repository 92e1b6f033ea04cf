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


#include "sgc/index/bloom.hpp"

#include <algorithm>
#include <cmath>

#include "sgc/core/error.hpp"

namespace sgc::index {

double bf_bits_per_object(double fpr) {
  if (!(fpr > 0.0 && fpr < 1.0)) throw BadParams("false-positive rate must lie in (0, 1)");
  const double ln2 = std::log(2.0);
  return -std::log(fpr) / (ln2 * ln2);
}

FilterShape filter_shape(double fpr, std::uint32_t objects) {
  if (objects == 0) throw BadParams("filter needs a positive design load");
  const double raw = std::ceil(objects * bf_bits_per_object(fpr) - 1e-9);
  FilterShape s;
  s.bits = static_cast<std::uint32_t>((static_cast<std::uint64_t>(raw) + 7) / 8 * 8);
  const double k = std::round(static_cast<double>(s.bits) / objects * std::log(2.0));
  s.probes = static_cast<std::uint32_t>(std::max(1.0, k));
  return s;
}

void bloom_add(std::span<std::byte> filter, const FilterShape& shape, const KeyDigest& digest) {
  for (std::uint32_t i = 0; i < shape.probes; ++i) {
    const std::uint32_t bit = digest.probe(i, shape.bits);
    filter[bit >> 3] |= std::byte{static_cast<std::uint8_t>(1u << (bit & 7))};
  }
}

bool bloom_may_contain(std::span<const std::byte> filter, const FilterShape& shape,
                       const KeyDigest& digest) {
  for (std::uint32_t i = 0; i < shape.probes; ++i) {
    const std::uint32_t bit = digest.probe(i, shape.bits);
    if ((filter[bit >> 3] & std::byte{static_cast<std::uint8_t>(1u << (bit & 7))}) == std::byte{0}) {
      return false;
    }
  }
  return true;
}

}  // namespace sgc::index
