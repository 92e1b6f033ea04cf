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

#include <cstddef>
#include <cstdint>
#include <span>

#include "sgc/core/types.hpp"

namespace sgc::index {

// -ln(x) / ln(2)^2. Throws BadParams outside (0, 1).
double bf_bits_per_object(double fpr);

struct FilterShape {
  std::uint32_t bits = 0;    // multiple of 8
  std::uint32_t probes = 0;

  std::uint32_t bytes() const { return bits / 8; }
};

// Filter sized for `objects` entries at false-positive rate `fpr`.
FilterShape filter_shape(double fpr, std::uint32_t objects);

void bloom_add(std::span<std::byte> filter, const FilterShape& shape, const KeyDigest& digest);
bool bloom_may_contain(std::span<const std::byte> filter, const FilterShape& shape,
                       const KeyDigest& digest);

}  // namespace sgc::index
