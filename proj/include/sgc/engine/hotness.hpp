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
#include <functional>
#include <map>
#include <vector>

namespace sgc {

struct ObjectLocator {
  std::uint64_t sg_sequence = 0;
  std::uint32_t offset = 0;
  std::uint32_t slot = 0;
};

// One access bit per object for SGs in the oldest part of the pool. Young SGs
// carry no bits; a bitmap is allocated (zeroed) when an SG ages into the window.
class HotnessTracker {
 public:
  using ResidencyFn = std::function<bool(std::uint64_t sg_sequence, std::uint32_t offset)>;

  HotnessTracker(std::uint32_t pool_sgs, double window_fraction);

  // Number of SGs (the oldest ones) that carry bits once the pool is full.
  std::uint32_t window_sgs() const { return window_sgs_; }

  // Registers a flushed SG with its per-set object counts and advances the
  // window to the new newest sequence.
  void on_flush(std::uint64_t sg_sequence, std::vector<std::uint16_t> set_counts);
  void on_evict(std::uint64_t sg_sequence);

  bool in_window(std::uint64_t sg_sequence) const { return bits_.count(sg_sequence) != 0; }

  void mark_access(const ObjectLocator& loc);
  bool bit(const ObjectLocator& loc) const;

  // Clears every bit whose (SG, offset) filter page is not resident; returns
  // the number of set bits cleared.
  std::uint64_t cool(const ResidencyFn& resident);

  bool is_hot(const ObjectLocator& loc, const ResidencyFn& resident) const {
    return bit(loc) && resident(loc.sg_sequence, loc.offset);
  }

  std::uint64_t allocated_bits() const { return allocated_bits_; }

 private:
  struct SgBits {
    std::vector<std::uint32_t> set_start;  // prefix sums of set counts
    std::vector<bool> bits;
  };

  void admit(std::uint64_t sg_sequence);
  static std::uint64_t index_of(const SgBits& b, const ObjectLocator& loc, bool& ok);

  std::uint32_t pool_sgs_;
  std::uint32_t window_sgs_;
  std::uint64_t newest_ = 0;
  std::map<std::uint64_t, std::vector<std::uint16_t>> pending_;
  std::map<std::uint64_t, SgBits> bits_;
  std::uint64_t allocated_bits_ = 0;
};

// Fires once each time `period` bytes have accumulated.
class CoolingClock {
 public:
  explicit CoolingClock(std::uint64_t period_bytes) : period_(period_bytes) {}

  std::uint32_t add(std::uint64_t bytes);
  std::uint64_t period() const { return period_; }
  std::uint64_t accumulated() const { return acc_; }

 private:
  std::uint64_t period_;
  std::uint64_t acc_ = 0;
};

}  // namespace sgc
