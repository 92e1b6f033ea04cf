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


#include "sgc/engine/hotness.hpp"

#include <cmath>

#include "sgc/core/error.hpp"

namespace sgc {

HotnessTracker::HotnessTracker(std::uint32_t pool_sgs, double window_fraction)
    : pool_sgs_(pool_sgs) {
  if (pool_sgs == 0) throw ConfigError("hotness: pool size must be positive");
  if (!(window_fraction >= 0.0 && window_fraction <= 1.0)) {
    throw ConfigError("nemo.hotness_window_fraction: must lie in [0, 1]");
  }
  window_sgs_ = static_cast<std::uint32_t>(std::ceil(window_fraction * pool_sgs - 1e-9));
}

void HotnessTracker::on_flush(std::uint64_t sg_sequence, std::vector<std::uint16_t> set_counts) {
  pending_[sg_sequence] = std::move(set_counts);
  newest_ = sg_sequence;
  // SG with age a = newest - seq is in the window iff a >= pool - window.
  const std::uint64_t young = pool_sgs_ - window_sgs_;
  while (!pending_.empty() && newest_ - pending_.begin()->first >= young && window_sgs_ > 0) {
    admit(pending_.begin()->first);
  }
}

void HotnessTracker::admit(std::uint64_t sg_sequence) {
  auto node = pending_.extract(sg_sequence);
  SgBits b;
  b.set_start.reserve(node.mapped().size() + 1);
  std::uint32_t total = 0;
  for (std::uint16_t c : node.mapped()) {
    b.set_start.push_back(total);
    total += c;
  }
  b.set_start.push_back(total);
  b.bits.assign(total, false);
  allocated_bits_ += total;
  bits_.emplace(sg_sequence, std::move(b));
}

void HotnessTracker::on_evict(std::uint64_t sg_sequence) {
  pending_.erase(sg_sequence);
  auto it = bits_.find(sg_sequence);
  if (it == bits_.end()) return;
  allocated_bits_ -= it->second.bits.size();
  bits_.erase(it);
}

std::uint64_t HotnessTracker::index_of(const SgBits& b, const ObjectLocator& loc, bool& ok) {
  ok = false;
  if (loc.offset + 1 >= b.set_start.size()) return 0;
  const std::uint64_t i = std::uint64_t{b.set_start[loc.offset]} + loc.slot;
  if (i >= b.set_start[loc.offset + 1]) return 0;
  ok = true;
  return i;
}

void HotnessTracker::mark_access(const ObjectLocator& loc) {
  auto it = bits_.find(loc.sg_sequence);
  if (it == bits_.end()) return;
  bool ok = false;
  const std::uint64_t i = index_of(it->second, loc, ok);
  if (ok) it->second.bits[i] = true;
}

bool HotnessTracker::bit(const ObjectLocator& loc) const {
  auto it = bits_.find(loc.sg_sequence);
  if (it == bits_.end()) return false;
  bool ok = false;
  const std::uint64_t i = index_of(it->second, loc, ok);
  return ok && it->second.bits[i];
}

std::uint64_t HotnessTracker::cool(const ResidencyFn& resident) {
  std::uint64_t cleared = 0;
  for (auto& [seq, b] : bits_) {
    const auto sets = static_cast<std::uint32_t>(b.set_start.size() - 1);
    for (std::uint32_t off = 0; off < sets; ++off) {
      const std::uint32_t lo = b.set_start[off], hi = b.set_start[off + 1];
      if (lo == hi || resident(seq, off)) continue;
      for (std::uint32_t i = lo; i < hi; ++i) {
        if (b.bits[i]) {
          b.bits[i] = false;
          ++cleared;
        }
      }
    }
  }
  return cleared;
}

std::uint32_t CoolingClock::add(std::uint64_t bytes) {
  if (period_ == 0) return 0;
  acc_ += bytes;
  std::uint32_t fired = 0;
  while (acc_ >= period_) {
    acc_ -= period_;
    ++fired;
  }
  return fired;
}

}  // namespace sgc
