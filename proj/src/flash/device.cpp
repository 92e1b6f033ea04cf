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

#include "sgc/flash/device.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "sgc/core/error.hpp"

namespace sgc::flash {

void DeviceGeometry::validate() const {
  if (page_size == 0) throw ConfigError("device.page_size: must be positive");
  if (pages_per_zone == 0) throw ConfigError("device.pages_per_zone: must be positive");
  if (zone_count == 0) throw ConfigError("device.zone_count: must be positive");
}

ZonedDevice::ZonedDevice(DeviceGeometry geometry) : geometry_(geometry) {
  geometry_.validate();
  zones_.resize(geometry_.zone_count);
}

void ZonedDevice::check_zone(std::uint32_t zone) const {
  if (zone >= geometry_.zone_count) {
    throw BadAddress("zone " + std::to_string(zone) + " out of range");
  }
}

FlashAddress ZonedDevice::append_impl(std::uint32_t zone, std::span<const std::byte> data) {
  check_zone(zone);
  if (data.size() != geometry_.page_size) {
    throw std::invalid_argument("append: data must be exactly one page");
  }
  Zone& z = zones_[zone];
  if (z.write_pointer == geometry_.pages_per_zone) {
    throw ZoneFull("zone " + std::to_string(zone) + " is full");
  }
  if (!z.data) z.data = std::make_unique<std::byte[]>(geometry_.zone_bytes());
  std::memcpy(z.data.get() + std::uint64_t{z.write_pointer} * geometry_.page_size, data.data(),
              data.size());
  return FlashAddress{zone, z.write_pointer++};
}

FlashAddress ZonedDevice::append(std::uint32_t zone, std::span<const std::byte> data) {
  FlashAddress a = append_impl(zone, data);
  host_pages_written_.fetch_add(1, std::memory_order_relaxed);
  return a;
}

FlashAddress ZonedDevice::relocate(std::uint32_t zone, std::span<const std::byte> data) {
  FlashAddress a = append_impl(zone, data);
  device_copied_pages_.fetch_add(1, std::memory_order_relaxed);
  return a;
}

std::span<const std::byte> ZonedDevice::read(FlashAddress addr) {
  check_zone(addr.zone);
  if (addr.page >= geometry_.pages_per_zone) {
    throw BadAddress("page " + std::to_string(addr.page) + " out of range");
  }
  const Zone& z = zones_[addr.zone];
  if (addr.page >= z.write_pointer) {
    throw UnwrittenPage("page (" + std::to_string(addr.zone) + ", " + std::to_string(addr.page) +
                        ") not written since last reset");
  }
  pages_read_.fetch_add(1, std::memory_order_relaxed);
  return {z.data.get() + std::uint64_t{addr.page} * geometry_.page_size, geometry_.page_size};
}

void ZonedDevice::reset(std::uint32_t zone) {
  check_zone(zone);
  zones_[zone].data.reset();
  zones_[zone].write_pointer = 0;
  zones_erased_.fetch_add(1, std::memory_order_relaxed);
}

ZoneState ZonedDevice::zone_state(std::uint32_t zone) const {
  check_zone(zone);
  ZoneState s;
  s.write_pointer = zones_[zone].write_pointer;
  if (s.write_pointer == 0) {
    s.condition = ZoneCondition::kEmpty;
  } else if (s.write_pointer == geometry_.pages_per_zone) {
    s.condition = ZoneCondition::kFull;
  } else {
    s.condition = ZoneCondition::kOpen;
  }
  return s;
}

IoCounters ZonedDevice::counters() const {
  IoCounters c;
  c.host_pages_written = host_pages_written_.load(std::memory_order_relaxed);
  c.device_copied_pages = device_copied_pages_.load(std::memory_order_relaxed);
  c.pages_read = pages_read_.load(std::memory_order_relaxed);
  c.zones_erased = zones_erased_.load(std::memory_order_relaxed);
  return c;
}

// ---------------------------------------------------------------------------

PageMappedRegion::PageMappedRegion(ZonedDevice& device, std::uint32_t first_zone,
                                   std::uint32_t zone_count, std::uint64_t logical_pages,
                                   std::uint32_t low_watermark_zones)
    : device_(device),
      first_zone_(first_zone),
      zone_count_(zone_count),
      pages_per_zone_(device.geometry().pages_per_zone),
      low_watermark_(std::max<std::uint32_t>(low_watermark_zones, 1)),
      open_zone_(0) {
  if (zone_count == 0 || std::uint64_t{first_zone} + zone_count > device.geometry().zone_count) {
    throw ConfigError("ftl: zone range exceeds device");
  }
  if (logical_pages == 0 ||
      logical_pages > std::uint64_t{zone_count - 1} * pages_per_zone_) {
    throw ConfigError("ftl: logical capacity leaves no over-provisioned zone");
  }
  l2p_.assign(logical_pages, kUnmapped);
  p2l_.assign(std::uint64_t{zone_count} * pages_per_zone_, kUnmapped);
  valid_.assign(zone_count, 0);
  in_use_.assign(zone_count, false);
  for (std::uint32_t z = 0; z < zone_count; ++z) {
    if (device_.zone_state(first_zone + z).write_pointer != 0) device_.reset(first_zone + z);
    free_.push_back(z);
  }
  scratch_.resize(device.geometry().page_size);
}

bool PageMappedRegion::is_mapped(std::uint64_t lpn) const {
  return lpn < l2p_.size() && l2p_[lpn] != kUnmapped;
}

std::uint32_t PageMappedRegion::valid_pages_in_zone(std::uint32_t zone) const {
  return valid_.at(zone);
}

std::uint64_t PageMappedRegion::physical(FlashAddress a) const {
  return std::uint64_t{a.zone - first_zone_} * pages_per_zone_ + a.page;
}

void PageMappedRegion::ensure_open_zone() {
  if (has_open_ && device_.zone_state(first_zone_ + open_zone_).write_pointer < pages_per_zone_) {
    return;
  }
  if (free_.empty()) throw DeviceFullDeadlock("ftl: no free zone left");
  open_zone_ = free_.front();
  free_.pop_front();
  in_use_[open_zone_] = true;
  has_open_ = true;
}

FlashAddress PageMappedRegion::place(std::span<const std::byte> data, bool as_copy) {
  ensure_open_zone();
  const std::uint32_t zone = first_zone_ + open_zone_;
  return as_copy ? device_.relocate(zone, data) : device_.append(zone, data);
}

void PageMappedRegion::invalidate(std::uint64_t ppn) {
  p2l_[ppn] = kUnmapped;
  --valid_[ppn / pages_per_zone_];
}

void PageMappedRegion::maybe_collect() {
  if (collecting_) return;
  const bool needs_zone =
      !has_open_ || device_.zone_state(first_zone_ + open_zone_).write_pointer == pages_per_zone_;
  if (!needs_zone) return;
  while (free_.size() < low_watermark_) collect_once();
}

void PageMappedRegion::write(std::uint64_t lpn, std::span<const std::byte> data) {
  if (lpn >= l2p_.size()) throw BadAddress("ftl: logical page out of range");
  maybe_collect();
  const std::uint64_t ppn = physical(place(data, false));
  if (l2p_[lpn] != kUnmapped) invalidate(l2p_[lpn]);
  l2p_[lpn] = ppn;
  p2l_[ppn] = lpn;
  ++valid_[ppn / pages_per_zone_];
}

std::span<const std::byte> PageMappedRegion::read(std::uint64_t lpn) {
  if (lpn >= l2p_.size()) throw BadAddress("ftl: logical page out of range");
  const std::uint64_t ppn = l2p_[lpn];
  if (ppn == kUnmapped) throw UnwrittenPage("ftl: logical page never written");
  return device_.read(FlashAddress{first_zone_ + static_cast<std::uint32_t>(ppn / pages_per_zone_),
                                   static_cast<std::uint32_t>(ppn % pages_per_zone_)});
}

std::uint64_t PageMappedRegion::collect_once() {
  std::uint32_t victim = zone_count_;
  for (std::uint32_t z = 0; z < zone_count_; ++z) {
    if (!in_use_[z] || (has_open_ && z == open_zone_)) continue;
    if (victim == zone_count_ || valid_[z] < valid_[victim]) victim = z;
  }
  if (victim == zone_count_) throw DeviceFullDeadlock("ftl: no sealed zone to reclaim");
  if (valid_[victim] == pages_per_zone_) {
    throw DeviceFullDeadlock("ftl: every sealed zone is fully valid");
  }

  collecting_ = true;
  std::uint64_t copies = 0;
  const std::uint32_t zone = first_zone_ + victim;
  for (std::uint32_t p = 0; p < pages_per_zone_ && valid_[victim] > 0; ++p) {
    const std::uint64_t old_ppn = std::uint64_t{victim} * pages_per_zone_ + p;
    const std::uint64_t lpn = p2l_[old_ppn];
    if (lpn == kUnmapped) continue;
    const auto old_page = device_.read(FlashAddress{zone, p});
    FlashAddress dst;
    if (hook_ && hook_(lpn, old_page, scratch_)) {
      dst = place(scratch_, false);
    } else {
      dst = place(old_page, true);
      ++copies;
    }
    const std::uint64_t ppn = physical(dst);
    invalidate(old_ppn);
    l2p_[lpn] = ppn;
    p2l_[ppn] = lpn;
    ++valid_[ppn / pages_per_zone_];
  }
  collecting_ = false;

  device_.reset(zone);
  in_use_[victim] = false;
  free_.push_back(victim);
  ++gc_passes_;
  return copies;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t exposed_pages(const DeviceGeometry& g, double op_fraction) {
  if (!(op_fraction >= 0.0 && op_fraction < 1.0)) {
    throw ConfigError("device.op_fraction: must lie in [0, 1)");
  }
  return static_cast<std::uint64_t>(std::floor((1.0 - op_fraction) * static_cast<double>(g.total_pages())));
}

}  // namespace

FtlDevice::FtlDevice(DeviceGeometry geometry, double op_fraction, std::uint32_t low_watermark_zones)
    : device_(geometry) {
  region_ = std::make_unique<PageMappedRegion>(device_, 0, geometry.zone_count,
                                               exposed_pages(geometry, op_fraction),
                                               low_watermark_zones);
}

}  // namespace sgc::flash
