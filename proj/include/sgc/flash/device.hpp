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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sgc::flash {

struct DeviceGeometry {
  std::uint32_t page_size = 4096;
  std::uint32_t pages_per_zone = 4096;
  std::uint32_t zone_count = 128;

  std::uint64_t zone_bytes() const { return std::uint64_t{page_size} * pages_per_zone; }
  std::uint64_t total_pages() const { return std::uint64_t{pages_per_zone} * zone_count; }
  std::uint64_t total_bytes() const { return zone_bytes() * zone_count; }

  // Throws ConfigError on a zero field.
  void validate() const;
};

struct FlashAddress {
  std::uint32_t zone = 0;
  std::uint32_t page = 0;

  friend bool operator==(const FlashAddress&, const FlashAddress&) = default;
};

enum class ZoneCondition { kEmpty, kOpen, kFull };

struct ZoneState {
  std::uint32_t write_pointer = 0;
  ZoneCondition condition = ZoneCondition::kEmpty;
};

struct IoCounters {
  std::uint64_t host_pages_written = 0;
  std::uint64_t device_copied_pages = 0;
  std::uint64_t pages_read = 0;
  std::uint64_t zones_erased = 0;

  // Device-level write amplification; 1.0 before the first host write.
  double dlwa() const {
    if (host_pages_written == 0) return 1.0;
    return static_cast<double>(host_pages_written + device_copied_pages) /
           static_cast<double>(host_pages_written);
  }
};

// Append-only zoned page store. Page contents live in memory; a zone's buffer
// is allocated on its first append and released on reset.
//
// Appends to one zone must be serialized by the caller; appends to distinct
// zones and reads of written pages may run concurrently. Counters are atomic.
class ZonedDevice {
 public:
  explicit ZonedDevice(DeviceGeometry geometry);

  ZonedDevice(const ZonedDevice&) = delete;
  ZonedDevice& operator=(const ZonedDevice&) = delete;

  const DeviceGeometry& geometry() const { return geometry_; }

  // Host write at the zone's write pointer. Throws ZoneFull, BadAddress, or
  // std::invalid_argument when data is not exactly one page.
  FlashAddress append(std::uint32_t zone, std::span<const std::byte> data);

  // Same as append but accounted as a device-internal copy (FTL relocation).
  FlashAddress relocate(std::uint32_t zone, std::span<const std::byte> data);

  // View of a written page; valid until the zone is reset. Throws
  // UnwrittenPage or BadAddress.
  std::span<const std::byte> read(FlashAddress addr);

  // Throws BadAddress.
  void reset(std::uint32_t zone);

  ZoneState zone_state(std::uint32_t zone) const;
  IoCounters counters() const;

 private:
  struct Zone {
    std::unique_ptr<std::byte[]> data;
    std::uint32_t write_pointer = 0;
  };

  FlashAddress append_impl(std::uint32_t zone, std::span<const std::byte> data);
  void check_zone(std::uint32_t zone) const;

  DeviceGeometry geometry_;
  std::vector<Zone> zones_;
  std::atomic<std::uint64_t> host_pages_written_{0};
  std::atomic<std::uint64_t> device_copied_pages_{0};
  std::atomic<std::uint64_t> pages_read_{0};
  std::atomic<std::uint64_t> zones_erased_{0};
};

// Page-mapped translation layer over a contiguous zone range of a
// ZonedDevice, with greedy (fewest-valid-pages) garbage collection.
//
// GC normally relocates valid pages verbatim as device copies. A rewrite hook
// lets the owner replace a valid page's contents during GC; the rewritten
// page is then a host write.
class PageMappedRegion {
 public:
  // Return true and fill `out` (one page) to rewrite; false to copy verbatim.
  using RewriteHook = std::function<bool(std::uint64_t lpn, std::span<const std::byte> old_page,
                                         std::vector<std::byte>& out)>;

  PageMappedRegion(ZonedDevice& device, std::uint32_t first_zone, std::uint32_t zone_count,
                   std::uint64_t logical_pages, std::uint32_t low_watermark_zones = 2);

  void set_rewrite_hook(RewriteHook hook) { hook_ = std::move(hook); }

  std::uint64_t logical_pages() const { return l2p_.size(); }
  bool is_mapped(std::uint64_t lpn) const;

  // Host write of one page; may run GC first to keep the free-zone count at
  // the watermark.
  void write(std::uint64_t lpn, std::span<const std::byte> data);

  // Throws UnwrittenPage for a never-written lpn.
  std::span<const std::byte> read(std::uint64_t lpn);

  // One greedy GC pass regardless of the watermark. Returns pages relocated
  // verbatim (rewrites through the hook are not counted). Throws
  // DeviceFullDeadlock when no zone can be reclaimed.
  std::uint64_t collect_once();

  std::uint32_t free_zone_count() const { return static_cast<std::uint32_t>(free_.size()); }
  std::uint32_t valid_pages_in_zone(std::uint32_t zone) const;
  std::uint64_t gc_passes() const { return gc_passes_; }

 private:
  static constexpr std::uint64_t kUnmapped = ~std::uint64_t{0};

  std::uint64_t physical(FlashAddress a) const;
  FlashAddress place(std::span<const std::byte> data, bool as_copy);
  void ensure_open_zone();
  void invalidate(std::uint64_t ppn);
  void maybe_collect();

  ZonedDevice& device_;
  std::uint32_t first_zone_;
  std::uint32_t zone_count_;
  std::uint32_t pages_per_zone_;
  std::uint32_t low_watermark_;
  std::vector<std::uint64_t> l2p_;
  std::vector<std::uint64_t> p2l_;  // indexed by region-relative physical page
  std::vector<std::uint32_t> valid_;
  std::vector<bool> in_use_;        // zone holds (or held) data since its last reset
  std::deque<std::uint32_t> free_;  // region-relative zone indices
  std::uint32_t open_zone_;
  bool has_open_ = false;
  bool collecting_ = false;
  std::uint64_t gc_passes_ = 0;
  RewriteHook hook_;
  std::vector<std::byte> scratch_;
};

// Conventional SSD emulation: the whole device behind one page-mapped FTL
// that exposes (1 - op_fraction) of the raw pages.
class FtlDevice {
 public:
  FtlDevice(DeviceGeometry geometry, double op_fraction, std::uint32_t low_watermark_zones = 2);

  std::uint64_t logical_pages() const { return region_->logical_pages(); }
  void write(std::uint64_t lpn, std::span<const std::byte> data) { region_->write(lpn, data); }
  std::span<const std::byte> read(std::uint64_t lpn) { return region_->read(lpn); }
  bool is_mapped(std::uint64_t lpn) const { return region_->is_mapped(lpn); }

  // One greedy GC pass; returns pages copied.
  std::uint64_t ftl_mode_gc() { return region_->collect_once(); }

  IoCounters counters() const { return device_.counters(); }
  const DeviceGeometry& geometry() const { return device_.geometry(); }
  ZonedDevice& device() { return device_; }
  PageMappedRegion& region() { return *region_; }

 private:
  ZonedDevice device_;
  std::unique_ptr<PageMappedRegion> region_;
};

}  // namespace sgc::flash
