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


#include "sgc/baseline/baselines.hpp"

#include <cmath>
#include <map>
#include <string>

#include "sgc/core/error.hpp"
#include "sgc/core/hash.hpp"

namespace sgc {

namespace {

void check_object(std::string_view key, std::string_view value, std::uint32_t page_size) {
  if (key.empty()) throw BadKey("empty key");
  if (key.size() > 0xffff) throw BadKey("key longer than 65535 bytes");
  const std::uint64_t size = key.size() + value.size() + kObjectHeaderBytes;
  if (size > set_payload_capacity(page_size)) {
    throw ObjectTooLarge("object of " + std::to_string(size) + " bytes exceeds one page");
  }
}

void add_fill(EngineCounters& c, const SetPage& page, std::uint32_t page_size) {
  c.fill_sum += static_cast<double>(page.payload_bytes()) / page_size;
  ++c.fill_units;
  c.data_bytes_written += page_size;
}

void copy_io(EngineCounters& c, const flash::IoCounters& io) {
  c.host_pages_written = io.host_pages_written;
  c.device_copied_pages = io.device_copied_pages;
}

}  // namespace

// ---------------------------------------------------------------------------

LogEngine::LogEngine(flash::ZonedDevice& device) : device_(device) {
  zone_keys_.resize(device.geometry().zone_count);
  page_buf_.resize(device.geometry().page_size);
}

void LogEngine::open_next_zone() {
  const std::uint32_t zones = device_.geometry().zone_count;
  open_zone_ = (open_zone_ + 1) % zones;
  if (device_.zone_state(open_zone_).write_pointer == 0) return;
  for (const std::string& key : zone_keys_[open_zone_]) {
    auto it = index_.find(key);
    if (it != index_.end() && it->second.zone == open_zone_) index_.erase(it);
  }
  zone_keys_[open_zone_].clear();
  device_.reset(open_zone_);
}

void LogEngine::flush_buffer() {
  if (buffer_.empty()) return;
  if (device_.zone_state(open_zone_).write_pointer == device_.geometry().pages_per_zone) {
    open_next_zone();
  }
  encode_set_into(buffer_, page_buf_);
  const flash::FlashAddress at = device_.append(open_zone_, page_buf_);
  for (const ObjectRecord& obj : buffer_.entries()) {
    index_[obj.key] = Location{at.zone, at.page};
    zone_keys_[at.zone].push_back(obj.key);
  }
  add_fill(c_, buffer_, page_size());
  buffer_.clear();
}

void LogEngine::set(std::string_view key, std::string_view value) {
  check_object(key, value, page_size());
  auto it = index_.find(std::string(key));
  if (it != index_.end() && it->second.zone == kInBuffer) {
    if (auto idx = buffer_.find(key)) buffer_.erase(*idx);
  }
  ObjectRecord obj{std::string(key), std::string(value)};
  const std::uint32_t size = obj.total_size();
  if (!buffer_.fits(size, page_size())) flush_buffer();
  c_.logical_new_bytes += size;
  index_[obj.key] = Location{};
  buffer_.push_back(std::move(obj));
}

std::optional<std::string> LogEngine::get(std::string_view key) {
  ++c_.lookups;
  auto it = index_.find(std::string(key));
  if (it == index_.end()) {
    ++c_.misses;
    return std::nullopt;
  }
  if (it->second.zone == kInBuffer) {
    return buffer_.entries()[*buffer_.find(key)].value;
  }
  ++c_.lookup_flash_reads;
  const SetPage page = decode_set(device_.read({it->second.zone, it->second.page}));
  return page.entries()[*page.find(key)].value;
}

EngineCounters LogEngine::counters() const {
  EngineCounters c = c_;
  copy_io(c, device_.counters());
  return c;
}

// ---------------------------------------------------------------------------

SetAssocEngine::SetAssocEngine(flash::DeviceGeometry geometry, double op_fraction, std::uint64_t seed)
    : ftl_(geometry, op_fraction), seed_(seed) {
  page_buf_.resize(geometry.page_size);
}

std::uint64_t SetAssocEngine::set_of(std::string_view key) const {
  return xxh64(key, seed_) % ftl_.logical_pages();
}

void SetAssocEngine::set(std::string_view key, std::string_view value) {
  check_object(key, value, page_size());
  const std::uint64_t s = set_of(key);
  SetPage page;
  if (ftl_.is_mapped(s)) page = decode_set(ftl_.read(s));
  if (auto idx = page.find(key)) page.erase(*idx);
  ObjectRecord obj{std::string(key), std::string(value)};
  const std::uint32_t size = obj.total_size();
  page.evict_until_fits(size, page_size());
  page.push_back(std::move(obj));
  encode_set_into(page, page_buf_);
  ftl_.write(s, page_buf_);
  c_.logical_new_bytes += size;
  c_.data_bytes_written += page_size();
}

std::optional<std::string> SetAssocEngine::get(std::string_view key) {
  ++c_.lookups;
  const std::uint64_t s = set_of(key);
  if (ftl_.is_mapped(s)) {
    ++c_.lookup_flash_reads;
    const SetPage page = decode_set(ftl_.read(s));
    if (auto idx = page.find(key)) return page.entries()[*idx].value;
  }
  ++c_.misses;
  return std::nullopt;
}

EngineCounters SetAssocEngine::counters() const {
  EngineCounters c = c_;
  copy_io(c, ftl_.counters());
  return c;
}

// ---------------------------------------------------------------------------

void HierConfig::validate() const {
  if (!(log_fraction > 0.0 && log_fraction < 1.0)) {
    throw ConfigError("hier.log_fraction: must lie in (0, 1)");
  }
  if (!(op_fraction > 0.0 && op_fraction < 1.0)) {
    throw ConfigError("hier.op_fraction: must lie in (0, 1)");
  }
  if (!(bucket_fraction > 0.0 && bucket_fraction <= 1.0)) {
    throw ConfigError("hier.bucket_fraction: must lie in (0, 1]");
  }
  if (gc_low_watermark == 0) throw ConfigError("hier.gc_low_watermark: must be positive");
}

HierEngine::HierEngine(flash::ZonedDevice& device, HierConfig config)
    : device_(device), config_(config) {
  config_.validate();
  const auto& g = device.geometry();
  log_zones_ = static_cast<std::uint32_t>(std::llround(config_.log_fraction * g.zone_count));
  if (log_zones_ < 2 || log_zones_ + 2 > g.zone_count) {
    throw ConfigError("hier.log_fraction: leaves fewer than two zones for a tier");
  }
  const std::uint32_t set_zones = g.zone_count - log_zones_;
  usable_sets_ = static_cast<std::uint64_t>(
      std::floor((1.0 - config_.op_fraction) * static_cast<double>(set_zones) * g.pages_per_zone));
  if (usable_sets_ > std::uint64_t{set_zones - config_.gc_low_watermark} * g.pages_per_zone) {
    throw ConfigError("hier.op_fraction: too small to keep the GC watermark");
  }
  region_ = std::make_unique<flash::PageMappedRegion>(device_, log_zones_, set_zones, usable_sets_,
                                                      config_.gc_low_watermark);
  const auto buckets = static_cast<std::uint64_t>(
      std::max(1.0, std::round(config_.bucket_fraction * static_cast<double>(usable_sets_))));
  buckets_.resize(buckets);
  zone_entries_.resize(log_zones_);
  page_buf_.resize(g.page_size);
  if (config_.mode == HierMode::kFairywren) {
    region_->set_rewrite_hook(
        [this](std::uint64_t lpn, std::span<const std::byte> old_page, std::vector<std::byte>& out) {
          return gc_rewrite(lpn, old_page, out);
        });
  }
}

std::uint64_t HierEngine::log_pages() const {
  return std::uint64_t{log_zones_} * device_.geometry().pages_per_zone;
}

std::uint64_t HierEngine::set_pages_physical() const {
  return std::uint64_t{device_.geometry().zone_count - log_zones_} * device_.geometry().pages_per_zone;
}

void HierEngine::set(std::string_view key, std::string_view value) {
  check_object(key, value, page_size());
  std::string k(key);
  auto it = log_index_.find(k);
  if (it != log_index_.end() && it->second.zone == kInBuffer) {
    if (auto idx = buffer_.find(key)) buffer_.erase(*idx);
  }
  ObjectRecord obj{k, std::string(value)};
  const std::uint32_t size = obj.total_size();
  if (!buffer_.fits(size, page_size())) flush_buffer();

  const std::uint64_t set = xxh64(key, config_.seed) % usable_sets_;
  const std::uint64_t ver = ++version_;
  LogEntry& e = log_index_[k];
  e.value = obj.value;
  e.version = ver;
  e.zone = kInBuffer;
  e.set = set;
  buffer_.push_back(std::move(obj));
  buffer_entries_.push_back({k, ver});
  buckets_[set % buckets_.size()].push_back({std::move(k), ver});
  c_.logical_new_bytes += size;
}

void HierEngine::flush_buffer() {
  if (buffer_.empty()) return;
  if (device_.zone_state(open_zone_).write_pointer == device_.geometry().pages_per_zone) {
    open_next_zone();
  }
  encode_set_into(buffer_, page_buf_);
  const flash::FlashAddress at = device_.append(open_zone_, page_buf_);
  for (Pending& p : buffer_entries_) {
    auto it = log_index_.find(p.key);
    if (it == log_index_.end() || it->second.version != p.version) continue;
    it->second.zone = at.zone;
    it->second.page = at.page;
    zone_entries_[at.zone].push_back(std::move(p));
  }
  buffer_entries_.clear();
  add_fill(c_, buffer_, page_size());
  buffer_.clear();
}

void HierEngine::open_next_zone() {
  open_zone_ = (open_zone_ + 1) % log_zones_;
  if (device_.zone_state(open_zone_).write_pointer != 0) passive_migrate_zone(open_zone_);
}

std::vector<ObjectRecord> HierEngine::take_pending(std::uint64_t b, std::optional<std::uint64_t> set,
                                                   std::vector<std::uint64_t>* sets) {
  std::vector<ObjectRecord> out;
  std::vector<Pending> keep;
  for (Pending& p : buckets_[b]) {
    auto it = log_index_.find(p.key);
    if (it == log_index_.end() || it->second.version != p.version) continue;
    if (it->second.zone == kInBuffer || (set && it->second.set != *set)) {
      keep.push_back(std::move(p));
      continue;
    }
    if (sets) sets->push_back(it->second.set);
    out.push_back(ObjectRecord{std::move(p.key), std::move(it->second.value)});
    log_index_.erase(it);
  }
  buckets_[b] = std::move(keep);
  return out;
}

void HierEngine::merge_into(SetPage& page, std::vector<ObjectRecord>& objects) const {
  for (ObjectRecord& obj : objects) {
    if (auto idx = page.find(obj.key)) page.erase(*idx);
    page.evict_until_fits(obj.total_size(), page_size());
    page.push_back(std::move(obj));
  }
}

void HierEngine::passive_migrate_zone(std::uint32_t zone) {
  for (const Pending& p : zone_entries_[zone]) {
    auto it = log_index_.find(p.key);
    if (it == log_index_.end() || it->second.version != p.version || it->second.zone != zone) continue;
    std::vector<std::uint64_t> sets;
    std::vector<ObjectRecord> objects = take_pending(it->second.set % buckets_.size(), std::nullopt, &sets);
    std::map<std::uint64_t, std::vector<ObjectRecord>> by_set;
    for (std::size_t i = 0; i < objects.size(); ++i) by_set[sets[i]].push_back(std::move(objects[i]));
    for (auto& [set, objs] : by_set) {
      std::uint64_t bytes = 0;
      for (const ObjectRecord& o : objs) bytes += o.total_size();
      ++passive_lists_;
      passive_list_objects_ += objs.size();
      SetPage page;
      if (region_->is_mapped(set)) page = decode_set(region_->read(set));
      merge_into(page, objs);
      encode_set_into(page, page_buf_);
      ++c_.passive_set_writes;
      c_.passive_new_bytes += bytes;
      c_.data_bytes_written += page_size();
      region_->write(set, page_buf_);
    }
  }
  zone_entries_[zone].clear();
  device_.reset(zone);
}

bool HierEngine::gc_rewrite(std::uint64_t lpn, std::span<const std::byte> old_page,
                            std::vector<std::byte>& out) {
  SetPage page = decode_set(old_page);
  std::vector<ObjectRecord> objs = take_pending(lpn % buckets_.size(), lpn, nullptr);
  std::uint64_t bytes = 0;
  for (const ObjectRecord& o : objs) bytes += o.total_size();
  merge_into(page, objs);
  encode_set_into(page, out);
  ++c_.active_set_writes;
  c_.active_new_bytes += bytes;
  c_.data_bytes_written += page_size();
  return true;
}

std::optional<std::string> HierEngine::get(std::string_view key) {
  ++c_.lookups;
  auto it = log_index_.find(std::string(key));
  if (it != log_index_.end()) {
    if (it->second.zone != kInBuffer) ++c_.lookup_flash_reads;
    return it->second.value;
  }
  const std::uint64_t set = xxh64(key, config_.seed) % usable_sets_;
  if (region_->is_mapped(set)) {
    ++c_.lookup_flash_reads;
    const SetPage page = decode_set(region_->read(set));
    if (auto idx = page.find(key)) return page.entries()[*idx].value;
  }
  ++c_.misses;
  return std::nullopt;
}

EngineCounters HierEngine::counters() const {
  EngineCounters c = c_;
  copy_io(c, device_.counters());
  return c;
}

}  // namespace sgc
