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


#include "sgc/engine/set_group_engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sgc/core/error.hpp"

namespace sgc {

std::uint32_t SetGroupEngine::zones_per_sg(const EngineConfig& c, std::uint32_t pages_per_zone) {
  return (c.sets_per_sg + pages_per_zone - 1) / pages_per_zone;
}

std::uint32_t SetGroupEngine::required_zones(const EngineConfig& c, std::uint32_t pages_per_zone) {
  const std::uint32_t groups = (c.sg_count_on_flash + c.sgs_per_index_group - 1) / c.sgs_per_index_group;
  return (c.sg_count_on_flash + groups + 1) * zones_per_sg(c, pages_per_zone);
}

SetGroupEngine::SetGroupEngine(flash::ZonedDevice& device, EngineConfig config)
    : device_(device), config_(config), cooling_(0) {
  config_.validate();
  const auto& geo = device.geometry();
  if (geo.page_size != config_.page_size) {
    throw ConfigError("nemo.page_size: must equal device.page_size");
  }
  const std::uint32_t need = required_zones(config_, geo.pages_per_zone);
  if (geo.zone_count < need) {
    throw ConfigError("device.zone_count: engine needs " + std::to_string(need) + " zones, device has " +
                      std::to_string(geo.zone_count));
  }
  zones_per_sg_ = zones_per_sg(config_, geo.pages_per_zone);

  index::PbfgConfig ic;
  ic.sets_per_sg = config_.sets_per_sg;
  ic.sgs_per_group = config_.sgs_per_index_group;
  ic.shape = index::filter_shape(config_.bf_false_positive_rate, config_.objects_per_set_target);
  const std::uint64_t groups =
      (config_.sg_count_on_flash + config_.sgs_per_index_group - 1) / config_.sgs_per_index_group;
  ic.cache_capacity_pages = static_cast<std::uint64_t>(
      std::floor(config_.cached_pbfg_fraction * static_cast<double>(groups * config_.sets_per_sg)));
  const std::uint32_t index_first = config_.sg_count_on_flash * zones_per_sg_;
  index_ = std::make_unique<index::PbfgIndex>(device_, index_first, geo.zone_count - index_first, ic);

  hotness_ = std::make_unique<HotnessTracker>(config_.sg_count_on_flash,
                                              config_.hotness_window_fraction);
  cooling_ = CoolingClock(static_cast<std::uint64_t>(
      config_.cooling_period_fraction * static_cast<double>(config_.sg_count_on_flash) *
      static_cast<double>(sg_capacity_bytes())));
  page_buf_.resize(config_.page_size);
  for (std::uint32_t i = 0; i < config_.effective_in_memory_sgs(); ++i) push_new_sg();
}

void SetGroupEngine::push_new_sg() {
  MemSg sg;
  sg.seq = next_seq_++;
  sg.sets.resize(config_.sets_per_sg);
  index_->open_sg(sg.seq);
  queue_.push_back(std::move(sg));
}

void SetGroupEngine::place(MemSg& sg, const KeyDigest& d, ObjectRecord obj) {
  const std::uint32_t size = obj.total_size();
  sg.sets[d.intra_sg_offset].push_back(std::move(obj));
  sg.object_bytes += size;
  ++sg.objects;
  index_->record_object(sg.seq, d.intra_sg_offset, d);
}

InsertResult SetGroupEngine::insert(std::string_view key, std::string_view value) {
  if (key.size() > std::numeric_limits<std::uint16_t>::max()) throw BadKey("key longer than 65535 bytes");
  ObjectRecord obj{std::string(key), std::string(value)};
  const std::uint32_t size = obj.total_size();
  if (size > set_payload_capacity(config_.page_size)) {
    throw ObjectTooLarge("object of " + std::to_string(size) + " bytes exceeds one set");
  }
  const KeyDigest d = hash_key(key, config_);
  const std::uint32_t off = d.intra_sg_offset;
  ++stats_.inserts;
  stats_.logical_new_bytes += size;

  InsertResult r;
  for (MemSg& sg : queue_) {
    auto idx = sg.sets[off].find(key);
    if (!idx) continue;
    const ObjectRecord old = sg.sets[off].erase(*idx);
    sg.object_bytes -= old.total_size();
    --sg.objects;
    r.replaced = true;
    ++stats_.replaced;
    break;
  }

  for (;;) {
    MemSg* target = nullptr;
    for (MemSg& sg : queue_) {
      if (!sg.flushing && sg.sets[off].fits(size, config_.page_size)) {
        target = &sg;
        break;
      }
    }
    if (target) {
      place(*target, d, std::move(obj));
      break;
    }
    MemSg& front = queue_.front();
    if (config_.delayed_flush && front.hold < config_.flush_threshold) {
      auto victims = front.sets[off].evict_until_fits(size, config_.page_size);
      for (const ObjectRecord& v : victims) {
        note_superseded(hash_key(v.key, config_).digest, front.seq);
        front.object_bytes -= v.total_size();
        --front.objects;
        stats_.early_evicted_bytes += v.total_size();
      }
      stats_.early_evicted_objects += victims.size();
      r.early_evicted = static_cast<std::uint32_t>(victims.size());
      ++front.hold;
      place(front, d, std::move(obj));
      break;
    }
    flush_front();
  }
  maybe_flush_front();
  return r;
}

void SetGroupEngine::maybe_flush_front() {
  const double near = config_.near_full_fraction * static_cast<double>(sg_capacity_bytes());
  if (static_cast<double>(queue_.back().object_bytes) >= near ||
      queue_.front().hold >= config_.flush_threshold) {
    flush_front();
  }
}

flash::FlashAddress SetGroupEngine::set_address(std::uint32_t slot, std::uint32_t offset) const {
  const std::uint32_t ppz = device_.geometry().pages_per_zone;
  return {slot * zones_per_sg_ + offset / ppz, offset % ppz};
}

std::uint64_t SetGroupEngine::flush_front() {
  queue_.front().flushing = true;
  if (pool_.size() == config_.sg_count_on_flash) evict_oldest(queue_.front());
  MemSg& front = queue_.front();

  const auto slot = static_cast<std::uint32_t>(flush_count_ % config_.sg_count_on_flash);
  std::vector<std::uint16_t> counts(config_.sets_per_sg);
  for (std::uint32_t j = 0; j < config_.sets_per_sg; ++j) {
    encode_set_into(front.sets[j], page_buf_);
    const flash::FlashAddress want = set_address(slot, j);
    if (!(device_.append(want.zone, page_buf_) == want)) {
      throw std::logic_error("engine: set page landed at an unexpected address");
    }
    counts[j] = static_cast<std::uint16_t>(front.sets[j].entry_count());
  }
  const double cap = static_cast<double>(sg_capacity_bytes());
  ++stats_.sg_flushes;
  stats_.sg_data_bytes_written += sg_capacity_bytes();
  stats_.flushed_object_bytes += front.object_bytes;
  stats_.flushed_writeback_bytes += front.writeback_bytes;
  stats_.fill_sum += static_cast<double>(front.object_bytes) / cap;

  pool_.push_back(FlashSg{front.seq, slot, front.objects});
  flash_objects_ += front.objects;
  stats_.index_bytes_written +=
      std::uint64_t{index_->seal_sg(front.seq)} * config_.page_size;
  hotness_->on_flush(front.seq, std::move(counts));
  const std::uint32_t fires = cooling_.add(sg_capacity_bytes());
  for (std::uint32_t i = 0; i < fires; ++i) {
    ++stats_.cooling_events;
    stats_.hotness_bits_cleared +=
        hotness_->cool([this](std::uint64_t s, std::uint32_t o) { return resident(s, o); });
  }

  const std::uint64_t seq = front.seq;
  queue_.pop_front();
  push_new_sg();
  ++flush_count_;
  return seq;
}

const SetGroupEngine::FlashSg* SetGroupEngine::flash_sg(std::uint64_t seq) const {
  if (pool_.empty() || seq < pool_.front().seq) return nullptr;
  const std::uint64_t i = seq - pool_.front().seq;
  return i < pool_.size() ? &pool_[i] : nullptr;
}

std::optional<std::string> SetGroupEngine::find_in_flash_set(std::uint64_t seq, std::uint32_t offset,
                                                             std::string_view key,
                                                             std::uint32_t* slot) {
  const FlashSg* sg = flash_sg(seq);
  if (!sg) return std::nullopt;
  const SetPage set = decode_set(device_.read(set_address(sg->slot, offset)));
  auto idx = set.find(key);
  if (!idx) return std::nullopt;
  if (slot) *slot = static_cast<std::uint32_t>(*idx);
  return set.entries()[*idx].value;
}

void SetGroupEngine::note_superseded(std::uint64_t digest, std::uint64_t seq) {
  std::uint64_t& mark = superseded_[digest];
  if (seq > mark) mark = seq;
  superseded_order_.emplace_back(seq, digest);
}

bool SetGroupEngine::newer_copy_exists(const KeyDigest& d, std::string_view key, std::uint64_t seq) {
  if (superseded(d.digest, seq)) return true;
  for (const MemSg& sg : queue_) {
    if (sg.sets[d.intra_sg_offset].find(key)) return true;
  }
  const index::CandidateQuery q = index_->query_newer(d, seq);
  stats_.writeback_check_reads += q.index_pages_read;
  for (std::uint64_t cand : q.candidates) {
    ++stats_.writeback_check_reads;
    if (find_in_flash_set(cand, d.intra_sg_offset, key, nullptr)) return true;
  }
  return false;
}

void SetGroupEngine::evict_oldest(MemSg& target) {
  const FlashSg old = pool_.front();
  EvictionResult er;
  er.sg_sequence = old.seq;
  auto is_resident = [this](std::uint64_t s, std::uint32_t o) { return resident(s, o); };
  if (config_.writeback) {
    for (std::uint32_t j = 0; j < config_.sets_per_sg; ++j) {
      const SetPage set = decode_set(device_.read(set_address(old.slot, j)));
      for (std::size_t i = 0; i < set.entry_count(); ++i) {
        const ObjectRecord& obj = set.entries()[i];
        const ObjectLocator loc{old.seq, j, static_cast<std::uint32_t>(i)};
        if (!hotness_->is_hot(loc, is_resident)) {
          ++stats_.evicted_cold;
          ++er.dropped_count;
          continue;
        }
        const KeyDigest d = hash_key(obj.key, config_);
        if (newer_copy_exists(d, obj.key, old.seq)) {
          ++stats_.writeback_stale;
          ++er.dropped_count;
          continue;
        }
        const std::uint32_t size = obj.total_size();
        if (!target.sets[j].fits(size, config_.page_size)) {
          ++stats_.writeback_dropped;
          ++er.dropped_count;
          continue;
        }
        place(target, d, obj);
        target.writeback_bytes += size;
        ++stats_.writeback_objects;
        ++er.writeback_count;
      }
    }
  } else {
    stats_.evicted_cold += old.objects;
    er.dropped_count = static_cast<std::uint32_t>(old.objects);
  }

  for (std::uint32_t z = 0; z < zones_per_sg_; ++z) device_.reset(old.slot * zones_per_sg_ + z);
  index_->invalidate_sg(old.seq);
  hotness_->on_evict(old.seq);
  flash_objects_ -= old.objects;
  pool_.pop_front();
  evicted_.push_back(old.seq);
  // Marks at or below the oldest live sequence can no longer hide anything.
  const std::uint64_t oldest = pool_.empty() ? queue_.front().seq : pool_.front().seq;
  while (!superseded_order_.empty() && superseded_order_.front().first <= oldest) {
    const auto [mseq, digest] = superseded_order_.front();
    superseded_order_.pop_front();
    auto it = superseded_.find(digest);
    if (it != superseded_.end() && it->second == mseq) superseded_.erase(it);
  }
  ++stats_.sg_evictions;
  last_eviction_ = er;
}

LookupResult SetGroupEngine::lookup(std::string_view key) {
  const KeyDigest d = hash_key(key, config_);
  const std::uint32_t off = d.intra_sg_offset;
  ++stats_.lookups;
  LookupResult r;
  for (auto it = queue_.rbegin(); it != queue_.rend(); ++it) {
    auto idx = it->sets[off].find(key);
    if (!idx) continue;
    r.value = it->sets[off].entries()[*idx].value;
    r.from_memory = true;
    ++stats_.hits;
    ++stats_.memory_hits;
    return r;
  }

  const index::CandidateQuery q = index_->query_candidates(d);
  r.index_pages_read = q.index_pages_read;
  stats_.index_pages_read += q.index_pages_read;
  if (q.index_pages_read > 0) ++stats_.lookups_touching_index_pool;
  for (std::uint64_t cand : q.candidates) {
    if (superseded(d.digest, cand)) {
      ++stats_.superseded_skips;
      break;  // candidates are newest-first; the rest are older still
    }
    ++r.candidate_sets_read;
    std::uint32_t slot = 0;
    auto v = find_in_flash_set(cand, off, key, &slot);
    if (!v) {
      ++r.false_positive_reads;
      continue;
    }
    hotness_->mark_access(ObjectLocator{cand, off, slot});
    r.value = std::move(v);
    ++stats_.hits;
    break;
  }
  stats_.candidate_sets_read += r.candidate_sets_read;
  stats_.false_positive_reads += r.false_positive_reads;
  return r;
}

std::optional<std::uint64_t> SetGroupEngine::in_memory_sequence(std::string_view key) const {
  const std::uint32_t off = hash_key(key, config_).intra_sg_offset;
  for (auto it = queue_.rbegin(); it != queue_.rend(); ++it) {
    if (it->sets[off].find(key)) return it->seq;
  }
  return std::nullopt;
}

EngineCounters SetGroupEngine::counters() const {
  EngineCounters c;
  const flash::IoCounters io = device_.counters();
  c.logical_new_bytes = stats_.logical_new_bytes;
  c.data_bytes_written = stats_.sg_data_bytes_written;
  c.index_bytes_written = stats_.index_bytes_written;
  c.host_pages_written = io.host_pages_written;
  c.device_copied_pages = io.device_copied_pages;
  c.lookups = stats_.lookups;
  c.misses = stats_.lookups - stats_.hits;
  c.lookup_flash_reads = stats_.index_pages_read + stats_.candidate_sets_read;
  c.lookups_touching_index_pool = stats_.lookups_touching_index_pool;
  c.fill_sum = stats_.fill_sum;
  c.fill_units = stats_.sg_flushes;
  return c;
}

MemoryBreakdown SetGroupEngine::memory() const {
  MemoryBreakdown m;
  m.live_objects = flash_objects_;
  for (const MemSg& sg : queue_) m.live_objects += sg.objects;
  m.cached_filter_bits = static_cast<double>(index_->cached_filter_bits());
  m.hotness_bits = static_cast<double>(hotness_->allocated_bits());
  m.index_buffer_bits = static_cast<double>(config_.sgs_per_index_group + config_.effective_in_memory_sgs()) *
                        config_.sets_per_sg * index_->config().shape.bits;
  return m;
}

}  // namespace sgc
