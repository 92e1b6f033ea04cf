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

#include "sgc/core/set_page.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "sgc/core/error.hpp"

namespace sgc {
namespace {

void put_u16(std::byte* p, std::uint16_t v) {
  p[0] = static_cast<std::byte>(v & 0xff);
  p[1] = static_cast<std::byte>(v >> 8);
}

void put_u32(std::byte* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

std::uint16_t get_u16(const std::byte* p) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(p[0]) |
                                    (std::to_integer<unsigned>(p[1]) << 8));
}

std::uint32_t get_u32(const std::byte* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::optional<std::size_t> SetPage::find(std::string_view key) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].key == key) return i;
  }
  return std::nullopt;
}

void SetPage::push_back(ObjectRecord object) {
  payload_bytes_ += object.total_size();
  entries_.push_back(std::move(object));
}

ObjectRecord SetPage::erase(std::size_t index) {
  ObjectRecord out = std::move(entries_[index]);
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
  payload_bytes_ -= out.total_size();
  return out;
}

void SetPage::clear() {
  entries_.clear();
  payload_bytes_ = 0;
}

std::vector<ObjectRecord> SetPage::evict_until_fits(std::uint32_t object_size,
                                                    std::uint32_t page_size) {
  std::size_t n = 0;
  std::uint32_t bytes = fill_bytes();
  while (n < entries_.size() && bytes + object_size > page_size) {
    bytes -= entries_[n].total_size();
    ++n;
  }
  std::vector<ObjectRecord> evicted(std::make_move_iterator(entries_.begin()),
                                    std::make_move_iterator(entries_.begin() + static_cast<std::ptrdiff_t>(n)));
  entries_.erase(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n));
  payload_bytes_ = bytes - kPageHeaderBytes;
  return evicted;
}

void encode_set_into(const SetPage& page, std::span<std::byte> out) {
  if (page.fill_bytes() > out.size()) throw MalformedSet("set exceeds page size");
  if (page.entry_count() > std::numeric_limits<std::uint16_t>::max()) {
    throw MalformedSet("too many entries");
  }
  std::byte* p = out.data();
  put_u16(p, kSetPageMagic);
  put_u16(p + 2, static_cast<std::uint16_t>(page.entry_count()));
  p += kPageHeaderBytes;
  for (const auto& e : page.entries()) {
    if (e.key.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw MalformedSet("key too long");
    }
    put_u16(p, static_cast<std::uint16_t>(e.key.size()));
    put_u32(p + 2, static_cast<std::uint32_t>(e.value.size()));
    p += kObjectHeaderBytes;
    std::memcpy(p, e.key.data(), e.key.size());
    p += e.key.size();
    std::memcpy(p, e.value.data(), e.value.size());
    p += e.value.size();
  }
  std::fill(p, out.data() + out.size(), std::byte{0});
}

std::vector<std::byte> encode_set(const SetPage& page, std::uint32_t page_size) {
  std::vector<std::byte> out(page_size);
  encode_set_into(page, out);
  return out;
}

SetPage decode_set(std::span<const std::byte> bytes) {
  if (bytes.size() < kPageHeaderBytes) throw MalformedSet("short page");
  const std::byte* p = bytes.data();
  const std::byte* const end = p + bytes.size();
  if (get_u16(p) != kSetPageMagic) throw MalformedSet("bad magic");
  const std::size_t count = get_u16(p + 2);
  p += kPageHeaderBytes;

  SetPage page;
  for (std::size_t i = 0; i < count; ++i) {
    if (end - p < static_cast<std::ptrdiff_t>(kObjectHeaderBytes)) {
      throw MalformedSet("truncated entry header");
    }
    const std::size_t klen = get_u16(p);
    const std::size_t vlen = get_u32(p + 2);
    p += kObjectHeaderBytes;
    if (klen == 0) throw MalformedSet("empty key");
    if (static_cast<std::size_t>(end - p) < klen + vlen) throw MalformedSet("truncated entry");
    ObjectRecord obj;
    obj.key.assign(reinterpret_cast<const char*>(p), klen);
    p += klen;
    obj.value.assign(reinterpret_cast<const char*>(p), vlen);
    p += vlen;
    if (page.find(obj.key)) throw MalformedSet("duplicate key");
    page.push_back(std::move(obj));
  }
  if (std::any_of(p, end, [](std::byte b) { return b != std::byte{0}; })) {
    throw MalformedSet("non-zero padding");
  }
  return page;
}

}  // namespace sgc
