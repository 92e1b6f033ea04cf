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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sgc/core/types.hpp"

namespace sgc {

// Page layout (little endian):
//   [0, 2)  magic 0x5347
//   [2, 4)  entry count
//   then per entry: u16 key length, u32 value length, key bytes, value bytes
//   remaining bytes zero.
inline constexpr std::uint16_t kSetPageMagic = 0x5347;

// The objects of one set, oldest first. Keys are unique within a set.
class SetPage {
 public:
  const std::vector<ObjectRecord>& entries() const { return entries_; }
  std::size_t entry_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Sum of object total sizes (object headers included, page header excluded).
  std::uint32_t payload_bytes() const { return payload_bytes_; }
  // Bytes the encoded page occupies, page header included.
  std::uint32_t fill_bytes() const { return payload_bytes_ + kPageHeaderBytes; }

  std::optional<std::size_t> find(std::string_view key) const;
  bool fits(std::uint32_t object_size, std::uint32_t page_size) const {
    return fill_bytes() + object_size <= page_size;
  }

  void push_back(ObjectRecord object);
  ObjectRecord erase(std::size_t index);
  void clear();

  // Drops the oldest entries until `object_size` more bytes fit. Returns the
  // dropped objects in eviction order.
  std::vector<ObjectRecord> evict_until_fits(std::uint32_t object_size, std::uint32_t page_size);

  friend bool operator==(const SetPage& a, const SetPage& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<ObjectRecord> entries_;
  std::uint32_t payload_bytes_ = 0;
};

// Throws MalformedSet if the page does not fit in `page_size` bytes.
std::vector<std::byte> encode_set(const SetPage& page, std::uint32_t page_size);
void encode_set_into(const SetPage& page, std::span<std::byte> out);

// Throws MalformedSet on anything encode_set could not have produced.
SetPage decode_set(std::span<const std::byte> bytes);

}  // namespace sgc
