// Copyright 2026 The lurescan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Octet-sequence aliases and little-endian readers shared by the binary
// parsers (ZIP, compound file, VBA dir stream, BIFF, encryption headers).

#ifndef LURESCAN_BYTES_H_
#define LURESCAN_BYTES_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace lurescan {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}
inline std::string_view AsChars(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

// Callers must check bounds; these never read past `offset + N`.
inline uint16_t LoadLe16(ByteView b, size_t offset) {
  return static_cast<uint16_t>(b[offset] | (b[offset + 1] << 8));
}
inline uint32_t LoadLe32(ByteView b, size_t offset) {
  return static_cast<uint32_t>(b[offset]) |
         (static_cast<uint32_t>(b[offset + 1]) << 8) |
         (static_cast<uint32_t>(b[offset + 2]) << 16) |
         (static_cast<uint32_t>(b[offset + 3]) << 24);
}
inline uint64_t LoadLe64(ByteView b, size_t offset) {
  return static_cast<uint64_t>(LoadLe32(b, offset)) |
         (static_cast<uint64_t>(LoadLe32(b, offset + 4)) << 32);
}

// Sequential bounds-checked reader. Every Read* returns false (and leaves
// the cursor unchanged) when fewer bytes remain than requested.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  size_t position() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }
  bool empty() const { return pos_ >= data_.size(); }

  bool ReadU8(uint8_t* out);
  bool ReadU16(uint16_t* out);
  bool ReadU32(uint32_t* out);
  bool ReadU64(uint64_t* out);
  bool ReadSpan(size_t n, ByteView* out);
  bool Skip(size_t n);

 private:
  ByteView data_;
  size_t pos_ = 0;
};

absl::StatusOr<Bytes> ReadFileBytes(const std::filesystem::path& path);
std::string HexEncode(ByteView bytes);

}  // namespace lurescan

#endif  // LURESCAN_BYTES_H_
