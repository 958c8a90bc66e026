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
// Compound File Binary Format reader (legacy Office documents, encrypted
// OOXML wrappers, vbaProject.bin).
//
// The directory red-black tree is walked as a plain binary tree with a
// visited-set guard; sector chains are followed with a visited bitmap and
// every sector index is range-checked, so crafted files fail with
// CyclicFatChain / TruncatedFile instead of looping or over-reading.

#ifndef LURESCAN_CFBF_H_
#define LURESCAN_CFBF_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"

namespace lurescan {

inline constexpr std::array<uint8_t, 8> kCfbfSignature = {0xD0, 0xCF, 0x11, 0xE0,
                                                          0xA1, 0xB1, 0x1A, 0xE1};

struct CfbfHeader {
  uint16_t major_version = 0;
  uint32_t sector_size = 0;
  uint32_t mini_sector_size = 0;
  uint32_t fat_sector_count = 0;
  uint32_t directory_start_sector = 0;
  uint32_t mini_stream_cutoff = 0;
  uint32_t mini_fat_start_sector = 0;
  uint32_t mini_fat_sector_count = 0;
  uint32_t difat_start_sector = 0;
  uint32_t difat_sector_count = 0;
  std::array<uint32_t, 109> difat{};
};

// Fails with BadSignature or UnsupportedVersion (major versions other than
// 3/4, or a sector shift that does not match the version).
absl::StatusOr<CfbfHeader> ParseCfbfHeader(ByteView bytes);

enum class EntryKind { kStorage, kStream, kRoot };

struct DirectoryEntry {
  std::string name;  // UTF-8
  EntryKind kind = EntryKind::kStream;
  uint64_t size = 0;
  uint32_t start_sector = 0;
  uint32_t left = 0;
  uint32_t right = 0;
  uint32_t child = 0;
};

struct StreamInfo {
  std::string path;  // storage names joined with '/'
  uint64_t size = 0;
};

class CompoundFile {
 public:
  static absl::StatusOr<CompoundFile> Open(Bytes data);
  static absl::StatusOr<CompoundFile> Open(ByteView data) {
    return Open(Bytes(data.begin(), data.end()));
  }

  const CfbfHeader& header() const { return header_; }
  const std::vector<DirectoryEntry>& entries() const { return entries_; }

  // Depth-first enumeration of stream entries; siblings in tree order.
  const std::vector<StreamInfo>& streams() const { return streams_; }
  // Storage paths (excluding the root), same traversal order.
  const std::vector<std::string>& storages() const { return storages_; }

  bool HasStream(std::string_view path) const;
  // Paths compare case-insensitively (ASCII), as compound-file names do.
  absl::StatusOr<Bytes> ReadStream(std::string_view path) const;

 private:
  absl::StatusOr<std::vector<uint32_t>> Chain(uint32_t start, const std::vector<uint32_t>& fat,
                                              uint64_t limit) const;
  absl::StatusOr<Bytes> ReadRegular(uint32_t start, uint64_t size) const;
  absl::StatusOr<Bytes> ReadMini(uint32_t start, uint64_t size) const;
  const DirectoryEntry* FindEntry(std::string_view path) const;

  std::shared_ptr<const Bytes> data_;
  CfbfHeader header_;
  std::vector<uint32_t> fat_;
  std::vector<uint32_t> mini_fat_;
  std::vector<DirectoryEntry> entries_;
  std::vector<StreamInfo> streams_;
  std::vector<std::string> storages_;
  std::vector<std::pair<std::string, uint32_t>> path_index_;
};

// Convenience wrappers over CompoundFile.
absl::StatusOr<std::vector<StreamInfo>> ListStreams(ByteView bytes);
absl::StatusOr<Bytes> ReadStream(ByteView bytes, std::string_view path);

}  // namespace lurescan

#endif  // LURESCAN_CFBF_H_
