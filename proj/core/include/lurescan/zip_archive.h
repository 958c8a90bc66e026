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
// Read-only ZIP reader for OOXML packages.
//
// The central directory is authoritative: local headers are consulted only
// to locate the entry data, and data descriptor or local-header size
// disagreements are tolerated with a warning because malicious documents
// are frequently slightly malformed archives.

#ifndef LURESCAN_ZIP_ARCHIVE_H_
#define LURESCAN_ZIP_ARCHIVE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"

namespace lurescan {

struct ZipEntry {
  std::string path;  // normalized: forward slashes, no leading slash
  uint16_t method = 0;
  uint32_t crc32 = 0;
  uint64_t compressed_size = 0;
  uint64_t uncompressed_size = 0;
  uint64_t local_header_offset = 0;
};

class ZipArchive {
 public:
  // Fails with CorruptArchive when no readable central directory exists.
  static absl::StatusOr<ZipArchive> Open(Bytes data);
  static absl::StatusOr<ZipArchive> Open(ByteView data) {
    return Open(Bytes(data.begin(), data.end()));
  }

  // Entries in central-directory (archive) order. Directory entries are
  // omitted.
  const std::vector<ZipEntry>& entries() const { return entries_; }
  const ZipEntry* Find(std::string_view path) const;

  // Returns the exact stored octets of an entry after decompression.
  // Stored (0) and deflate (8) are supported; others fail with
  // UnsupportedFormat. Size mismatches fail with CorruptArchive.
  absl::StatusOr<Bytes> Read(const ZipEntry& entry) const;
  absl::StatusOr<Bytes> Read(std::string_view path) const;

  const std::vector<std::string>& warnings() const { return warnings_; }
  ByteView data() const { return *data_; }

  // Decompressed entries larger than this are rejected.
  static constexpr uint64_t kMaxEntrySize = uint64_t{512} << 20;

 private:
  std::shared_ptr<const Bytes> data_;
  std::vector<ZipEntry> entries_;
  std::vector<std::string> warnings_;
};

std::string NormalizePartPath(std::string_view raw);

}  // namespace lurescan

#endif  // LURESCAN_ZIP_ARCHIVE_H_
