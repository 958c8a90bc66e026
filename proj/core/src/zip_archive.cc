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
#include "lurescan/zip_archive.h"

#include <zlib.h>

#include <algorithm>

#include "lurescan/strings.h"
#include "lurescan/error.h"

namespace lurescan {
namespace {

constexpr uint32_t kLocalHeaderSig = 0x04034b50;
constexpr uint32_t kCentralHeaderSig = 0x02014b50;
constexpr uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr uint32_t kZip64LocatorSig = 0x07064b50;
constexpr uint32_t kZip64EndSig = 0x06064b50;
constexpr size_t kEocdSize = 22;

absl::StatusOr<Bytes> Inflate(ByteView compressed, uint64_t expected_size) {
  // One spare byte detects streams that inflate past the declared size.
  Bytes out(static_cast<size_t>(expected_size) + 1);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    return MakeError(ErrorCode::kCorruptArchive, "inflateInit2 failed");
  }
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  uint64_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
    return MakeError(ErrorCode::kCorruptArchive, Cat("inflate failed (", rc, ")"));
  }
  if (produced != expected_size) {
    return MakeError(ErrorCode::kCorruptArchive,
                     Cat("inflated ", produced, " bytes, directory says ",
                                  expected_size));
  }
  out.resize(static_cast<size_t>(expected_size));
  return out;
}

}  // namespace

std::string NormalizePartPath(std::string_view raw) {
  std::string path(raw);
  std::replace(path.begin(), path.end(), '\\', '/');
  size_t start = path.find_first_not_of('/');
  return start == std::string::npos ? std::string() : path.substr(start);
}

absl::StatusOr<ZipArchive> ZipArchive::Open(Bytes data) {
  ZipArchive archive;
  archive.data_ = std::make_shared<const Bytes>(std::move(data));
  ByteView bytes = *archive.data_;
  if (bytes.size() < kEocdSize) {
    return MakeError(ErrorCode::kCorruptArchive, "file too small for a ZIP archive");
  }

  // The end-of-central-directory record sits within the last 64 KiB + 22.
  size_t lowest = bytes.size() > kEocdSize + 0xFFFF ? bytes.size() - kEocdSize - 0xFFFF : 0;
  size_t eocd = std::string::npos;
  for (size_t pos = bytes.size() - kEocdSize + 1; pos-- > lowest;) {
    if (LoadLe32(bytes, pos) == kEndOfCentralDirSig) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string::npos) {
    return MakeError(ErrorCode::kCorruptArchive, "end of central directory not found");
  }

  uint64_t entry_count = LoadLe16(bytes, eocd + 10);
  uint64_t cd_size = LoadLe32(bytes, eocd + 12);
  uint64_t cd_offset = LoadLe32(bytes, eocd + 16);
  if ((cd_offset == 0xFFFFFFFF || entry_count == 0xFFFF) && eocd >= 20 &&
      LoadLe32(bytes, eocd - 20) == kZip64LocatorSig) {
    uint64_t z64 = LoadLe64(bytes, eocd - 20 + 8);
    if (z64 + 56 <= bytes.size() && LoadLe32(bytes, z64) == kZip64EndSig) {
      entry_count = LoadLe64(bytes, z64 + 32);
      cd_size = LoadLe64(bytes, z64 + 40);
      cd_offset = LoadLe64(bytes, z64 + 48);
    }
  }
  if (cd_offset > bytes.size() || cd_size > bytes.size() - cd_offset) {
    return MakeError(ErrorCode::kCorruptArchive, "central directory out of bounds");
  }

  ByteReader reader(bytes.subspan(cd_offset, cd_size));
  for (uint64_t i = 0; i < entry_count; ++i) {
    uint32_t sig;
    if (!reader.ReadU32(&sig) || sig != kCentralHeaderSig) {
      if (i == 0) {
        return MakeError(ErrorCode::kCorruptArchive, "bad central directory header");
      }
      archive.warnings_.push_back(
          Cat("central directory ends after ", i, " of ", entry_count, " entries"));
      break;
    }
    ByteView fixed;
    if (!reader.ReadSpan(42, &fixed)) {
      return MakeError(ErrorCode::kCorruptArchive, "truncated central directory entry");
    }
    ZipEntry entry;
    entry.method = LoadLe16(fixed, 6);
    entry.crc32 = LoadLe32(fixed, 12);
    entry.compressed_size = LoadLe32(fixed, 16);
    entry.uncompressed_size = LoadLe32(fixed, 20);
    uint16_t name_len = LoadLe16(fixed, 24);
    uint16_t extra_len = LoadLe16(fixed, 26);
    uint16_t comment_len = LoadLe16(fixed, 28);
    entry.local_header_offset = LoadLe32(fixed, 38);
    ByteView name, extra;
    if (!reader.ReadSpan(name_len, &name) || !reader.ReadSpan(extra_len, &extra) ||
        !reader.Skip(comment_len)) {
      return MakeError(ErrorCode::kCorruptArchive, "truncated central directory entry");
    }
    // ZIP64 extended information overrides saturated 32-bit fields.
    ByteReader ex(extra);
    uint16_t tag, len;
    while (ex.ReadU16(&tag) && ex.ReadU16(&len)) {
      ByteView field;
      if (!ex.ReadSpan(len, &field)) break;
      if (tag != 0x0001) continue;
      ByteReader z(field);
      if (entry.uncompressed_size == 0xFFFFFFFF) z.ReadU64(&entry.uncompressed_size);
      if (entry.compressed_size == 0xFFFFFFFF) z.ReadU64(&entry.compressed_size);
      if (entry.local_header_offset == 0xFFFFFFFF) z.ReadU64(&entry.local_header_offset);
    }
    entry.path = NormalizePartPath(AsChars(name));
    if (entry.path.empty() || entry.path.back() == '/') continue;
    archive.entries_.push_back(std::move(entry));
  }
  return archive;
}

const ZipEntry* ZipArchive::Find(std::string_view path) const {
  std::string wanted = NormalizePartPath(path);
  for (const auto& e : entries_) {
    if (e.path == wanted) return &e;
  }
  // OPC part names are case-insensitive.
  for (const auto& e : entries_) {
    if (e.path.size() == wanted.size() &&
        std::equal(e.path.begin(), e.path.end(), wanted.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) ==
                 std::tolower(static_cast<unsigned char>(b));
        })) {
      return &e;
    }
  }
  return nullptr;
}

absl::StatusOr<Bytes> ZipArchive::Read(std::string_view path) const {
  const ZipEntry* entry = Find(path);
  if (entry == nullptr) {
    return MakeError(ErrorCode::kNotFound, Cat("no part named ", path));
  }
  return Read(*entry);
}

absl::StatusOr<Bytes> ZipArchive::Read(const ZipEntry& entry) const {
  ByteView bytes = *data_;
  uint64_t off = entry.local_header_offset;
  if (off > bytes.size() || bytes.size() - off < 30 || LoadLe32(bytes, off) != kLocalHeaderSig) {
    return MakeError(ErrorCode::kCorruptArchive,
                     Cat("bad local header for ", entry.path));
  }
  uint64_t data_start = off + 30 + LoadLe16(bytes, off + 26) + LoadLe16(bytes, off + 28);
  if (data_start > bytes.size() || entry.compressed_size > bytes.size() - data_start) {
    return MakeError(ErrorCode::kCorruptArchive,
                     Cat("entry data out of bounds: ", entry.path));
  }
  if (entry.uncompressed_size > kMaxEntrySize) {
    return MakeError(ErrorCode::kCorruptArchive,
                     Cat("entry too large: ", entry.path));
  }
  ByteView stored = bytes.subspan(data_start, entry.compressed_size);

  Bytes out;
  if (entry.method == 0) {
    if (entry.compressed_size != entry.uncompressed_size) {
      return MakeError(ErrorCode::kCorruptArchive,
                       Cat("stored entry size mismatch: ", entry.path));
    }
    out.assign(stored.begin(), stored.end());
  } else if (entry.method == 8) {
    LURESCAN_ASSIGN_OR_RETURN(out, Inflate(stored, entry.uncompressed_size));
  } else {
    return MakeError(ErrorCode::kUnsupportedFormat,
                     Cat("compression method ", entry.method, " for ", entry.path));
  }
  if (crc32(0L, out.data(), static_cast<uInt>(out.size())) != entry.crc32) {
    return MakeError(ErrorCode::kCorruptArchive, Cat("CRC-32 mismatch: ", entry.path));
  }
  return out;
}

}  // namespace lurescan
