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
#include "lurescan/cfbf.h"

#include <algorithm>

#include "lurescan/strings.h"
#include "lurescan/error.h"
#include "lurescan/text.h"

namespace lurescan {
namespace {

constexpr uint32_t kMaxRegSect = 0xFFFFFFFA;
constexpr uint32_t kEndOfChain = 0xFFFFFFFE;
constexpr uint32_t kFreeSect = 0xFFFFFFFF;
constexpr uint32_t kNoStream = 0xFFFFFFFF;
constexpr size_t kDirEntrySize = 128;

}  // namespace

absl::StatusOr<CfbfHeader> ParseCfbfHeader(ByteView bytes) {
  if (bytes.size() < 512 || !std::equal(kCfbfSignature.begin(), kCfbfSignature.end(), bytes.begin())) {
    return MakeError(ErrorCode::kBadSignature, "not a compound file");
  }
  CfbfHeader h;
  h.major_version = LoadLe16(bytes, 0x1A);
  uint16_t sector_shift = LoadLe16(bytes, 0x1E);
  uint16_t mini_shift = LoadLe16(bytes, 0x20);
  if (h.major_version == 3) {
    if (sector_shift != 9) {
      return MakeError(ErrorCode::kUnsupportedVersion, "v3 requires 512-byte sectors");
    }
  } else if (h.major_version == 4) {
    if (sector_shift != 12) {
      return MakeError(ErrorCode::kUnsupportedVersion, "v4 requires 4096-byte sectors");
    }
  } else {
    return MakeError(ErrorCode::kUnsupportedVersion,
                     Cat("major version ", h.major_version));
  }
  if (mini_shift != 6) {
    return MakeError(ErrorCode::kUnsupportedVersion,
                     Cat("mini sector shift ", mini_shift));
  }
  h.sector_size = 1u << sector_shift;
  h.mini_sector_size = 1u << mini_shift;
  h.fat_sector_count = LoadLe32(bytes, 0x2C);
  h.directory_start_sector = LoadLe32(bytes, 0x30);
  h.mini_stream_cutoff = LoadLe32(bytes, 0x38);
  if (h.mini_stream_cutoff != 4096) {
    return MakeError(ErrorCode::kUnsupportedVersion,
                     Cat("mini stream cutoff ", h.mini_stream_cutoff));
  }
  h.mini_fat_start_sector = LoadLe32(bytes, 0x3C);
  h.mini_fat_sector_count = LoadLe32(bytes, 0x40);
  h.difat_start_sector = LoadLe32(bytes, 0x44);
  h.difat_sector_count = LoadLe32(bytes, 0x48);
  for (size_t i = 0; i < h.difat.size(); ++i) h.difat[i] = LoadLe32(bytes, 0x4C + 4 * i);
  return h;
}

absl::StatusOr<CompoundFile> CompoundFile::Open(Bytes data) {
  CompoundFile cf;
  cf.data_ = std::make_shared<const Bytes>(std::move(data));
  ByteView bytes = *cf.data_;
  LURESCAN_ASSIGN_OR_RETURN(cf.header_, ParseCfbfHeader(bytes));
  const CfbfHeader& h = cf.header_;
  const uint64_t ssize = h.sector_size;
  // Sector n lives at (n + 1) * sector_size; the header occupies sector -1.
  const uint64_t sector_count = bytes.size() > ssize ? (bytes.size() - ssize + ssize - 1) / ssize : 0;

  auto sector_span = [&](uint32_t sector) -> absl::StatusOr<ByteView> {
    uint64_t off = (static_cast<uint64_t>(sector) + 1) * ssize;
    if (sector > kMaxRegSect || off >= bytes.size()) {
      return MakeError(ErrorCode::kTruncatedFile, Cat("sector ", sector, " beyond end of file"));
    }
    // A short final sector is zero-extended by the reader; expose what exists.
    return bytes.subspan(off, std::min<uint64_t>(ssize, bytes.size() - off));
  };

  // Collect FAT sector numbers from the header DIFAT and the DIFAT chain.
  std::vector<uint32_t> fat_sectors;
  for (uint32_t s : h.difat) {
    if (s <= kMaxRegSect) fat_sectors.push_back(s);
  }
  {
    uint32_t next = h.difat_start_sector;
    std::vector<bool> seen(sector_count, false);
    uint32_t per_sector = static_cast<uint32_t>(ssize / 4) - 1;
    while (next <= kMaxRegSect) {
      if (next >= sector_count) {
        return MakeError(ErrorCode::kTruncatedFile, "DIFAT sector beyond end of file");
      }
      if (seen[next]) return MakeError(ErrorCode::kCyclicFatChain, "DIFAT chain revisits a sector");
      seen[next] = true;
      LURESCAN_ASSIGN_OR_RETURN(ByteView sec, sector_span(next));
      for (uint32_t i = 0; i < per_sector && (i + 1) * 4 <= sec.size(); ++i) {
        uint32_t s = LoadLe32(sec, i * 4);
        if (s <= kMaxRegSect) fat_sectors.push_back(s);
      }
      next = sec.size() >= ssize ? LoadLe32(sec, per_sector * 4) : kEndOfChain;
    }
  }
  if (fat_sectors.size() > sector_count + 1) {
    return MakeError(ErrorCode::kTruncatedFile, "more FAT sectors than the file holds");
  }
  cf.fat_.reserve(fat_sectors.size() * (ssize / 4));
  for (uint32_t s : fat_sectors) {
    LURESCAN_ASSIGN_OR_RETURN(ByteView sec, sector_span(s));
    for (size_t i = 0; i + 4 <= ssize; i += 4) {
      cf.fat_.push_back(i + 4 <= sec.size() ? LoadLe32(sec, i) : kFreeSect);
    }
  }

  // Directory stream.
  LURESCAN_ASSIGN_OR_RETURN(std::vector<uint32_t> dir_chain,
                            cf.Chain(h.directory_start_sector, cf.fat_, UINT64_MAX));
  for (uint32_t s : dir_chain) {
    LURESCAN_ASSIGN_OR_RETURN(ByteView sec, sector_span(s));
    for (size_t off = 0; off + kDirEntrySize <= sec.size(); off += kDirEntrySize) {
      ByteView raw = sec.subspan(off, kDirEntrySize);
      DirectoryEntry e;
      uint16_t name_len = std::min<uint16_t>(LoadLe16(raw, 64), 64);
      uint8_t type = raw[66];
      size_t units = name_len >= 2 ? name_len / 2 - 1 : 0;
      e.name = Utf16LeToUtf8(raw.subspan(0, std::min<size_t>(units, 31) * 2));
      switch (type) {
        case 1: e.kind = EntryKind::kStorage; break;
        case 2: e.kind = EntryKind::kStream; break;
        case 5: e.kind = EntryKind::kRoot; break;
        default: e.kind = EntryKind::kStream; e.name.clear(); break;
      }
      e.left = LoadLe32(raw, 68);
      e.right = LoadLe32(raw, 72);
      e.child = LoadLe32(raw, 76);
      e.start_sector = LoadLe32(raw, 116);
      e.size = LoadLe64(raw, 120);
      // Version 3 files may carry garbage in the high size dword.
      if (h.major_version == 3) e.size &= 0xFFFFFFFFu;
      if (type != 1 && type != 2 && type != 5) e.size = 0;
      cf.entries_.push_back(std::move(e));
      if (type == 0) cf.entries_.back().left = cf.entries_.back().right = cf.entries_.back().child = kNoStream;
    }
  }
  if (cf.entries_.empty() || cf.entries_[0].kind != EntryKind::kRoot) {
    return MakeError(ErrorCode::kTruncatedFile, "missing root directory entry");
  }

  // Mini FAT.
  if (h.mini_fat_start_sector <= kMaxRegSect) {
    LURESCAN_ASSIGN_OR_RETURN(std::vector<uint32_t> chain,
                              cf.Chain(h.mini_fat_start_sector, cf.fat_, UINT64_MAX));
    for (uint32_t s : chain) {
      LURESCAN_ASSIGN_OR_RETURN(ByteView sec, sector_span(s));
      for (size_t i = 0; i + 4 <= sec.size(); i += 4) cf.mini_fat_.push_back(LoadLe32(sec, i));
    }
  }

  // Depth-first walk: in-order over each sibling tree, descending into
  // storages as they are reached.
  std::vector<bool> visited(cf.entries_.size(), false);
  visited[0] = true;
  struct Frame {
    uint32_t node;
    std::string prefix;
    bool expanded;
  };
  std::vector<Frame> stack;
  auto push_tree = [&](uint32_t root, const std::string& prefix) {
    if (root != kNoStream) stack.push_back({root, prefix, false});
  };
  push_tree(cf.entries_[0].child, "");
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.node >= cf.entries_.size()) continue;
    if (!f.expanded) {
      if (visited[f.node]) continue;  // cycle or shared subtree
      visited[f.node] = true;
      const DirectoryEntry& e = cf.entries_[f.node];
      // Right subtree after the node itself, left subtree before it.
      if (e.right != kNoStream) stack.push_back({e.right, f.prefix, false});
      stack.push_back({f.node, f.prefix, true});
      if (e.left != kNoStream) stack.push_back({e.left, f.prefix, false});
      continue;
    }
    const DirectoryEntry& e = cf.entries_[f.node];
    if (e.name.empty()) continue;
    std::string path = f.prefix.empty() ? e.name : f.prefix + "/" + e.name;
    if (e.kind == EntryKind::kStream) {
      cf.streams_.push_back({path, e.size});
      cf.path_index_.emplace_back(AsciiLower(path), f.node);
    } else if (e.kind == EntryKind::kStorage) {
      cf.storages_.push_back(path);
      // Children of this storage are visited next (depth-first).
      if (e.child != kNoStream) stack.push_back({e.child, path, false});
    }
  }
  return cf;
}

absl::StatusOr<std::vector<uint32_t>> CompoundFile::Chain(uint32_t start,
                                                          const std::vector<uint32_t>& fat,
                                                          uint64_t limit) const {
  std::vector<uint32_t> chain;
  std::vector<bool> seen(fat.size(), false);
  uint32_t cur = start;
  while (cur != kEndOfChain && chain.size() < limit) {
    if (cur > kMaxRegSect) {
      if (cur == kFreeSect && chain.empty()) break;  // empty stream marker
      return MakeError(ErrorCode::kTruncatedFile, Cat("invalid sector id ", cur, " in chain"));
    }
    if (cur >= fat.size()) {
      return MakeError(ErrorCode::kTruncatedFile, Cat("sector ", cur, " not covered by allocation table"));
    }
    if (seen[cur]) {
      return MakeError(ErrorCode::kCyclicFatChain, Cat("chain revisits sector ", cur));
    }
    seen[cur] = true;
    chain.push_back(cur);
    cur = fat[cur];
  }
  return chain;
}

absl::StatusOr<Bytes> CompoundFile::ReadRegular(uint32_t start, uint64_t size) const {
  ByteView bytes = *data_;
  const uint64_t ssize = header_.sector_size;
  uint64_t needed = (size + ssize - 1) / ssize;
  if (needed > bytes.size() / ssize + 1) {
    return MakeError(ErrorCode::kTruncatedFile, "stream larger than the file");
  }
  LURESCAN_ASSIGN_OR_RETURN(std::vector<uint32_t> chain, Chain(start, fat_, needed));
  if (chain.size() < needed) {
    return MakeError(ErrorCode::kTruncatedFile, "sector chain shorter than stream size");
  }
  Bytes out;
  out.reserve(size);
  for (uint32_t s : chain) {
    uint64_t off = (static_cast<uint64_t>(s) + 1) * ssize;
    uint64_t want = std::min<uint64_t>(ssize, size - out.size());
    if (off > bytes.size() || bytes.size() - off < want) {
      return MakeError(ErrorCode::kTruncatedFile, Cat("sector ", s, " runs past end of file"));
    }
    out.insert(out.end(), bytes.begin() + off, bytes.begin() + off + want);
  }
  return out;
}

absl::StatusOr<Bytes> CompoundFile::ReadMini(uint32_t start, uint64_t size) const {
  const DirectoryEntry& root = entries_[0];
  LURESCAN_ASSIGN_OR_RETURN(Bytes mini_stream, ReadRegular(root.start_sector, root.size));
  const uint64_t msize = header_.mini_sector_size;
  uint64_t needed = (size + msize - 1) / msize;
  LURESCAN_ASSIGN_OR_RETURN(std::vector<uint32_t> chain, Chain(start, mini_fat_, needed));
  if (chain.size() < needed) {
    return MakeError(ErrorCode::kTruncatedFile, "mini chain shorter than stream size");
  }
  Bytes out;
  out.reserve(size);
  for (uint32_t s : chain) {
    uint64_t off = static_cast<uint64_t>(s) * msize;
    uint64_t want = std::min<uint64_t>(msize, size - out.size());
    if (off > mini_stream.size() || mini_stream.size() - off < want) {
      return MakeError(ErrorCode::kTruncatedFile, Cat("mini sector ", s, " beyond mini stream"));
    }
    out.insert(out.end(), mini_stream.begin() + off, mini_stream.begin() + off + want);
  }
  return out;
}

const DirectoryEntry* CompoundFile::FindEntry(std::string_view path) const {
  std::string key = AsciiLower(path);
  while (!key.empty() && key.front() == '/') key.erase(key.begin());
  for (const auto& [p, idx] : path_index_) {
    if (p == key) return &entries_[idx];
  }
  return nullptr;
}

bool CompoundFile::HasStream(std::string_view path) const { return FindEntry(path) != nullptr; }

absl::StatusOr<Bytes> CompoundFile::ReadStream(std::string_view path) const {
  const DirectoryEntry* e = FindEntry(path);
  if (e == nullptr) {
    return MakeError(ErrorCode::kNotFound, Cat("no stream named ", path));
  }
  if (e->size == 0) return Bytes{};
  if (e->size < header_.mini_stream_cutoff) return ReadMini(e->start_sector, e->size);
  return ReadRegular(e->start_sector, e->size);
}

absl::StatusOr<std::vector<StreamInfo>> ListStreams(ByteView bytes) {
  LURESCAN_ASSIGN_OR_RETURN(CompoundFile cf, CompoundFile::Open(bytes));
  return cf.streams();
}

absl::StatusOr<Bytes> ReadStream(ByteView bytes, std::string_view path) {
  LURESCAN_ASSIGN_OR_RETURN(CompoundFile cf, CompoundFile::Open(bytes));
  return cf.ReadStream(path);
}

}  // namespace lurescan
