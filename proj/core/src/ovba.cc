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
#include "lurescan/ovba.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <regex>

#include "lurescan/strings.h"
#include "lurescan/error.h"
#include "lurescan/text.h"

namespace lurescan {
namespace {

constexpr size_t kChunkSize = 4096;

// dir stream record ids (MS-OVBA 2.3.4.2).
enum : uint16_t {
  kCodePage = 0x0003,
  kVersion = 0x0009,
  kModuleName = 0x0019,
  kModuleStreamName = 0x001A,
  kModuleOffset = 0x0031,
  kModuleTerminator = 0x002B,
  kDirTerminator = 0x0010,
};

}  // namespace

absl::StatusOr<Bytes> DecompressContainer(ByteView compressed) {
  if (compressed.empty() || compressed[0] != 0x01) {
    return MakeError(ErrorCode::kBadSignature, "compressed container must start with 0x01");
  }
  Bytes out;
  size_t pos = 1;
  while (pos < compressed.size()) {
    if (compressed.size() - pos < 2) {
      return MakeError(ErrorCode::kTruncatedChunk, "chunk header cut short");
    }
    uint16_t header = LoadLe16(compressed, pos);
    size_t chunk_size = (header & 0x0FFF) + 3;  // includes the header
    bool is_compressed = (header & 0x8000) != 0;
    size_t chunk_end = pos + chunk_size;
    if (chunk_end > compressed.size()) {
      return MakeError(ErrorCode::kTruncatedChunk,
                       Cat("chunk at ", pos, " declares ", chunk_size, " bytes, ",
                                    compressed.size() - pos, " available"));
    }
    pos += 2;
    const size_t chunk_start = out.size();

    if (!is_compressed) {
      if (chunk_end - pos < kChunkSize) {
        return MakeError(ErrorCode::kTruncatedChunk, "raw chunk shorter than 4096 bytes");
      }
      out.insert(out.end(), compressed.begin() + pos, compressed.begin() + pos + kChunkSize);
      pos = chunk_end;
      continue;
    }

    while (pos < chunk_end) {
      uint8_t flags = compressed[pos++];
      for (int bit = 0; bit < 8 && pos < chunk_end; ++bit) {
        if ((flags & (1u << bit)) == 0) {
          if (out.size() - chunk_start < kChunkSize) out.push_back(compressed[pos]);
          ++pos;
          continue;
        }
        if (chunk_end - pos < 2) {
          return MakeError(ErrorCode::kTruncatedChunk, "copy token cut short");
        }
        uint16_t token = LoadLe16(compressed, pos);
        pos += 2;
        // The offset/length split widens as the chunk fills.
        size_t difference = out.size() - chunk_start;
        unsigned bit_count = difference <= 1 ? 0 : std::bit_width(difference - 1);
        bit_count = std::max(bit_count, 4u);
        uint16_t length_mask = static_cast<uint16_t>(0xFFFF >> bit_count);
        size_t length = (token & length_mask) + 3;
        size_t offset = (static_cast<size_t>(token) >> (16 - bit_count)) + 1;
        if (offset > difference) {
          return MakeError(ErrorCode::kOffsetOutOfRange,
                           Cat("copy token reaches ", offset, " bytes back, only ",
                                        difference, " decompressed in chunk"));
        }
        size_t source = out.size() - offset;
        for (size_t i = 0; i < length && out.size() - chunk_start < kChunkSize; ++i) {
          out.push_back(out[source + i]);
        }
      }
    }
  }
  return out;
}

bool VbaModule::stomped() const {
  return performance_cache_present &&
         StripAsciiWhitespace(source_text).empty();
}

absl::StatusOr<std::vector<VbaModule>> ParseProject(ByteView vba_project_bytes) {
  LURESCAN_ASSIGN_OR_RETURN(CompoundFile file, CompoundFile::Open(vba_project_bytes));
  return ParseProject(file, "VBA");
}

absl::StatusOr<std::vector<VbaModule>> ParseProject(const CompoundFile& file,
                                                    std::string_view vba_storage,
                                                    std::vector<std::string>* warnings) {
  std::string prefix(vba_storage);
  if (!prefix.empty() && prefix.back() != '/') prefix += '/';
  LURESCAN_ASSIGN_OR_RETURN(Bytes dir_compressed, file.ReadStream(prefix + "dir"));
  auto dir_or = DecompressContainer(dir_compressed);
  if (!dir_or.ok()) {
    return MakeError(ErrorCode::kMalformedDirStream,
                     Cat("dir stream: ", dir_or.status().message()));
  }
  const Bytes& dir = *dir_or;

  int code_page = 1252;
  std::vector<VbaModule> modules;
  VbaModule* current = nullptr;
  std::vector<Bytes> raw_stream_names;

  ByteReader reader(dir);
  while (!reader.empty()) {
    uint16_t id;
    uint32_t size;
    if (!reader.ReadU16(&id) || !reader.ReadU32(&size)) {
      return MakeError(ErrorCode::kMalformedDirStream,
                       Cat("truncated record header at ", reader.position()));
    }
    // PROJECTVERSION's size field is a reserved constant; 6 bytes follow.
    if (id == kVersion) size = 6;
    ByteView payload;
    if (!reader.ReadSpan(size, &payload)) {
      return MakeError(ErrorCode::kMalformedDirStream,
                       Cat("record 0x", HexNumber(id), " overruns dir stream"));
    }
    switch (id) {
      case kCodePage:
        if (payload.size() >= 2) code_page = LoadLe16(payload, 0);
        break;
      case kModuleName:
        modules.emplace_back();
        raw_stream_names.emplace_back();
        current = &modules.back();
        current->name = DecodeCodePage(payload, code_page);
        break;
      case kModuleStreamName:
        if (current == nullptr) {
          return MakeError(ErrorCode::kMalformedDirStream, "stream name outside a module");
        }
        raw_stream_names.back().assign(payload.begin(), payload.end());
        current->stream_name = DecodeCodePage(payload, code_page);
        break;
      case kModuleOffset:
        if (current == nullptr || payload.size() < 4) {
          return MakeError(ErrorCode::kMalformedDirStream, "bad MODULEOFFSET record");
        }
        current->text_offset = LoadLe32(payload, 0);
        break;
      case kModuleTerminator:
        current = nullptr;
        break;
      default:
        break;
    }
    if (id == kDirTerminator) break;
  }

  for (VbaModule& m : modules) {
    if (m.stream_name.empty()) m.stream_name = m.name;
    auto stream = file.ReadStream(prefix + m.stream_name);
    if (!stream.ok()) {
      if (warnings) warnings->push_back(Cat("module ", m.name, ": ", stream.status().message()));
      continue;
    }
    m.performance_cache_present = m.text_offset > 0 && stream->size() >= m.text_offset;
    if (m.text_offset >= stream->size()) {
      if (warnings) warnings->push_back(Cat("module ", m.name, ": text offset past stream end"));
      continue;
    }
    auto source = DecompressContainer(ByteView(*stream).subspan(m.text_offset));
    if (!source.ok()) {
      if (warnings) warnings->push_back(Cat("module ", m.name, ": ", source.status().message()));
      continue;
    }
    m.source_text = DecodeCodePage(*source, code_page);
  }
  return modules;
}

const std::vector<std::string_view>& RecognizedTriggers() {
  static const std::vector<std::string_view> kTriggers = {
      "Workbook_Open", "Workbook_Close", "AutoOpen",       "Auto_Open",
      "AutoClose",     "Auto_Close",     "Document_Open", "Document_Close",
  };
  return kTriggers;
}

std::vector<std::string> FindTriggers(std::string_view source_text) {
  // Declarations: optional scope keyword, Sub|Function, then the name.
  static const std::regex kDecl(R"((?:^|[^A-Za-z0-9_])(sub|function)[ \t]+([A-Za-z_][A-Za-z0-9_]*))",
                                std::regex::ECMAScript | std::regex::icase);
  std::vector<std::string> found;
  std::string text(source_text);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kDecl); it != std::sregex_iterator();
       ++it) {
    std::string name = (*it)[2].str();
    for (std::string_view trigger : RecognizedTriggers()) {
      if (EqualsIgnoreAsciiCase(name, trigger) &&
          std::find(found.begin(), found.end(), trigger) == found.end()) {
        found.emplace_back(trigger);
      }
    }
  }
  return found;
}

VbaProjectReport SummarizeProject(std::vector<VbaModule> modules) {
  VbaProjectReport report;
  for (const VbaModule& m : modules) {
    report.any_stomped |= m.stomped();
    for (std::string& t : FindTriggers(m.source_text)) {
      if (std::find(report.triggers.begin(), report.triggers.end(), t) == report.triggers.end()) {
        report.triggers.push_back(std::move(t));
      }
    }
  }
  report.modules = std::move(modules);
  return report;
}

}  // namespace lurescan
