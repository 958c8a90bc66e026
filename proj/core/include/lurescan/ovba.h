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
// VBA project parsing: MS-OVBA stream decompression, module source
// extraction from the `dir` stream, VBA-stomping detection and
// auto-execution trigger discovery.

#ifndef LURESCAN_OVBA_H_
#define LURESCAN_OVBA_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"
#include "lurescan/cfbf.h"

namespace lurescan {

// Decompresses an MS-OVBA CompressedContainer: a 0x01 signature byte
// followed by chunks of at most 4096 decompressed bytes, each either raw or
// a sequence of flag bytes selecting literals and copy tokens.
//
// Errors: BadSignature, TruncatedChunk, OffsetOutOfRange.
absl::StatusOr<Bytes> DecompressContainer(ByteView compressed);

struct VbaModule {
  std::string name;
  std::string stream_name;
  std::string source_text;  // UTF-8
  uint32_t text_offset = 0;
  // Compiled p-code (the performance cache) precedes the compressed source.
  bool performance_cache_present = false;

  // Source destroyed while p-code remains.
  bool stomped() const;
};

// Parses a standalone vbaProject.bin.
absl::StatusOr<std::vector<VbaModule>> ParseProject(ByteView vba_project_bytes);

// Parses the project rooted at `vba_storage` (the storage holding `dir`,
// e.g. "VBA", "Macros/VBA" or "_VBA_PROJECT_CUR/VBA").
absl::StatusOr<std::vector<VbaModule>> ParseProject(const CompoundFile& file,
                                                    std::string_view vba_storage,
                                                    std::vector<std::string>* warnings = nullptr);

// Trigger procedure names recognized as auto-executing.
const std::vector<std::string_view>& RecognizedTriggers();

// Case-insensitive search for "Sub <name>" / "Function <name>" over the
// recognized triggers. Canonical names, deduplicated, in source order.
std::vector<std::string> FindTriggers(std::string_view source_text);

// Aggregate facts about a VBA project, consumed by the macro indicators.
struct VbaProjectReport {
  std::vector<VbaModule> modules;
  std::vector<std::string> triggers;
  bool any_stomped = false;
  std::vector<std::string> warnings;
};

VbaProjectReport SummarizeProject(std::vector<VbaModule> modules);

}  // namespace lurescan

#endif  // LURESCAN_OVBA_H_
