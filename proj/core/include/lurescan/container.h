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
// Office container identification, part enumeration, media extraction and
// active-content indicators. Nothing here renders or executes content.

#ifndef LURESCAN_CONTAINER_H_
#define LURESCAN_CONTAINER_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"
#include "lurescan/cfbf.h"
#include "lurescan/ovba.h"
#include "lurescan/zip_archive.h"

namespace lurescan {

inline constexpr uint8_t kZipMagic[4] = {0x50, 0x4B, 0x03, 0x04};

enum class ContainerKind { kOoxmlZip, kCfbf, kEncryptedOoxml, kUnknown };

std::string_view ContainerKindName(ContainerKind kind);
std::optional<ContainerKind> ParseContainerKind(std::string_view name);

// Total: garbage, short and empty inputs map to kUnknown.
ContainerKind DetectContainerKind(ByteView file_bytes);

struct PartEntry {
  std::string path;  // never empty, never starts with '/'
  Bytes bytes;
  std::optional<std::string> declared_type;
};

struct MediaListing {
  std::vector<PartEntry> parts;
  std::vector<std::string> warnings;
};

// True for paths under word/media/, xl/media/ or ppt/media/.
bool IsMediaPath(std::string_view path);

// Media parts in archive order, bytes exactly as stored after inflation.
// Entries that fail to decompress are skipped with a warning.
MediaListing ListMedia(const ZipArchive& archive);
absl::StatusOr<MediaListing> ListMedia(ByteView zip_bytes);

enum class SheetVisibility { kVisible, kHidden, kVeryHidden };

std::string_view SheetVisibilityName(SheetVisibility v);

struct SheetMeta {
  std::string name;
  SheetVisibility visibility = SheetVisibility::kVisible;
  bool is_macrosheet = false;
  int ordinal = 0;
};

// Errors: MissingWorkbook, MalformedXml.
absl::StatusOr<std::vector<SheetMeta>> ExtractSheetMetadata(const ZipArchive& archive);

// Scans BoundSheet8 records (0x0085) in a BIFF8 Workbook stream's globals
// substream. Stops quietly at the first malformed record.
std::vector<SheetMeta> ScanBiffBoundSheets(ByteView workbook_stream);

struct MacroEvidence {
  bool has_vba = false;
  bool has_xlm = false;
  bool has_pcode_only = false;
  bool has_dde = false;
  std::vector<std::string> triggers;
  std::optional<std::string> first_sheet_name;
  int hidden_sheet_count = 0;
  bool silent_builder = false;
  std::vector<SheetMeta> sheets;
  std::vector<std::string> warnings;

  bool any_active_content() const { return has_vba || has_xlm || has_pcode_only || has_dde; }
};

// Path of the VBA project part inside an OOXML package, if any.
std::optional<std::string> FindVbaProjectPart(const ZipArchive& archive);

// Storage holding VBA/dir inside a legacy compound file ("VBA",
// "Macros/VBA", "_VBA_PROJECT_CUR/VBA"), if any.
std::optional<std::string> FindVbaStorage(const CompoundFile& file);

// Textual DDE scan of instrText / fldSimple field codes and ddeLink parts.
bool ContainsDde(const ZipArchive& archive);
// Exposed for tests: does a field instruction string invoke DDE?
bool IsDdeInstruction(std::string_view instruction);

MacroEvidence MacroIndicators(const ZipArchive& archive, const VbaProjectReport* ovba);
// Legacy binary documents (xls/doc): VBA storages and BIFF BoundSheets.
MacroEvidence MacroIndicators(const CompoundFile& file, const VbaProjectReport* ovba);

}  // namespace lurescan

#endif  // LURESCAN_CONTAINER_H_
