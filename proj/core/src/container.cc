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
#include "lurescan/container.h"

#include <algorithm>
#include <cstring>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "lurescan/strings.h"
#include "lurescan/error.h"
#include "lurescan/text.h"

namespace lurescan {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kMediaPrefixes[] = {"word/media/", "xl/media/", "ppt/media/"};
constexpr std::string_view kDocuSign = "DocuSign";

std::string_view LocalName(std::string_view qualified) {
  size_t colon = qualified.rfind(':');
  return colon == std::string_view::npos ? qualified : qualified.substr(colon + 1);
}

// First child whose local name matches, or nullptr.
const pt::ptree* Child(const pt::ptree& tree, std::string_view local) {
  for (const auto& [key, child] : tree) {
    if (LocalName(key) == local) return &child;
  }
  return nullptr;
}

std::optional<std::string> Attribute(const pt::ptree& node, std::string_view local) {
  const pt::ptree* attrs = Child(node, "<xmlattr>");
  if (attrs == nullptr) return std::nullopt;
  for (const auto& [key, value] : *attrs) {
    if (LocalName(key) == local) return value.data();
  }
  return std::nullopt;
}

absl::StatusOr<pt::ptree> ParseXml(const Bytes& bytes, std::string_view part) {
  std::string text(AsChars(bytes));
  // Strip a UTF-8 byte-order mark; the parser would treat it as content.
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    return MakeError(ErrorCode::kMalformedXml, Cat(part, ": ", e.message()));
  }
  return tree;
}

std::string ParentDir(std::string_view path) {
  size_t slash = path.rfind('/');
  return slash == std::string_view::npos ? "" : std::string(path.substr(0, slash + 1));
}

// Resolves a relationship target against the directory of its source part.
std::string ResolveTarget(std::string_view source_part, std::string_view target) {
  if (target.starts_with("/")) return NormalizePartPath(target);
  std::vector<std::string> parts;
  std::string joined = ParentDir(source_part) + std::string(target);
  for (std::string_view seg : Split(joined, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
      continue;
    }
    parts.emplace_back(seg);
  }
  return Join(parts, "/");
}

std::string RelsPathFor(std::string_view part) {
  size_t slash = part.rfind('/');
  std::string dir = slash == std::string_view::npos ? "" : std::string(part.substr(0, slash + 1));
  std::string name(slash == std::string_view::npos ? part : part.substr(slash + 1));
  return Cat(dir, "_rels/", name, ".rels");
}

// Id -> resolved target for one .rels part; empty when absent or broken.
std::map<std::string, std::string> ReadRelationships(const ZipArchive& archive,
                                                     std::string_view source_part) {
  std::map<std::string, std::string> out;
  auto bytes = archive.Read(RelsPathFor(source_part));
  if (!bytes.ok()) return out;
  auto tree = ParseXml(*bytes, "rels");
  if (!tree.ok()) return out;
  const pt::ptree* root = Child(*tree, "Relationships");
  if (root == nullptr) return out;
  for (const auto& [key, rel] : *root) {
    if (LocalName(key) != "Relationship") continue;
    auto id = Attribute(rel, "Id");
    auto target = Attribute(rel, "Target");
    auto mode = Attribute(rel, "TargetMode");
    if (!id || !target) continue;
    if (mode && EqualsIgnoreAsciiCase(*mode, "External")) {
      out[*id] = *target;
    } else {
      out[*id] = ResolveTarget(source_part, *target);
    }
  }
  return out;
}

std::optional<std::string> LocateWorkbook(const ZipArchive& archive) {
  if (const ZipEntry* e = archive.Find("xl/workbook.xml")) return e->path;
  auto bytes = archive.Read("_rels/.rels");
  if (!bytes.ok()) return std::nullopt;
  auto tree = ParseXml(*bytes, "_rels/.rels");
  if (!tree.ok()) return std::nullopt;
  const pt::ptree* root = Child(*tree, "Relationships");
  if (root == nullptr) return std::nullopt;
  for (const auto& [key, rel] : *root) {
    if (LocalName(key) != "Relationship") continue;
    auto type = Attribute(rel, "Type");
    auto target = Attribute(rel, "Target");
    if (type && target && std::string_view(*type).ends_with("/officeDocument") &&
        EndsWithIgnoreCase(*target, "workbook.xml")) {
      std::string path = ResolveTarget("", *target);
      if (archive.Find(path) != nullptr) return archive.Find(path)->path;
    }
  }
  return std::nullopt;
}

// [Content_Types].xml: overrides by part name, defaults by extension.
struct ContentTypes {
  std::map<std::string, std::string> overrides;  // lowercased part path
  std::map<std::string, std::string> defaults;   // lowercased extension

  std::optional<std::string> For(std::string_view path) const {
    auto it = overrides.find(AsciiLower(path));
    if (it != overrides.end()) return it->second;
    size_t dot = path.rfind('.');
    if (dot != std::string_view::npos) {
      auto d = defaults.find(AsciiLower(path.substr(dot + 1)));
      if (d != defaults.end()) return d->second;
    }
    return std::nullopt;
  }
};

ContentTypes ReadContentTypes(const ZipArchive& archive) {
  ContentTypes types;
  auto bytes = archive.Read("[Content_Types].xml");
  if (!bytes.ok()) return types;
  auto tree = ParseXml(*bytes, "[Content_Types].xml");
  if (!tree.ok()) return types;
  const pt::ptree* root = Child(*tree, "Types");
  if (root == nullptr) return types;
  for (const auto& [key, node] : *root) {
    auto content_type = Attribute(node, "ContentType");
    if (!content_type) continue;
    if (LocalName(key) == "Override") {
      if (auto name = Attribute(node, "PartName")) {
        types.overrides[AsciiLower(NormalizePartPath(*name))] = *content_type;
      }
    } else if (LocalName(key) == "Default") {
      if (auto ext = Attribute(node, "Extension")) types.defaults[AsciiLower(*ext)] = *content_type;
    }
  }
  return types;
}

std::string DecodeXmlEntities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 8) {
      out += s[i];
      continue;
    }
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (ent == "quot") out += '"';
    else if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "apos") out += '\'';
    else {
      out += s[i];
      continue;
    }
    i = semi;
  }
  return out;
}

// Walks tags of an XML part without building a tree, collecting field
// instructions. Complex fields may split one instruction across many
// instrText runs; a fldChar "begin" starts a new instruction.
bool XmlPartHasDde(std::string_view xml) {
  std::string pending;
  size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string_view::npos) {
    size_t end = xml.find('>', pos);
    if (end == std::string_view::npos) break;
    std::string_view tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '/' || tag[0] == '?' || tag[0] == '!') continue;
    size_t name_end = tag.find_first_of(" \t\r\n/");
    std::string_view name = LocalName(tag.substr(0, name_end));
    if (name == "instrText") {
      if (!tag.empty() && tag.back() == '/') continue;
      size_t close = xml.find('<', pos);
      if (close == std::string_view::npos) close = xml.size();
      pending += DecodeXmlEntities(xml.substr(pos, close - pos));
      pos = close;
    } else if (name == "fldChar") {
      if (tag.find("\"begin\"") != std::string_view::npos ||
          tag.find("'begin'") != std::string_view::npos) {
        if (IsDdeInstruction(pending)) return true;
        pending.clear();
      }
    } else if (name == "fldSimple") {
      size_t attr = tag.find("instr=");
      if (attr != std::string_view::npos && attr + 6 < tag.size()) {
        char quote = tag[attr + 6];
        size_t close = tag.find(quote, attr + 7);
        if (close != std::string_view::npos &&
            IsDdeInstruction(DecodeXmlEntities(tag.substr(attr + 7, close - attr - 7)))) {
          return true;
        }
      }
    } else if (name == "ddeLink") {
      return true;
    }
  }
  return IsDdeInstruction(pending);
}

int CountHidden(const std::vector<SheetMeta>& sheets) {
  return static_cast<int>(std::count_if(sheets.begin(), sheets.end(), [](const SheetMeta& s) {
    return s.visibility != SheetVisibility::kVisible;
  }));
}

void FinishEvidence(MacroEvidence& ev, const VbaProjectReport* ovba) {
  if (ovba != nullptr && ev.has_vba) {
    ev.triggers = ovba->triggers;
    ev.has_pcode_only = ovba->any_stomped;
    for (const std::string& w : ovba->warnings) ev.warnings.push_back(w);
  }
  if (!ev.sheets.empty()) ev.first_sheet_name = ev.sheets.front().name;
  ev.hidden_sheet_count = CountHidden(ev.sheets);
  ev.silent_builder = ev.first_sheet_name == kDocuSign && ev.has_xlm && ev.hidden_sheet_count >= 1;
}

}  // namespace

std::string_view ContainerKindName(ContainerKind kind) {
  switch (kind) {
    case ContainerKind::kOoxmlZip: return "OoxmlZip";
    case ContainerKind::kCfbf: return "Cfbf";
    case ContainerKind::kEncryptedOoxml: return "EncryptedOoxml";
    case ContainerKind::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<ContainerKind> ParseContainerKind(std::string_view name) {
  for (ContainerKind k : {ContainerKind::kOoxmlZip, ContainerKind::kCfbf,
                          ContainerKind::kEncryptedOoxml, ContainerKind::kUnknown}) {
    if (ContainerKindName(k) == name) return k;
  }
  return std::nullopt;
}

ContainerKind DetectContainerKind(ByteView file_bytes) {
  if (file_bytes.size() >= 4 && std::memcmp(file_bytes.data(), kZipMagic, 4) == 0) {
    return ContainerKind::kOoxmlZip;
  }
  if (file_bytes.size() < kCfbfSignature.size() ||
      std::memcmp(file_bytes.data(), kCfbfSignature.data(), kCfbfSignature.size()) != 0) {
    return ContainerKind::kUnknown;
  }
  auto file = CompoundFile::Open(file_bytes);
  if (file.ok() && file->HasStream("EncryptionInfo") && file->HasStream("EncryptedPackage")) {
    return ContainerKind::kEncryptedOoxml;
  }
  return ContainerKind::kCfbf;
}

bool IsMediaPath(std::string_view path) {
  for (std::string_view prefix : kMediaPrefixes) {
    if (StartsWithIgnoreCase(path, prefix) && path.size() > prefix.size()) return true;
  }
  return false;
}

MediaListing ListMedia(const ZipArchive& archive) {
  MediaListing listing;
  ContentTypes types = ReadContentTypes(archive);
  for (const ZipEntry& entry : archive.entries()) {
    if (!IsMediaPath(entry.path)) continue;
    auto bytes = archive.Read(entry);
    if (!bytes.ok()) {
      listing.warnings.push_back(Cat(entry.path, ": ", bytes.status().message()));
      continue;
    }
    listing.parts.push_back({entry.path, *std::move(bytes), types.For(entry.path)});
  }
  return listing;
}

absl::StatusOr<MediaListing> ListMedia(ByteView zip_bytes) {
  LURESCAN_ASSIGN_OR_RETURN(ZipArchive archive, ZipArchive::Open(zip_bytes));
  return ListMedia(archive);
}

std::string_view SheetVisibilityName(SheetVisibility v) {
  switch (v) {
    case SheetVisibility::kVisible: return "visible";
    case SheetVisibility::kHidden: return "hidden";
    case SheetVisibility::kVeryHidden: return "veryHidden";
  }
  return "visible";
}

absl::StatusOr<std::vector<SheetMeta>> ExtractSheetMetadata(const ZipArchive& archive) {
  std::optional<std::string> workbook = LocateWorkbook(archive);
  if (!workbook) return MakeError(ErrorCode::kMissingWorkbook, "no xl/workbook.xml part");
  LURESCAN_ASSIGN_OR_RETURN(Bytes bytes, archive.Read(*workbook));
  LURESCAN_ASSIGN_OR_RETURN(pt::ptree tree, ParseXml(bytes, *workbook));
  const pt::ptree* root = Child(tree, "workbook");
  if (root == nullptr) return MakeError(ErrorCode::kMalformedXml, "workbook root element missing");

  std::map<std::string, std::string> rels = ReadRelationships(archive, *workbook);
  std::vector<SheetMeta> sheets;
  const pt::ptree* list = Child(*root, "sheets");
  if (list == nullptr) return sheets;
  for (const auto& [key, node] : *list) {
    if (LocalName(key) != "sheet") continue;
    SheetMeta meta;
    meta.name = Attribute(node, "name").value_or("");
    std::string state = Attribute(node, "state").value_or("");
    if (state == "hidden") {
      meta.visibility = SheetVisibility::kHidden;
    } else if (state == "veryHidden") {
      meta.visibility = SheetVisibility::kVeryHidden;
    }
    if (auto rid = Attribute(node, "id")) {
      auto it = rels.find(*rid);
      if (it != rels.end()) {
        meta.is_macrosheet = ContainsIgnoreCase(it->second, "macrosheets/");
      }
    }
    meta.ordinal = static_cast<int>(sheets.size());
    sheets.push_back(std::move(meta));
  }
  return sheets;
}

std::vector<SheetMeta> ScanBiffBoundSheets(ByteView stream) {
  constexpr uint16_t kBoundSheet = 0x0085;
  constexpr uint16_t kEof = 0x000A;
  std::vector<SheetMeta> sheets;
  ByteReader reader(stream);
  while (reader.remaining() >= 4) {
    uint16_t id, size;
    ByteView body;
    if (!reader.ReadU16(&id) || !reader.ReadU16(&size) || !reader.ReadSpan(size, &body)) break;
    if (id == kEof) break;
    if (id != kBoundSheet || body.size() < 8) continue;
    uint8_t state = body[4] & 0x03;
    uint8_t type = body[5];
    size_t cch = body[6];
    bool wide = (body[7] & 0x01) != 0;
    ByteView chars = body.subspan(8);
    size_t need = wide ? cch * 2 : cch;
    if (chars.size() < need) break;
    SheetMeta meta;
    meta.name = wide ? Utf16LeToUtf8(chars.first(need)) : DecodeLatin1(chars.first(need));
    meta.visibility = state == 1   ? SheetVisibility::kHidden
                      : state == 2 ? SheetVisibility::kVeryHidden
                                   : SheetVisibility::kVisible;
    meta.is_macrosheet = type == 0x01;
    meta.ordinal = static_cast<int>(sheets.size());
    sheets.push_back(std::move(meta));
  }
  return sheets;
}

std::optional<std::string> FindVbaProjectPart(const ZipArchive& archive) {
  for (const ZipEntry& entry : archive.entries()) {
    if (EndsWithIgnoreCase(entry.path, "vbaProject.bin")) return entry.path;
  }
  return std::nullopt;
}

std::optional<std::string> FindVbaStorage(const CompoundFile& file) {
  for (const StreamInfo& s : file.streams()) {
    if (EqualsIgnoreAsciiCase(s.path, "VBA/dir") || EndsWithIgnoreCase(s.path, "/VBA/dir")) {
      return s.path.substr(0, s.path.size() - 4);
    }
  }
  return std::nullopt;
}

bool IsDdeInstruction(std::string_view instruction) {
  std::string upper = AsciiUpper(instruction);
  if (upper.find("DDEAUTO") != std::string::npos) return true;
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (size_t at = upper.find("DDE"); at != std::string::npos; at = upper.find("DDE", at + 1)) {
    bool left = at == 0 || !is_word(upper[at - 1]);
    bool right = at + 3 >= upper.size() || !is_word(upper[at + 3]);
    if (left && right) return true;
  }
  return false;
}

bool ContainsDde(const ZipArchive& archive) {
  for (const ZipEntry& entry : archive.entries()) {
    if (!EndsWithIgnoreCase(entry.path, ".xml") || IsMediaPath(entry.path)) continue;
    auto bytes = archive.Read(entry);
    if (!bytes.ok()) continue;
    if (XmlPartHasDde(AsChars(*bytes))) return true;
  }
  return false;
}

MacroEvidence MacroIndicators(const ZipArchive& archive, const VbaProjectReport* ovba) {
  MacroEvidence ev;
  ev.has_vba = FindVbaProjectPart(archive).has_value();
  for (const ZipEntry& entry : archive.entries()) {
    if (StartsWithIgnoreCase(entry.path, "xl/macrosheets/")) ev.has_xlm = true;
  }
  ev.has_dde = ContainsDde(archive);
  auto sheets = ExtractSheetMetadata(archive);
  if (sheets.ok()) {
    ev.sheets = *std::move(sheets);
    for (const SheetMeta& s : ev.sheets) ev.has_xlm |= s.is_macrosheet;
  } else if (!HasErrorCode(sheets.status(), ErrorCode::kMissingWorkbook)) {
    ev.warnings.emplace_back(sheets.status().message());
  }
  FinishEvidence(ev, ovba);
  return ev;
}

MacroEvidence MacroIndicators(const CompoundFile& file, const VbaProjectReport* ovba) {
  MacroEvidence ev;
  ev.has_vba = FindVbaStorage(file).has_value();
  for (std::string_view name : {"Workbook", "Book"}) {
    auto stream = file.ReadStream(name);
    if (!stream.ok()) continue;
    ev.sheets = ScanBiffBoundSheets(*stream);
    for (const SheetMeta& s : ev.sheets) ev.has_xlm |= s.is_macrosheet;
    break;
  }
  // Word 97 field codes: DDE instructions live in the document text.
  if (auto word = file.ReadStream("WordDocument"); word.ok()) {
    std::string_view raw = AsChars(*word);
    std::string narrow = Utf16LeToUtf8(*word);
    ev.has_dde = raw.find("DDEAUTO") != std::string_view::npos ||
                 narrow.find("DDEAUTO") != std::string::npos ||
                 raw.find("\x13 DDE ") != std::string_view::npos ||
                 narrow.find("\x13 DDE ") != std::string::npos;
  }
  FinishEvidence(ev, ovba);
  return ev;
}

}  // namespace lurescan
