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
#include "lurescan/json_codec.h"

#include "lurescan/error.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

template <typename T>
Json Optional(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> OptionalField(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

absl::Status Invalid(const char* what, const std::exception& e) {
  return MakeError(ErrorCode::kInvalidArgument, Cat(what, ": ", e.what()));
}

}  // namespace

Json ToJson(const SheetMeta& sheet) {
  return {{"name", sheet.name},
          {"visibility", SheetVisibilityName(sheet.visibility)},
          {"is_macrosheet", sheet.is_macrosheet},
          {"ordinal", sheet.ordinal}};
}

Json ToJson(const MacroEvidence& ev) {
  Json sheets = Json::array();
  for (const SheetMeta& s : ev.sheets) sheets.push_back(ToJson(s));
  return {{"has_vba", ev.has_vba},
          {"has_xlm", ev.has_xlm},
          {"has_pcode_only", ev.has_pcode_only},
          {"has_dde", ev.has_dde},
          {"triggers", ev.triggers},
          {"first_sheet_name", Optional(ev.first_sheet_name)},
          {"hidden_sheet_count", ev.hidden_sheet_count},
          {"silent_builder", ev.silent_builder},
          {"sheets", sheets}};
}

Json ToJson(const PerceptualHash& hash) {
  return {{"bits", HashBitsToHex(hash.bits)}, {"algorithm", HashAlgorithmName(hash.algorithm)}};
}

Json ToJson(const ImageRecord& image) {
  return {{"sha256", image.sha256},
          {"phash", ToJson(image.phash)},
          {"width", image.width},
          {"height", image.height},
          {"format", image.format},
          {"labeled_malicious", Optional(image.labeled_malicious)}};
}

Json ToJson(const SampleRecord& s) {
  return {{"file_sha256", s.file_sha256},
          {"container_kind", ContainerKindName(s.container_kind)},
          {"family", Optional(s.family)},
          {"macro_evidence", ToJson(s.macro_evidence)},
          {"image_ids", s.image_ids},
          {"first_seen", s.first_seen},
          {"source_path", s.source_path}};
}

Json ToJson(const DbStats& stats) {
  Json families = Json::object();
  for (const auto& [family, n] : stats.per_family_counts) families[family] = n;
  return {{"sample_count", stats.sample_count},
          {"unique_image_count", stats.unique_image_count},
          {"unique_phash_count", stats.unique_phash_count},
          {"singleton_sha_count", stats.singleton_sha_count},
          {"singleton_phash_count", stats.singleton_phash_count},
          {"unlabeled_sample_count", stats.unlabeled_sample_count},
          {"per_family_counts", families}};
}

Json ToJson(const KeywordHit& hit) {
  return {{"phrase", hit.phrase},
          {"language", hit.language},
          {"matched_span", hit.matched_span},
          {"edit_distance", hit.edit_distance},
          {"offset", hit.offset}};
}

Json ToJson(const ImageThreat& threat) {
  Json hits = Json::array();
  for (const KeywordHit& h : threat.hits) hits.push_back(ToJson(h));
  return {{"is_malicious", threat.is_malicious},
          {"hits", hits},
          {"ocr_text", threat.ocr_text},
          {"engine_id", threat.engine_id}};
}

Json ToJson(const Verdict& v) {
  Json layer = v.layer ? Json(LayerName(*v.layer)) : Json(nullptr);
  return {{"outcome", OutcomeName(v.outcome)},
          {"layer", layer},
          {"evidence", v.evidence},
          {"attributed_family", Optional(v.attributed_family)}};
}

Json ToJson(const EvalMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"tn", m.tn},
          {"precision", Round3(m.precision)},
          {"recall", Round3(m.recall)},
          {"accuracy", Round3(m.accuracy)},
          {"f1", Round3(m.f1)}};
}

Json ToJson(const ScanReport& report) {
  Json images = Json::array();
  for (const ScannedImage& img : report.analysis.images) {
    Json j = {{"part_path", img.part_path},
              {"sha256", img.sha256},
              {"format", img.format},
              {"unhashable_visual", img.unhashable_visual}};
    j["phash"] = img.record ? ToJson(img.record->phash) : Json(nullptr);
    if (img.record) {
      j["width"] = img.record->width;
      j["height"] = img.record->height;
    }
    j["threat"] = img.threat ? ToJson(*img.threat) : Json(nullptr);
    images.push_back(std::move(j));
  }
  const SampleRecord& s = report.analysis.sample;
  return {{"path", report.path},
          {"file_sha256", s.file_sha256},
          {"container_kind", ContainerKindName(s.container_kind)},
          {"verdict", ToJson(report.verdict)},
          {"macro_evidence", ToJson(s.macro_evidence)},
          {"images", images},
          {"decrypted_with", Optional(report.analysis.decrypted_with)},
          {"container_error", Optional(report.analysis.container_error)},
          {"warnings", report.analysis.warnings}};
}

Json ErrorJson(const absl::Status& status) {
  std::optional<ErrorCode> code = GetErrorCode(status);
  return {{"error",
           {{"code", code ? std::string(ErrorCodeName(*code)) : std::string("Internal")},
            {"message", std::string(status.message())}}}};
}

absl::StatusOr<SheetMeta> SheetMetaFromJson(const Json& j) {
  try {
    SheetMeta s;
    s.name = j.at("name").get<std::string>();
    std::string vis = j.value("visibility", "visible");
    s.visibility = vis == "hidden"       ? SheetVisibility::kHidden
                   : vis == "veryHidden" ? SheetVisibility::kVeryHidden
                                         : SheetVisibility::kVisible;
    s.is_macrosheet = j.value("is_macrosheet", false);
    s.ordinal = j.value("ordinal", 0);
    return s;
  } catch (const Json::exception& e) {
    return Invalid("sheet", e);
  }
}

absl::StatusOr<MacroEvidence> MacroEvidenceFromJson(const Json& j) {
  try {
    MacroEvidence ev;
    ev.has_vba = j.value("has_vba", false);
    ev.has_xlm = j.value("has_xlm", false);
    ev.has_pcode_only = j.value("has_pcode_only", false);
    ev.has_dde = j.value("has_dde", false);
    ev.triggers = j.value("triggers", std::vector<std::string>{});
    ev.first_sheet_name = OptionalField<std::string>(j, "first_sheet_name");
    ev.hidden_sheet_count = j.value("hidden_sheet_count", 0);
    ev.silent_builder = j.value("silent_builder", false);
    if (j.contains("sheets")) {
      for (const Json& s : j["sheets"]) {
        LURESCAN_ASSIGN_OR_RETURN(SheetMeta meta, SheetMetaFromJson(s));
        ev.sheets.push_back(std::move(meta));
      }
    }
    return ev;
  } catch (const Json::exception& e) {
    return Invalid("macro evidence", e);
  }
}

absl::StatusOr<ImageRecord> ImageRecordFromJson(const Json& j) {
  try {
    ImageRecord r;
    r.sha256 = j.at("sha256").get<std::string>();
    const Json& ph = j.at("phash");
    auto bits = HexToHashBits(ph.at("bits").get<std::string>());
    auto algorithm = ParseHashAlgorithm(ph.value("algorithm", "dct_phash"));
    if (!bits || !algorithm) return MakeError(ErrorCode::kInvalidArgument, "bad phash field");
    r.phash = {*bits, *algorithm};
    r.width = j.value("width", 0);
    r.height = j.value("height", 0);
    r.format = j.value("format", "");
    r.labeled_malicious = OptionalField<bool>(j, "labeled_malicious");
    return r;
  } catch (const Json::exception& e) {
    return Invalid("image record", e);
  }
}

absl::StatusOr<SampleRecord> SampleRecordFromJson(const Json& j) {
  try {
    SampleRecord s;
    s.file_sha256 = j.at("file_sha256").get<std::string>();
    s.container_kind = ParseContainerKind(j.value("container_kind", "Unknown")).value_or(ContainerKind::kUnknown);
    s.family = OptionalField<std::string>(j, "family");
    if (j.contains("macro_evidence")) {
      LURESCAN_ASSIGN_OR_RETURN(s.macro_evidence, MacroEvidenceFromJson(j["macro_evidence"]));
    }
    s.image_ids = j.value("image_ids", std::vector<std::string>{});
    s.first_seen = j.value("first_seen", "");
    s.source_path = j.value("source_path", "");
    return s;
  } catch (const Json::exception& e) {
    return Invalid("sample record", e);
  }
}

}  // namespace lurescan
