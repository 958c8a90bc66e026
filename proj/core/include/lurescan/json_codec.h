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
// JSON encodings of the domain records, shared by the journal and the CLI.

#ifndef LURESCAN_JSON_CODEC_H_
#define LURESCAN_JSON_CODEC_H_

#include <nlohmann/json.hpp>

#include "absl/status/statusor.h"
#include "lurescan/container.h"
#include "lurescan/metrics.h"
#include "lurescan/sigdb.h"
#include "lurescan/textline.h"
#include "lurescan/triage.h"

namespace lurescan {

using Json = nlohmann::ordered_json;

Json ToJson(const SheetMeta& sheet);
Json ToJson(const MacroEvidence& evidence);
Json ToJson(const PerceptualHash& hash);
Json ToJson(const ImageRecord& image);
Json ToJson(const SampleRecord& sample);
Json ToJson(const DbStats& stats);
Json ToJson(const KeywordHit& hit);
Json ToJson(const ImageThreat& threat);
Json ToJson(const Verdict& verdict);
Json ToJson(const EvalMetrics& metrics);  // ratios rounded to 3 decimals
Json ToJson(const ScanReport& report);
Json ErrorJson(const absl::Status& status);

// Decoders tolerate unknown fields. Errors: InvalidArgument.
absl::StatusOr<SheetMeta> SheetMetaFromJson(const Json& j);
absl::StatusOr<MacroEvidence> MacroEvidenceFromJson(const Json& j);
absl::StatusOr<ImageRecord> ImageRecordFromJson(const Json& j);
absl::StatusOr<SampleRecord> SampleRecordFromJson(const Json& j);

}  // namespace lurescan

#endif  // LURESCAN_JSON_CODEC_H_
