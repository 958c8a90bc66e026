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

#include <gtest/gtest.h>

#include "lurescan/error.h"
#include "lurescan/imaging.h"

namespace lurescan {
namespace {

TEST(JsonCodecTest, ImageRecordRoundTrip) {
  ImageRecord r;
  r.sha256 = Sha256Hex(AsBytes("x"));
  r.phash = {0x8000000000000001ULL, HashAlgorithm::kDifferenceHash};
  r.width = 640;
  r.height = 480;
  r.format = "jpeg";
  r.labeled_malicious = false;
  Json j = ToJson(r);
  EXPECT_EQ(j["phash"]["bits"], "8000000000000001");
  auto back = ImageRecordFromJson(j);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->sha256, r.sha256);
  EXPECT_EQ(back->phash.bits, r.phash.bits);
  EXPECT_EQ(back->phash.algorithm, r.phash.algorithm);
  EXPECT_EQ(back->width, 640);
  EXPECT_EQ(back->format, "jpeg");
  EXPECT_EQ(back->labeled_malicious, false);

  r.labeled_malicious.reset();
  EXPECT_FALSE(ImageRecordFromJson(ToJson(r))->labeled_malicious.has_value());
}

TEST(JsonCodecTest, SampleRecordRoundTrip) {
  SampleRecord s;
  s.file_sha256 = Sha256Hex(AsBytes("doc"));
  s.container_kind = ContainerKind::kEncryptedOoxml;
  s.family = "Emotet";
  s.macro_evidence.has_vba = true;
  s.macro_evidence.has_dde = true;
  s.macro_evidence.triggers = {"Workbook_Open"};
  s.macro_evidence.first_sheet_name = "Sheet1";
  s.macro_evidence.hidden_sheet_count = 1;
  s.macro_evidence.sheets = {{"Sheet1", SheetVisibility::kVisible, false, 0},
                             {"Macro1", SheetVisibility::kVeryHidden, true, 1}};
  s.image_ids = {"a", "b"};
  s.first_seen = "2021-03-01T12:00:00Z";
  s.source_path = "dir/x.xlsm";
  auto back = SampleRecordFromJson(ToJson(s));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(ToJson(*back), ToJson(s));
  EXPECT_EQ(back->macro_evidence.sheets.at(1).visibility, SheetVisibility::kVeryHidden);
  EXPECT_EQ(back->container_kind, ContainerKind::kEncryptedOoxml);
}

TEST(JsonCodecTest, RejectsMalformedRecords) {
  EXPECT_FALSE(ImageRecordFromJson(Json::array()).ok());
  EXPECT_FALSE(ImageRecordFromJson(Json{{"sha256", "x"}}).ok());
  Json bad = ToJson(ImageRecord{});
  bad["phash"]["bits"] = "zz";
  EXPECT_FALSE(ImageRecordFromJson(bad).ok());
  EXPECT_FALSE(SampleRecordFromJson(Json{{"file_sha256", 3}}).ok());
}

TEST(JsonCodecTest, ErrorJsonCarriesCode) {
  Json j = ErrorJson(MakeError(ErrorCode::kDecryptionFailed, "wrong password"));
  EXPECT_EQ(j["error"]["code"], "DecryptionFailed");
  EXPECT_EQ(j["error"]["message"], "DecryptionFailed: wrong password");
  EXPECT_EQ(ErrorJson(absl::InternalError("boom"))["error"]["code"], "Internal");
}

TEST(JsonCodecTest, VerdictShape) {
  Verdict v;
  v.outcome = Outcome::kMalicious;
  v.layer = Layer::kHashMatch;
  v.attributed_family = "Qbot";
  v.evidence = {"macro:vba"};
  Json j = ToJson(v);
  EXPECT_EQ(j["outcome"], "Malicious");
  EXPECT_EQ(j["layer"], "HashMatch");
  EXPECT_EQ(j["attributed_family"], "Qbot");
  EXPECT_TRUE(ToJson(Verdict{})["layer"].is_null());
}

TEST(JsonCodecTest, MetricsRounded) {
  Json j = ToJson(EvalMetrics::FromCounts(2, 1, 0, 0));
  EXPECT_DOUBLE_EQ(j["precision"].get<double>(), 0.667);
  EXPECT_EQ(j["tp"], 2);
}

}  // namespace
}  // namespace lurescan
