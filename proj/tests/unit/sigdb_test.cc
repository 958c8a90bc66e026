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
#include "lurescan/sigdb.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "lurescan/error.h"
#include "lurescan/imaging.h"
#include "support/test_support.h"

namespace lurescan {
namespace {

using testing::TempDir;

ImageRecord Image(const std::string& tag, uint64_t phash, std::optional<bool> malicious = std::nullopt) {
  ImageRecord r;
  r.sha256 = Sha256Hex(AsBytes(tag));
  r.phash = {phash, HashAlgorithm::kDctPhash};
  r.width = 10;
  r.height = 10;
  r.format = "png";
  r.labeled_malicious = malicious;
  return r;
}

SampleRecord Sample(const std::string& tag, const std::vector<ImageRecord>& images,
                    std::optional<std::string> family = std::nullopt) {
  SampleRecord s;
  s.file_sha256 = Sha256Hex(AsBytes("sample:" + tag));
  s.container_kind = ContainerKind::kOoxmlZip;
  s.family = std::move(family);
  s.macro_evidence.has_vba = true;
  s.first_seen = "2021-03-01T12:00:00Z";
  s.source_path = tag + ".xlsm";
  for (const ImageRecord& i : images) s.image_ids.push_back(i.sha256);
  return s;
}

TEST(SigDbTest, EmptyStatsAreZero) {
  auto db = SignatureDb::InMemory();
  EXPECT_EQ(db->Stats(), DbStats{});
  EXPECT_EQ(db->phash_algorithm(), std::nullopt);
}

TEST(SigDbTest, IngestIsIdempotent) {
  auto db = SignatureDb::InMemory();
  ImageRecord img = Image("a", 1);
  SampleRecord s = Sample("s", {img});
  auto first = db->Ingest(s, {img});
  ASSERT_TRUE(first.ok());
  EXPECT_TRUE(first->sample_added);
  auto second = db->Ingest(s, {img});
  ASSERT_TRUE(second.ok());
  EXPECT_FALSE(second->sample_added);
  EXPECT_TRUE(second->images_added.empty());
  EXPECT_EQ(db->Stats().sample_count, 1u);
}

TEST(SigDbTest, SharedImageDeduplicated) {
  auto db = SignatureDb::InMemory();
  ImageRecord img = Image("shared", 5);
  ASSERT_TRUE(db->Ingest(Sample("1", {img}), {img}).ok());
  ASSERT_TRUE(db->Ingest(Sample("2", {img}), {img}).ok());
  DbStats st = db->Stats();
  EXPECT_EQ(st.sample_count, 2u);
  EXPECT_EQ(st.unique_image_count, 1u);
}

TEST(SigDbTest, FamilyQuery) {
  auto db = SignatureDb::InMemory();
  ImageRecord img = Image("q", 9, true);
  SampleRecord s = Sample("q", {img}, "Qbot");
  ASSERT_TRUE(db->Ingest(s, {img}).ok());
  auto qbot = db->SamplesByFamily("Qbot");
  ASSERT_EQ(qbot.size(), 1u);
  EXPECT_EQ(qbot[0].file_sha256, s.file_sha256);
  EXPECT_TRUE(db->SamplesByFamily("Emotet").empty());
  EXPECT_EQ(db->FamiliesForImage(img.sha256), std::vector<std::string>{"Qbot"});
}

TEST(SigDbTest, UnknownImageReferenceRejected) {
  auto db = SignatureDb::InMemory();
  SampleRecord s = Sample("x", {Image("missing", 1)});
  EXPECT_TRUE(HasErrorCode(db->Ingest(s, {}).status(), ErrorCode::kInvalidArgument));
}

TEST(SigDbTest, FindByPhash) {
  auto db = SignatureDb::InMemory();
  ImageRecord a = Image("a", 0xF0F0), b = Image("b", 0xF0F1), c = Image("c", ~uint64_t{0});
  ASSERT_TRUE(db->Ingest(Sample("s", {a, b, c}), {a, b, c}).ok());
  auto exact = db->FindByPhash(a.phash, 0);
  ASSERT_TRUE(exact.ok());
  ASSERT_EQ(exact->size(), 1u);
  EXPECT_EQ((*exact)[0].image.sha256, a.sha256);
  EXPECT_EQ((*exact)[0].distance, 0);
  auto all = db->FindByPhash(a.phash, 64);
  ASSERT_EQ(all->size(), 3u);
  EXPECT_EQ((*all)[1].image.sha256, b.sha256);
  EXPECT_FALSE(db->FindByPhash(a.phash, 65).ok());
  PerceptualHash other{0xF0F0, HashAlgorithm::kAverageHash};
  EXPECT_TRUE(HasErrorCode(db->FindByPhash(other, 3).status(), ErrorCode::kAlgorithmMismatch));
}

TEST(SigDbTest, FindByPhashMatchesLinearScan) {
  auto db = SignatureDb::InMemory();
  std::mt19937_64 rng(77);
  std::vector<ImageRecord> images;
  for (int i = 0; i < 1000; ++i) {
    uint64_t h = (i % 3 == 0 && !images.empty()) ? images[rng() % images.size()].phash.bits ^ (rng() & 0x1010)
                                                 : rng();
    images.push_back(Image("img" + std::to_string(i), h));
  }
  ASSERT_TRUE(db->Ingest(Sample("bulk", images), images).ok());
  for (int q = 0; q < 30; ++q) {
    PerceptualHash query{q % 2 ? images[rng() % images.size()].phash.bits : rng(), HashAlgorithm::kDctPhash};
    for (int r = 0; r <= 16; ++r) {
      std::vector<std::string> expected;
      for (const ImageRecord& img : images) {
        if (HammingBits(img.phash.bits, query.bits) <= r) expected.push_back(img.sha256);
      }
      auto got = db->FindByPhash(query, r);
      ASSERT_TRUE(got.ok());
      std::vector<std::string> got_ids;
      for (const PhashMatch& m : *got) got_ids.push_back(m.image.sha256);
      std::sort(expected.begin(), expected.end());
      std::sort(got_ids.begin(), got_ids.end());
      EXPECT_EQ(got_ids, expected);
      EXPECT_TRUE(std::is_sorted(got->begin(), got->end(), [](const PhashMatch& x, const PhashMatch& y) {
        return x.distance < y.distance;
      }));
    }
  }
}

TEST(SigDbTest, StatsOnToyDatabase) {
  auto db = SignatureDb::InMemory();
  ImageRecord a = Image("a", 1), b = Image("b", 2), c = Image("c", 4);
  ASSERT_TRUE(db->Ingest(Sample("1", {a, b}), {a, b}).ok());
  ASSERT_TRUE(db->Ingest(Sample("2", {a, c}, "Emotet"), {a, c}).ok());
  DbStats st = db->Stats();
  EXPECT_EQ(st.unique_image_count, 3u);
  EXPECT_EQ(st.singleton_sha_count, 2u);
  EXPECT_EQ(st.unique_phash_count, 3u);
  EXPECT_EQ(st.unlabeled_sample_count, 1u);
  EXPECT_EQ(st.per_family_counts.at("Emotet"), 1u);
}

TEST(SigDbTest, NearDuplicatePhash) {
  auto db = SignatureDb::InMemory();
  ImageRecord a = Image("a", 0xABCD), b = Image("b-bytes-differ", 0xABCD);
  ASSERT_TRUE(db->Ingest(Sample("1", {a}), {a}).ok());
  ASSERT_TRUE(db->Ingest(Sample("2", {b}), {b}).ok());
  DbStats st = db->Stats();
  EXPECT_EQ(st.unique_phash_count, st.unique_image_count - 1);
  EXPECT_EQ(st.singleton_phash_count, 0u);
  EXPECT_LE(st.unique_phash_count, st.unique_image_count);
}

TEST(SigDbTest, AlgorithmConsistencyEnforced) {
  auto db = SignatureDb::InMemory();
  ImageRecord a = Image("a", 1);
  ASSERT_TRUE(db->Ingest(Sample("1", {a}), {a}).ok());
  ImageRecord b = Image("b", 1);
  b.phash.algorithm = HashAlgorithm::kDifferenceHash;
  EXPECT_TRUE(HasErrorCode(db->Ingest(Sample("2", {b}), {b}).status(), ErrorCode::kAlgorithmMismatch));
}

TEST(SigDbTest, PersistenceRoundTrip) {
  TempDir dir;
  const auto path = dir / "sigs.jsonl";
  DbStats before;
  {
    auto db = SignatureDb::Open(path, SignatureDb::Mode::kReadWrite);
    ASSERT_TRUE(db.ok()) << db.status();
    std::mt19937_64 rng(3);
    for (int s = 0; s < 20; ++s) {
      std::vector<ImageRecord> imgs = {Image("i" + std::to_string(s % 7), rng() % 5, s % 2 == 0),
                                       Image("j" + std::to_string(s), rng())};
      ASSERT_TRUE((*db)->Ingest(Sample(std::to_string(s), imgs, s % 3 ? std::optional<std::string>("F") : std::nullopt),
                                imgs)
                      .ok());
    }
    ASSERT_TRUE((*db)->LabelSample(Sample("0", {}).file_sha256, "Relabeled").ok());
    ASSERT_TRUE((*db)->LabelImage(Image("j1", 0).sha256, true).ok());
    before = (*db)->Stats();
  }
  auto reopened = SignatureDb::Open(path, SignatureDb::Mode::kReadOnly);
  ASSERT_TRUE(reopened.ok()) << reopened.status();
  EXPECT_EQ((*reopened)->Stats(), before);
  EXPECT_TRUE((*reopened)->warnings().empty());
  EXPECT_EQ((*reopened)->FindSample(Sample("0", {}).file_sha256)->family, "Relabeled");
  EXPECT_EQ((*reopened)->FindImage(Image("j1", 0).sha256)->labeled_malicious, true);
}

TEST(SigDbTest, ReingestWithFamilyRelabels) {
  TempDir dir;
  const auto path = dir / "db.jsonl";
  ImageRecord img = Image("a", 1);
  {
    auto db = SignatureDb::Open(path, SignatureDb::Mode::kReadWrite);
    ASSERT_TRUE((*db)->Ingest(Sample("s", {img}), {img}).ok());
    ImageRecord labeled = img;
    labeled.labeled_malicious = true;
    ASSERT_TRUE((*db)->Ingest(Sample("s", {img}, "Dridex"), {labeled}).ok());
  }
  auto db = SignatureDb::Open(path, SignatureDb::Mode::kReadOnly);
  EXPECT_EQ((*db)->FindSample(Sample("s", {}).file_sha256)->family, "Dridex");
  EXPECT_EQ((*db)->FindImage(img.sha256)->labeled_malicious, true);
}

TEST(SigDbTest, MalformedAndTornLinesSkipped) {
  TempDir dir;
  const auto path = dir / "db.jsonl";
  ImageRecord img = Image("a", 1);
  {
    auto db = SignatureDb::Open(path, SignatureDb::Mode::kReadWrite);
    ASSERT_TRUE((*db)->Ingest(Sample("s", {img}), {img}).ok());
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "this is not json\n";
    out << "{\"kind\":\"future_record\",\"x\":1}\n";
    out << "{\"kind\":\"image\",\"sha256\":\"abc\"";  // torn, no newline
  }
  {
    auto db = SignatureDb::Open(path, SignatureDb::Mode::kReadWrite);
    ASSERT_TRUE(db.ok()) << db.status();
    EXPECT_EQ((*db)->Stats().sample_count, 1u);
    EXPECT_EQ((*db)->warnings().size(), 2u);  // bad line + torn tail
    ImageRecord b = Image("b", 2);
    ASSERT_TRUE((*db)->Ingest(Sample("t", {b}), {b}).ok());
  }
  auto db = SignatureDb::Open(path, SignatureDb::Mode::kReadOnly);
  EXPECT_EQ((*db)->Stats().sample_count, 2u);
  EXPECT_EQ((*db)->Stats().unique_image_count, 2u);
}

TEST(SigDbTest, SingleWriterLock) {
  TempDir dir;
  const auto path = dir / "db.jsonl";
  auto writer = SignatureDb::Open(path, SignatureDb::Mode::kReadWrite);
  ASSERT_TRUE(writer.ok());
  auto second = SignatureDb::Open(path, SignatureDb::Mode::kReadWrite);
  EXPECT_TRUE(HasErrorCode(second.status(), ErrorCode::kIoFailure));
  auto reader = SignatureDb::Open(path, SignatureDb::Mode::kReadOnly);
  ASSERT_TRUE(reader.ok());
  ImageRecord img = Image("a", 1);
  ASSERT_TRUE((*writer)->Ingest(Sample("s", {img}), {img}).ok());
  EXPECT_EQ((*reader)->Stats().sample_count, 0u);
  ASSERT_TRUE((*reader)->Refresh().ok());
  EXPECT_EQ((*reader)->Stats().sample_count, 1u);
  EXPECT_FALSE((*reader)->LabelSample(Sample("s", {}).file_sha256, "X").ok());
}

TEST(SigDbTest, ReadOnlyMissingFile) {
  TempDir dir;
  EXPECT_TRUE(HasErrorCode(SignatureDb::Open(dir / "nope.jsonl", SignatureDb::Mode::kReadOnly).status(),
                           ErrorCode::kIoFailure));
}

}  // namespace
}  // namespace lurescan
