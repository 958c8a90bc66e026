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
#include "lurescan/image_codec.h"

#include <gtest/gtest.h>

#include "lurescan/error.h"
#include "lurescan/imaging.h"
#include "support/test_support.h"

namespace lurescan {
namespace {

using testing::Oracle;
using testing::ReadData;

TEST(DecodeImageTest, MatchesReferenceDecoder) {
  for (const Json& c : Oracle()["decode"]) {
    const std::string file = c["file"].get<std::string>();
    auto raster = DecodeImage(ReadData(file));
    ASSERT_TRUE(raster.ok()) << file << ": " << raster.status();
    EXPECT_EQ(raster->width, c["width"].get<int>()) << file;
    EXPECT_EQ(raster->height, c["height"].get<int>()) << file;
    EXPECT_EQ(Sha256Hex(raster->rgba), c["rgba_sha256"].get<std::string>()) << file;
  }
}

TEST(DecodeImageTest, SniffsFormats) {
  EXPECT_EQ(SniffImageFormat(ReadData("lure.png")), ImageFormat::kPng);
  EXPECT_EQ(SniffImageFormat(ReadData("lure.jpg")), ImageFormat::kJpeg);
  EXPECT_EQ(SniffImageFormat(ReadData("palette.gif")), ImageFormat::kGif);
  EXPECT_EQ(SniffImageFormat(ReadData("logo.bmp")), ImageFormat::kBmp);
  const Bytes emf = {0x01, 0, 0, 0, 0x6C, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                     0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0x20, 0x45, 0x4D, 0x46};
  EXPECT_EQ(SniffImageFormat(emf), ImageFormat::kEmf);
  EXPECT_TRUE(IsVectorFormat(ImageFormat::kEmf));
  EXPECT_TRUE(IsVectorFormat(ImageFormat::kWmf));
  EXPECT_FALSE(IsVectorFormat(ImageFormat::kPng));
  EXPECT_EQ(SniffImageFormat(Bytes{1, 2, 3}), ImageFormat::kUnknown);
}

TEST(DecodeImageTest, GarbageFails) {
  EXPECT_FALSE(DecodeImage(Bytes(64, 0x42)).ok());
  Bytes truncated = ReadData("lure.png");
  truncated.resize(40);
  EXPECT_FALSE(DecodeImage(truncated).ok());
  Bytes gif = ReadData("palette.gif");
  gif.resize(gif.size() / 3);
  auto partial = DecodeGif(gif);
  if (partial.ok()) EXPECT_TRUE(partial->valid());
}

TEST(EncodeTest, PngRoundTripIsLossless) {
  std::mt19937 rng(1);
  Raster r = testing::RandomNoise(rng, 31, 17);
  r.at(3, 4)[3] = 0;
  auto png = EncodePng(r);
  ASSERT_TRUE(png.ok());
  auto back = DecodeImage(*png);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->rgba, r.rgba);
}

TEST(EncodeTest, JpegDecodesToSameSize) {
  std::mt19937 rng(2);
  Raster r = testing::RenderNeutral(rng, 64, 48);
  auto jpg = EncodeJpeg(r, 85);
  ASSERT_TRUE(jpg.ok());
  EXPECT_EQ(SniffImageFormat(*jpg), ImageFormat::kJpeg);
  auto back = DecodeImage(*jpg);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->width, 64);
  EXPECT_EQ(back->height, 48);
}

}  // namespace
}  // namespace lurescan
