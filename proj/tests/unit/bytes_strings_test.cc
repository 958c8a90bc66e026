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
#include <gtest/gtest.h>

#include "lurescan/bytes.h"
#include "lurescan/error.h"
#include "lurescan/strings.h"
#include "lurescan/text.h"

namespace lurescan {
namespace {

TEST(ByteReaderTest, ReadsLittleEndianAndRefusesOverrun) {
  const Bytes data = {0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07};
  ByteReader r(data);
  uint16_t a = 0;
  uint32_t b = 0;
  ASSERT_TRUE(r.ReadU16(&a));
  EXPECT_EQ(a, 0x0201);
  ASSERT_TRUE(r.ReadU32(&b));
  EXPECT_EQ(b, 0x06050403u);
  uint32_t c = 0;
  EXPECT_FALSE(r.ReadU32(&c));
  EXPECT_EQ(r.position(), 6u);
  EXPECT_EQ(r.remaining(), 1u);
}

TEST(BytesTest, HexEncode) {
  EXPECT_EQ(HexEncode(Bytes{0x00, 0xab, 0xff}), "00abff");
  EXPECT_EQ(HexEncode(Bytes{}), "");
}

TEST(BytesTest, MissingFileIsIoFailure) {
  auto r = ReadFileBytes("/nonexistent/lurescan/file");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(HasErrorCode(r.status(), ErrorCode::kIoFailure));
}

TEST(ErrorTest, CodeRoundTripsThroughStatus) {
  absl::Status s = MakeError(ErrorCode::kCyclicFatChain, "loop");
  EXPECT_FALSE(s.ok());
  EXPECT_EQ(GetErrorCode(s), ErrorCode::kCyclicFatChain);
  EXPECT_EQ(GetErrorCode(absl::OkStatus()), std::nullopt);
  EXPECT_EQ(ErrorCodeName(ErrorCode::kIdMismatch), "IdMismatch");
}

TEST(StringsTest, CaseHelpers) {
  EXPECT_EQ(AsciiLower("VbaProject.BIN"), "vbaproject.bin");
  EXPECT_TRUE(EndsWithIgnoreCase("xl/VBAPROJECT.bin", "vbaproject.bin"));
  EXPECT_TRUE(ContainsIgnoreCase("Sub AUTOOPEN()", "autoopen"));
  EXPECT_FALSE(StartsWithIgnoreCase("ab", "abc"));
  EXPECT_EQ(StripAsciiWhitespace("  x y \r\n"), "x y");
}

TEST(StringsTest, SplitJoin) {
  auto parts = Split("a,,b", ',');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(Join({"a", "b", "c"}, "/"), "a/b/c");
  EXPECT_EQ(Cat("n=", uint8_t{7}, ' ', 1.5), "n=7 1.5");
}

TEST(TextTest, Utf16RoundTrip) {
  const std::string s = "Ενεργοποίηση 内容 \xF0\x9F\x98\x80";
  EXPECT_EQ(Utf16LeToUtf8(Utf8ToUtf16Le(s)), s);
}

TEST(TextTest, UnpairedSurrogateBecomesReplacement) {
  const Bytes lone = {0x00, 0xD8, 0x41, 0x00};
  EXPECT_EQ(Utf16LeToUtf8(lone), "\xEF\xBF\xBD" "A");
}

TEST(TextTest, CodePages) {
  const Bytes greek = {0xC5, 0xED};  // cp1253 "Εν"
  EXPECT_EQ(DecodeCodePage(greek, 1253), "Εν");
  const Bytes latin = {0xE9};
  EXPECT_EQ(DecodeCodePage(latin, 1252), "é");
  EXPECT_EQ(DecodeCodePage(latin, 99999), "é");
}

}  // namespace
}  // namespace lurescan
