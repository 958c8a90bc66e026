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
#include "lurescan/textline.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "lurescan/error.h"
#include "lurescan/image_codec.h"
#include "lurescan/imaging.h"
#include "lurescan/ocr_engine.h"
#include "lurescan/strings.h"
#include "support/test_support.h"

namespace lurescan {
namespace {

using testing::LureStyle;
using testing::RenderText;

KeywordRuleSet EnglishOnly(int fuzz) {
  KeywordRuleSet rules;
  rules.phrases = {{"en", {"enable content", "enable macros"}}};
  rules.fuzz_max_edits = fuzz;
  return rules;
}

std::vector<KeywordHit> Match(std::string_view text, const KeywordRuleSet& rules) {
  return MatchKeywords(NormalizeText(text), rules);
}

// Exhaustive between-class variance maximization.
int BruteForceOtsu(const std::array<uint64_t, 256>& hist) {
  double best = -1;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
    for (int i = 0; i < 256; ++i) {
      double n = static_cast<double>(hist[i]);
      if (i <= t) {
        w0 += n;
        s0 += n * i;
      } else {
        w1 += n;
        s1 += n * i;
      }
    }
    if (w0 == 0 || w1 == 0) continue;
    double m0 = s0 / w0, m1 = s1 / w1;
    double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best + 1e-9 * std::max(1.0, best)) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

TEST(NormalizeTextTest, CaseWhitespaceAndCompatibility) {
  EXPECT_EQ(NormalizeText("  Enable\t\n  CONTENT  "), "enable content");
  EXPECT_EQ(NormalizeText("ＥＮＡＢＬＥ"), "enable");  // fullwidth forms fold under NFKC
  EXPECT_EQ(NormalizeText("ΕΝΕΡΓΟΠΟΊΗΣΗ"), "ενεργοποίηση");
  EXPECT_EQ(NormalizeText(""), "");
}

TEST(LevenshteinTest, Basics) {
  EXPECT_EQ(Levenshtein(U"kitten", U"sitting"), 3);
  EXPECT_EQ(Levenshtein(U"", U"abc"), 3);
  EXPECT_EQ(Levenshtein(U"enable", U"enabte"), 1);
}

TEST(MatchKeywordsTest, Examples) {
  KeywordRuleSet rules = EnglishOnly(1);
  auto hits = Match("please click enable content to view", rules);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].phrase, "enable content");
  EXPECT_EQ(hits[0].edit_distance, 0);
  EXPECT_EQ(hits[0].matched_span, "enable content");

  auto typo = Match("enabte content", rules);
  ASSERT_EQ(typo.size(), 1u);
  EXPECT_EQ(typo[0].edit_distance, 1);

  EXPECT_TRUE(Match("quarterly revenue figures", rules).empty());
}

TEST(MatchKeywordsTest, PunctuationAndLineBreaks) {
  KeywordRuleSet rules = EnglishOnly(1);
  EXPECT_EQ(Match("Click \"Enable\nContent\"!", rules).size(), 1u);
  EXPECT_TRUE(Match("enablecontent", rules).empty() || Match("enablecontent", rules)[0].edit_distance <= 1);
}

TEST(MatchKeywordsTest, ShortWordsAreExact) {
  KeywordRuleSet rules;
  rules.phrases = {{"it", {"abilita macro"}}};
  rules.fuzz_max_edits = 1;
  rules.min_word_len_for_fuzz = 6;
  EXPECT_EQ(Match("abilita macro", rules).size(), 1u);
  EXPECT_TRUE(Match("abilita macra", rules).empty());  // "macro" is below the fuzz length
  EXPECT_EQ(Match("abilite macro", rules).size(), 1u);
}

TEST(MatchKeywordsTest, NonLatinScripts) {
  KeywordRuleSet rules = KeywordRuleSet::Defaults();
  auto greek = Match("Πατήστε ΕΝΕΡΓΟΠΟΊΗΣΗ ΠΕΡΙΕΧΟΜΈΝΟΥ για προβολή", rules);
  ASSERT_FALSE(greek.empty());
  EXPECT_EQ(greek[0].language, "el");
  auto ja = Match("このファイルを見るにはコンテンツの有効化をクリック", rules);
  ASSERT_FALSE(ja.empty());
  EXPECT_EQ(ja[0].language, "ja");
  auto ru = Match("Нажмите «Включить содержимое»", rules);
  ASSERT_FALSE(ru.empty());
  EXPECT_EQ(ru[0].language, "ru");
}

TEST(MatchKeywordsTest, ZeroFuzzIsExact) {
  KeywordRuleSet rules = KeywordRuleSet::Defaults();
  rules.fuzz_max_edits = 0;
  for (const char* text : {"enabte content", "enable contnet", "enable content", "enable macro", "habilitar contenido"}) {
    for (const KeywordHit& h : Match(text, rules)) EXPECT_EQ(h.edit_distance, 0) << text;
  }
  EXPECT_TRUE(Match("enabte content", rules).empty());
}

TEST(MatchKeywordsTest, MonotoneInFuzz) {
  const std::vector<std::string> texts = {
      "enable content",   "enabte content",   "enabel contemt",  "eneble macross", "please enable editing now",
      "inhalt aktiviren", "activer le contenu", "abilita contenuto", "ενεργοποιηση περιεχομενου"};
  for (int k = 0; k < 2; ++k) {
    KeywordRuleSet lo = KeywordRuleSet::Defaults(), hi = KeywordRuleSet::Defaults();
    lo.fuzz_max_edits = k;
    hi.fuzz_max_edits = k + 1;
    for (const std::string& t : texts) {
      auto a = Match(t, lo), b = Match(t, hi);
      for (const KeywordHit& h : a) {
        bool found = std::any_of(b.begin(), b.end(), [&](const KeywordHit& g) {
          return g.phrase == h.phrase && g.offset == h.offset && g.matched_span == h.matched_span;
        });
        EXPECT_TRUE(found) << t << " / " << h.phrase << " at fuzz " << k;
      }
    }
  }
}

TEST(MatchKeywordsTest, InvariantUnderCaseAndWhitespace) {
  KeywordRuleSet rules = KeywordRuleSet::Defaults();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"click enable content", "  CLICK   Enable\tCONTENT "},
      {"bitte inhalt aktivieren", "BITTE\n\nINHALT   AKTIVIEREN"},
      {"enabte macros", "EnAbTe      MaCrOs"},
  };
  for (const auto& [a, b] : pairs) EXPECT_EQ(Match(a, rules), Match(b, rules)) << a;
}

TEST(RuleSetTest, JsonRoundTripAndValidation) {
  KeywordRuleSet rules = KeywordRuleSet::Defaults();
  auto back = KeywordRuleSet::FromJson(rules.ToJson());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->phrases, rules.phrases);
  EXPECT_EQ(back->fuzz_max_edits, rules.fuzz_max_edits);
  EXPECT_FALSE(KeywordRuleSet::FromJson("{\"phrases\":{\"en\":[\"   \"]}}").ok());
  EXPECT_FALSE(KeywordRuleSet::FromJson("{\"phrases\":{\"en\":[\"x\"]},\"fuzz_max_edits\":7}").ok());
  EXPECT_FALSE(KeywordRuleSet::FromJson("not json").ok());
}

TEST(OtsuTest, MatchesExhaustiveSearch) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<uint64_t, 256> hist{};
    int modes = 1 + static_cast<int>(rng() % 3);
    for (int m = 0; m < modes; ++m) {
      int center = static_cast<int>(rng() % 256);
      int spread = 1 + static_cast<int>(rng() % 30);
      for (int k = 0; k < 500; ++k) {
        int v = std::clamp(center + static_cast<int>(rng() % (2 * spread + 1)) - spread, 0, 255);
        ++hist[v];
      }
    }
    EXPECT_EQ(OtsuThreshold(hist), BruteForceOtsu(hist)) << trial;
  }
}

TEST(PreprocessTest, BlackOnWhiteStaysBimodal) {
  Raster r(20, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) {
      uint8_t v = (x > 5 && x < 12 && y > 2 && y < 7) ? 0 : 255;
      uint8_t* p = r.at(x, y);
      p[0] = p[1] = p[2] = v;
      p[3] = 255;
    }
  }
  Raster out = Preprocess(r);
  ASSERT_EQ(out.rgba.size(), r.rgba.size());
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) EXPECT_EQ(out.at(x, y)[0], r.at(x, y)[0]);
  }
}

TEST(PreprocessTest, TransparentBecomesWhite) {
  Raster r(8, 8);  // all zero: transparent black
  Raster out = Preprocess(r);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      EXPECT_EQ(out.at(x, y)[0], 255);
      EXPECT_EQ(out.at(x, y)[3], 255);
    }
  }
}

TEST(PreprocessTest, GrayOnGraySplitsModes) {
  Raster r(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      uint8_t v = x < 8 ? 100 : 140;
      uint8_t* p = r.at(x, y);
      p[0] = p[1] = p[2] = v;
      p[3] = 255;
    }
  }
  Raster out = Preprocess(r);
  EXPECT_EQ(out.at(0, 0)[0], 0);
  EXPECT_EQ(out.at(15, 15)[0], 255);
}

TEST(FixtureEngineTest, LooksUpSourceThenPng) {
  FixtureOcrEngine engine(std::map<std::string, std::string>{{"abc", "Enable Content"}});
  Bytes png = {1, 2, 3};
  EXPECT_EQ(*engine.Recognize({png, "abc"}), "Enable Content");
  EXPECT_EQ(*engine.Recognize({png, "zzz"}), "");
  engine.Add(Sha256Hex(png), "by png");
  EXPECT_EQ(*engine.Recognize({png, ""}), "by png");
}

TEST(ClassifyImageTest, FixtureEngine) {
  FixtureOcrEngine engine;
  const std::string lure_sha = testing::Oracle()["images"]["lure.png"].get<std::string>();
  engine.Add(lure_sha, "To view this document\nENABLE CONTENT");
  auto lure = DecodeImage(testing::ReadData("lure.png"));
  auto threat = ClassifyImage(*lure, engine, KeywordRuleSet::Defaults(), lure_sha);
  ASSERT_TRUE(threat.ok());
  EXPECT_TRUE(threat->is_malicious);
  EXPECT_EQ(threat->engine_id, "fixture");
  auto logo = DecodeImage(testing::ReadData("logo.png"));
  auto benign = ClassifyImage(*logo, engine, KeywordRuleSet::Defaults(), "other");
  ASSERT_TRUE(benign.ok());
  EXPECT_FALSE(benign->is_malicious);
}

TEST(ClassifyImageTest, TranslatorHook) {
  FixtureOcrEngine engine(std::map<std::string, std::string>{{"s", "bitte aktivieren"}});
  auto logo = DecodeImage(testing::ReadData("logo.png"));
  auto threat = ClassifyImage(*logo, engine, EnglishOnly(1), "s",
                              [](std::string_view) { return std::string("enable content"); });
  ASSERT_TRUE(threat.ok());
  EXPECT_TRUE(threat->is_malicious);
}

TEST(CommandEngineTest, MissingBinaryIsUnavailable) {
  CommandOcrEngine engine("/nonexistent/lurescan-ocr-binary");
  Raster r(4, 4);
  auto text = ExtractText(Preprocess(r), engine);
  ASSERT_FALSE(text.ok());
  EXPECT_TRUE(HasErrorCode(text.status(), ErrorCode::kEngineUnavailable)) << text.status();
}

TEST(CommandEngineTest, NonZeroExitIsFailure) {
  CommandOcrEngine engine("sh -c 'exit 3'");
  auto text = ExtractText(Preprocess(Raster(4, 4)), engine);
  EXPECT_TRUE(HasErrorCode(text.status(), ErrorCode::kEngineFailure)) << text.status();
}

TEST(CommandEngineTest, PlaceholderSubstitution) {
  CommandOcrEngine engine("sh -c 'test -s \"$1\" && echo Enable Content' sh {}");
  auto text = ExtractText(Preprocess(Raster(4, 4)), engine);
  ASSERT_TRUE(text.ok()) << text.status();
  EXPECT_EQ(StripAsciiWhitespace(*text), "Enable Content");
}

class RealOcrTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (testing::TesseractCommand().empty()) GTEST_SKIP() << "tesserocr not importable";
  }
};

TEST_F(RealOcrTest, RenderedEnableContent) {
  CommandOcrEngine engine(testing::TesseractCommand());
  LureStyle style;
  style.font_file = testing::SystemFonts().front();
  style.font_height = 32;
  auto text = ExtractText(Preprocess(RenderText("Enable Content", style)), engine);
  ASSERT_TRUE(text.ok()) << text.status();
  EXPECT_NE(text->find("Enable Content"), std::string::npos) << *text;
}

TEST_F(RealOcrTest, BlankImageReadsEmpty) {
  CommandOcrEngine engine(testing::TesseractCommand());
  Raster white(120, 60);
  std::fill(white.rgba.begin(), white.rgba.end(), 255);
  auto text = ExtractText(Preprocess(white), engine);
  ASSERT_TRUE(text.ok()) << text.status();
  EXPECT_TRUE(NormalizeText(*text).empty()) << *text;
}

TEST_F(RealOcrTest, EnableMacrosLureAndLogo) {
  CommandOcrEngine engine(testing::TesseractCommand());
  LureStyle style;
  style.font_file = testing::SystemFonts().front();
  auto lure = ClassifyImage(RenderText("Enable macros", style), engine, KeywordRuleSet::Defaults());
  ASSERT_TRUE(lure.ok()) << lure.status();
  EXPECT_TRUE(lure->is_malicious) << lure->ocr_text;
  auto logo = DecodeImage(testing::ReadData("logo.png"));
  auto benign = ClassifyImage(*logo, engine, KeywordRuleSet::Defaults());
  ASSERT_TRUE(benign.ok());
  EXPECT_FALSE(benign->is_malicious) << benign->ocr_text;
}

TEST_F(RealOcrTest, GreekLure) {
  CommandOcrEngine engine(testing::TesseractCommand("ell+eng"));
  LureStyle style;
  style.font_file = testing::SystemFonts().front();
  auto threat = ClassifyImage(RenderText("Ενεργοποίηση περιεχομένου", style), engine, KeywordRuleSet::Defaults());
  ASSERT_TRUE(threat.ok()) << threat.status();
  ASSERT_TRUE(threat->is_malicious) << threat->ocr_text;
  EXPECT_EQ(threat->hits[0].language, "el");
}

}  // namespace
}  // namespace lurescan
