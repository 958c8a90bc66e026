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
// Lure text pipeline: binarization, OCR, normalization and fuzzy keyword
// matching against per-language phrase lists.

#ifndef LURESCAN_TEXTLINE_H_
#define LURESCAN_TEXTLINE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/image_codec.h"
#include "lurescan/ocr_engine.h"

namespace lurescan {

struct KeywordRuleSet {
  // Language tag -> phrases.
  std::map<std::string, std::vector<std::string>> phrases;
  int fuzz_max_edits = 1;
  int min_word_len_for_fuzz = 5;

  static KeywordRuleSet Defaults();
  static absl::StatusOr<KeywordRuleSet> FromJson(std::string_view json);
  static absl::StatusOr<KeywordRuleSet> Load(const std::filesystem::path& path);
  std::string ToJson() const;

  // Errors: InvalidArgument if a phrase normalizes to nothing or
  // fuzz_max_edits is outside 0..2.
  absl::Status Validate() const;
};

struct KeywordHit {
  std::string phrase;        // as written in the rule set
  std::string language;
  std::string matched_span;  // slice of the normalized text
  int edit_distance = 0;
  size_t offset = 0;         // byte offset of the span in the normalized text

  friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

struct ImageThreat {
  bool is_malicious = false;
  std::vector<KeywordHit> hits;
  std::string ocr_text;
  std::string engine_id;
};

// Otsu threshold over a 256-bin histogram: the first t maximizing the
// between-class variance of {<= t} and {> t}.
int OtsuThreshold(const std::array<uint64_t, 256>& histogram);

// Alpha flattened onto white, BT.601 gray, Otsu binarization. Pixels at or
// below the threshold become 0, the rest 255 (opaque).
Raster Preprocess(const Raster& raster);

// Sends a PNG encoding of `binarized` to the engine and returns its text
// verbatim.
absl::StatusOr<std::string> ExtractText(const Raster& binarized, OcrEngine& engine,
                                        std::string_view source_sha256 = {});

// NFKC, lowercase, whitespace runs collapsed to one space, trimmed.
std::string NormalizeText(std::string_view text);

int Levenshtein(std::u32string_view a, std::u32string_view b);

// `normalized_text` must come from NormalizeText. Hits are ordered by
// offset, then by rule order.
std::vector<KeywordHit> MatchKeywords(std::string_view normalized_text, const KeywordRuleSet& rules);

// Optional post-OCR translation hook; unset by default.
using TextTranslator = std::function<std::string(std::string_view)>;

absl::StatusOr<ImageThreat> ClassifyImage(const Raster& raster, OcrEngine& engine,
                                          const KeywordRuleSet& rules,
                                          std::string_view source_sha256 = {},
                                          const TextTranslator& translator = nullptr);

}  // namespace lurescan

#endif  // LURESCAN_TEXTLINE_H_
