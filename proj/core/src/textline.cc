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

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "lurescan/error.h"
#include "lurescan/imaging.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

using Json = nlohmann::ordered_json;

struct Token {
  std::u32string text;
  size_t begin = 0;  // byte offsets into the normalized UTF-8 text
  size_t end = 0;
};

bool IsWordChar(UChar32 c) {
  int8_t type = u_charType(c);
  return u_hasBinaryProperty(c, UCHAR_ALPHABETIC) || u_isdigit(c) || type == U_NON_SPACING_MARK ||
         type == U_COMBINING_SPACING_MARK;
}

// Scripts written without spaces between words.
bool IsUnspacedScript(UChar32 c) {
  UErrorCode err = U_ZERO_ERROR;
  UScriptCode script = uscript_getScript(c, &err);
  return U_SUCCESS(err) &&
         (script == USCRIPT_HAN || script == USCRIPT_HIRAGANA || script == USCRIPT_KATAKANA);
}

// Decodes UTF-8 into code points with their byte ranges.
struct CodePoint {
  UChar32 c;
  size_t begin;
  size_t end;
};

std::vector<CodePoint> DecodeUtf8(std::string_view s) {
  std::vector<CodePoint> out;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  while (i < n) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({c, static_cast<size_t>(start), static_cast<size_t>(i)});
  }
  return out;
}

std::vector<Token> Tokenize(std::string_view normalized) {
  std::vector<Token> tokens;
  Token cur;
  bool in_word = false;
  for (const CodePoint& cp : DecodeUtf8(normalized)) {
    if (IsWordChar(cp.c)) {
      if (!in_word) {
        cur = Token{{}, cp.begin, cp.end};
        in_word = true;
      }
      cur.text.push_back(static_cast<char32_t>(cp.c));
      cur.end = cp.end;
    } else if (in_word) {
      tokens.push_back(std::move(cur));
      in_word = false;
    }
  }
  if (in_word) tokens.push_back(std::move(cur));
  return tokens;
}

struct CompiledPhrase {
  std::string phrase;
  std::string language;
  std::vector<std::u32string> words;  // word mode
  std::u32string compact;             // substring mode (no spaces)
  bool unspaced = false;
};

CompiledPhrase Compile(const std::string& phrase, const std::string& language) {
  CompiledPhrase cp{phrase, language, {}, {}, false};
  std::string normalized = NormalizeText(phrase);
  for (Token& t : Tokenize(normalized)) cp.words.push_back(std::move(t.text));
  for (const CodePoint& c : DecodeUtf8(normalized)) {
    if (c.c == ' ') continue;
    cp.compact.push_back(static_cast<char32_t>(c.c));
    cp.unspaced |= IsUnspacedScript(c.c);
  }
  return cp;
}

void MatchWords(const CompiledPhrase& p, const std::vector<Token>& tokens, std::string_view text,
                const KeywordRuleSet& rules, std::vector<KeywordHit>* hits) {
  const size_t m = p.words.size();
  if (m == 0 || tokens.size() < m) return;
  for (size_t s = 0; s + m <= tokens.size(); ++s) {
    int total = 0;
    bool ok = true;
    for (size_t j = 0; j < m && ok; ++j) {
      const std::u32string& want = p.words[j];
      const std::u32string& got = tokens[s + j].text;
      if (want == got) continue;
      if (rules.fuzz_max_edits <= 0 || static_cast<int>(want.size()) < rules.min_word_len_for_fuzz) {
        ok = false;
        break;
      }
      // Length gap alone may already exceed the budget.
      if (static_cast<int>(std::max(want.size(), got.size()) - std::min(want.size(), got.size())) >
          rules.fuzz_max_edits) {
        ok = false;
        break;
      }
      int d = Levenshtein(want, got);
      if (d > rules.fuzz_max_edits) ok = false;
      total += d;
    }
    if (!ok) continue;
    size_t begin = tokens[s].begin;
    size_t end = tokens[s + m - 1].end;
    hits->push_back({p.phrase, p.language, std::string(text.substr(begin, end - begin)), total, begin});
  }
}

// Approximate substring search for scripts without word spacing. Overlapping
// candidates are resolved in favour of the lowest distance, then position.
void MatchCompact(const CompiledPhrase& p, std::string_view text, const KeywordRuleSet& rules,
                  std::vector<KeywordHit>* hits) {
  std::vector<CodePoint> chars;
  for (const CodePoint& c : DecodeUtf8(text)) {
    if (c.c != ' ') chars.push_back(c);
  }
  const int len = static_cast<int>(p.compact.size());
  if (len == 0) return;
  const int budget = len >= rules.min_word_len_for_fuzz ? std::max(rules.fuzz_max_edits, 0) : 0;
  std::u32string hay;
  for (const CodePoint& c : chars) hay.push_back(static_cast<char32_t>(c.c));

  struct Candidate {
    int distance;
    int start;
    int length;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < static_cast<int>(hay.size()); ++i) {
    Candidate best{budget + 1, i, 0};
    for (int l = std::max(1, len - budget); l <= len + budget && i + l <= static_cast<int>(hay.size()); ++l) {
      int d = Levenshtein(p.compact, std::u32string_view(hay).substr(i, l));
      if (d < best.distance) best = {d, i, l};
    }
    if (best.distance <= budget) candidates.push_back(best);
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.start < b.start;
  });
  std::vector<Candidate> accepted;
  for (const Candidate& c : candidates) {
    bool overlaps = std::any_of(accepted.begin(), accepted.end(), [&](const Candidate& a) {
      return c.start < a.start + a.length && a.start < c.start + c.length;
    });
    if (!overlaps) accepted.push_back(c);
  }
  for (const Candidate& c : accepted) {
    size_t begin = chars[c.start].begin;
    size_t end = chars[c.start + c.length - 1].end;
    hits->push_back({p.phrase, p.language, std::string(text.substr(begin, end - begin)), c.distance, begin});
  }
}

}  // namespace

KeywordRuleSet KeywordRuleSet::Defaults() {
  KeywordRuleSet rules;
  rules.fuzz_max_edits = 1;
  rules.min_word_len_for_fuzz = 5;
  rules.phrases = {
      {"en", {"enable content", "enable macros", "enable editing", "enabled content"}},
      {"el", {"ενεργοποίηση περιεχομένου", "ενεργοποίηση μακροεντολών", "ενεργοποίηση επεξεργασίας"}},
      {"ru", {"включить содержимое", "включить макросы", "разрешить редактирование"}},
      {"uk", {"увімкнути вміст", "увімкнути макроси"}},
      {"bn", {"সামগ্রী সক্ষম করুন", "ম্যাক্রো সক্ষম করুন"}},
      {"ja", {"コンテンツの有効化", "マクロを有効にする", "編集を有効にする"}},
      {"de", {"inhalt aktivieren", "makros aktivieren", "bearbeitung aktivieren"}},
      {"es", {"habilitar contenido", "habilitar macros", "habilitar edición"}},
      {"fr", {"activer le contenu", "activer les macros", "activer la modification"}},
      {"it", {"abilita contenuto", "abilita macro", "abilita modifica"}},
      {"pt", {"habilitar conteúdo", "ativar conteúdo", "habilitar edição"}},
  };
  return rules;
}

absl::Status KeywordRuleSet::Validate() const {
  if (fuzz_max_edits < 0 || fuzz_max_edits > 2) {
    return MakeError(ErrorCode::kInvalidArgument, Cat("fuzz_max_edits must be in 0..2, got ", fuzz_max_edits));
  }
  if (min_word_len_for_fuzz < 0) {
    return MakeError(ErrorCode::kInvalidArgument, "min_word_len_for_fuzz must be non-negative");
  }
  for (const auto& [lang, list] : phrases) {
    for (const std::string& phrase : list) {
      if (Compile(phrase, lang).compact.empty()) {
        return MakeError(ErrorCode::kInvalidArgument, Cat("empty phrase in language '", lang, "'"));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<KeywordRuleSet> KeywordRuleSet::FromJson(std::string_view json) {
  KeywordRuleSet rules;
  try {
    Json doc = Json::parse(json);
    if (!doc.is_object()) return MakeError(ErrorCode::kInvalidArgument, "rule set must be a JSON object");
    rules.fuzz_max_edits = doc.value("fuzz_max_edits", 1);
    rules.min_word_len_for_fuzz = doc.value("min_word_len_for_fuzz", 5);
    if (doc.contains("phrases")) {
      for (const auto& [lang, list] : doc.at("phrases").items()) {
        rules.phrases[lang] = list.get<std::vector<std::string>>();
      }
    }
  } catch (const Json::exception& e) {
    return MakeError(ErrorCode::kInvalidArgument, Cat("rule set JSON: ", e.what()));
  }
  if (absl::Status s = rules.Validate(); !s.ok()) return s;
  return rules;
}

absl::StatusOr<KeywordRuleSet> KeywordRuleSet::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return MakeError(ErrorCode::kIoFailure, Cat("cannot read rule set ", path.string()));
  std::string text((std::istreambuf_iterator<char>(in)), {});
  return FromJson(text);
}

std::string KeywordRuleSet::ToJson() const {
  Json doc;
  doc["fuzz_max_edits"] = fuzz_max_edits;
  doc["min_word_len_for_fuzz"] = min_word_len_for_fuzz;
  doc["phrases"] = Json::object();
  for (const auto& [lang, list] : phrases) doc["phrases"][lang] = list;
  return doc.dump(2);
}

int OtsuThreshold(const std::array<uint64_t, 256>& histogram) {
  double total = 0, weighted_total = 0;
  for (int i = 0; i < 256; ++i) {
    total += static_cast<double>(histogram[i]);
    weighted_total += static_cast<double>(i) * static_cast<double>(histogram[i]);
  }
  double w0 = 0, sum0 = 0, best = -1;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += static_cast<double>(histogram[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(histogram[t]);
    double w1 = total - w0;
    double between = 0;
    if (w0 > 0 && w1 > 0) {
      double mu0 = sum0 / w0;
      double mu1 = (weighted_total - sum0) / w1;
      between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

Raster Preprocess(const Raster& raster) {
  GrayImage gray = ToGray(raster);
  std::vector<uint8_t> levels(gray.pixels.size());
  std::array<uint64_t, 256> histogram{};
  for (size_t i = 0; i < levels.size(); ++i) {
    levels[i] = static_cast<uint8_t>(std::clamp(std::lround(gray.pixels[i]), 0L, 255L));
    ++histogram[levels[i]];
  }
  int t = OtsuThreshold(histogram);
  Raster out(raster.width, raster.height);
  for (size_t i = 0; i < levels.size(); ++i) {
    uint8_t v = levels[i] <= t ? 0 : 255;
    out.rgba[i * 4] = out.rgba[i * 4 + 1] = out.rgba[i * 4 + 2] = v;
    out.rgba[i * 4 + 3] = 255;
  }
  return out;
}

absl::StatusOr<std::string> ExtractText(const Raster& binarized, OcrEngine& engine,
                                        std::string_view source_sha256) {
  LURESCAN_ASSIGN_OR_RETURN(Bytes png, EncodePng(binarized));
  return engine.Recognize(OcrRequest{png, std::string(source_sha256)});
}

std::string NormalizeText(std::string_view text) {
  UErrorCode err = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(err);
  icu::UnicodeString us = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString folded = U_SUCCESS(err) ? nfkc->normalize(us, err) : us;
  if (U_FAILURE(err)) folded = us;
  folded.toLower(icu::Locale::getRoot());
  std::string utf8;
  folded.toUTF8String(utf8);

  std::string out;
  bool pending_space = false;
  for (const CodePoint& cp : DecodeUtf8(utf8)) {
    if (u_isUWhiteSpace(cp.c) || cp.c == 0x200B) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out.append(utf8, cp.begin, cp.end - cp.begin);
  }
  return out;
}

int Levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<KeywordHit> MatchKeywords(std::string_view normalized_text, const KeywordRuleSet& rules) {
  std::vector<Token> tokens = Tokenize(normalized_text);
  std::vector<KeywordHit> hits;
  for (const auto& [lang, list] : rules.phrases) {
    for (const std::string& phrase : list) {
      CompiledPhrase p = Compile(phrase, lang);
      if (p.unspaced) {
        MatchCompact(p, normalized_text, rules, &hits);
      } else {
        MatchWords(p, tokens, normalized_text, rules, &hits);
      }
    }
  }
  // The same phrase listed under two tags yields one hit per span.
  std::vector<KeywordHit> unique;
  std::set<std::pair<std::string, size_t>> seen;
  std::stable_sort(hits.begin(), hits.end(),
                   [](const KeywordHit& a, const KeywordHit& b) { return a.offset < b.offset; });
  for (KeywordHit& h : hits) {
    if (seen.insert({h.phrase + '\x1f' + h.matched_span, h.offset}).second) unique.push_back(std::move(h));
  }
  return unique;
}

absl::StatusOr<ImageThreat> ClassifyImage(const Raster& raster, OcrEngine& engine,
                                          const KeywordRuleSet& rules, std::string_view source_sha256,
                                          const TextTranslator& translator) {
  ImageThreat threat;
  threat.engine_id = engine.id();
  LURESCAN_ASSIGN_OR_RETURN(threat.ocr_text, ExtractText(Preprocess(raster), engine, source_sha256));
  std::string normalized = NormalizeText(threat.ocr_text);
  threat.hits = MatchKeywords(normalized, rules);
  if (translator) {
    std::string translated = NormalizeText(translator(normalized));
    for (KeywordHit& h : MatchKeywords(translated, rules)) {
      h.language = "translated:" + h.language;
      threat.hits.push_back(std::move(h));
    }
  }
  threat.is_malicious = !threat.hits.empty();
  return threat;
}

}  // namespace lurescan
