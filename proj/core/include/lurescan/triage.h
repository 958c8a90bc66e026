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
// Two-layer document filter. A document without active content is benign
// regardless of its images. Otherwise a lure image known to the signature
// database convicts it (layer 1), failing that a lure keyword found by OCR
// does (layer 2); anything else is left suspicious for review.

#ifndef LURESCAN_TRIAGE_H_
#define LURESCAN_TRIAGE_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/imaging.h"
#include "lurescan/ocr_engine.h"
#include "lurescan/sigdb.h"
#include "lurescan/textline.h"

namespace lurescan {

enum class Outcome { kBenign, kSuspicious, kMalicious };
enum class Layer { kHashMatch, kKeywordMatch };

std::string_view OutcomeName(Outcome outcome);
std::string_view LayerName(Layer layer);

struct Verdict {
  Outcome outcome = Outcome::kBenign;
  std::optional<Layer> layer;
  std::vector<std::string> evidence;
  std::optional<std::string> attributed_family;  // HashMatch only

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct ScanConfig {
  int radius = 10;  // layer-1 Hamming radius
  HashAlgorithm algorithm = HashAlgorithm::kDctPhash;
  std::vector<std::string> passwords = {"VelvetSweatshop"};
  KeywordRuleSet rules = KeywordRuleSet::Defaults();
  OcrEngine* engine = nullptr;  // no engine: keyword layer skipped
  TextTranslator translator;
  // Hash and classify images even when the gate already decided Benign.
  bool analyze_benign_images = false;
};

struct ScannedImage {
  std::string part_path;
  std::string sha256;
  std::string format;
  std::optional<ImageRecord> record;  // unset when the image is not hashable
  bool unhashable_visual = false;
  std::optional<ImageThreat> threat;
};

// Facts extracted from a document before any verdict.
struct DocumentAnalysis {
  SampleRecord sample;
  std::vector<ScannedImage> images;
  std::optional<std::string> decrypted_with;
  std::optional<std::string> container_error;  // container unreadable
  std::vector<std::string> warnings;
};

struct ScanReport {
  std::string path;
  Verdict verdict;
  DocumentAnalysis analysis;
};

// Container detection, decryption, macro indicators, media extraction and
// hashing. Errors: UnsupportedEncryption. A decryption or parse failure is
// recorded on the analysis instead of failing.
absl::StatusOr<DocumentAnalysis> AnalyzeDocument(ByteView data, const std::string& source_path,
                                                 const ScanConfig& config);

absl::StatusOr<ScanReport> ScanBytes(ByteView data, const std::string& source_path, const SignatureDb* db,
                                     const ScanConfig& config);
// Errors: IoFailure, UnsupportedEncryption.
absl::StatusOr<ScanReport> ScanFile(const std::filesystem::path& path, const SignatureDb* db,
                                    const ScanConfig& config);

// Scans files on up to `jobs` threads; `on_result` is called serially in
// completion order.
using ScanCallback = std::function<void(const std::filesystem::path&, const absl::StatusOr<ScanReport>&)>;
void ScanBatch(const std::vector<std::filesystem::path>& paths, const SignatureDb* db, const ScanConfig& config,
               int jobs, const ScanCallback& on_result);

}  // namespace lurescan

#endif  // LURESCAN_TRIAGE_H_
