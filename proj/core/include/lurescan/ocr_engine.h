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
// Pluggable OCR back ends. The real engine is an external command; the
// fixture engine returns canned text keyed by image SHA-256.

#ifndef LURESCAN_OCR_ENGINE_H_
#define LURESCAN_OCR_ENGINE_H_

#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"

namespace lurescan {

// Environment variable naming the OCR command template.
inline constexpr char kOcrCommandEnv[] = "MDL_OCR_CMD";

struct OcrRequest {
  ByteView png;                // lossless encoding of the preprocessed raster
  std::string source_sha256;   // SHA-256 of the original media part, if known
};

class OcrEngine {
 public:
  virtual ~OcrEngine() = default;
  virtual std::string id() const = 0;
  // Returns UTF-8 text. Errors: EngineUnavailable, EngineFailure.
  virtual absl::StatusOr<std::string> Recognize(const OcrRequest& request) = 0;
};

// Runs `command_template` through /bin/sh. "{}" in the template is replaced
// by the quoted path of a temporary PNG; without "{}" the path is appended.
// At most `max_concurrency` processes run at once.
class CommandOcrEngine : public OcrEngine {
 public:
  explicit CommandOcrEngine(std::string command_template, int max_concurrency = 4);

  // Template from MDL_OCR_CMD; empty when unset.
  static std::string CommandFromEnvironment();

  std::string id() const override;
  absl::StatusOr<std::string> Recognize(const OcrRequest& request) override;

  const std::string& command_template() const { return template_; }

 private:
  std::string template_;
  std::counting_semaphore<1024> slots_;
};

class FixtureOcrEngine : public OcrEngine {
 public:
  FixtureOcrEngine() = default;
  explicit FixtureOcrEngine(std::map<std::string, std::string> text_by_sha256)
      : texts_(std::move(text_by_sha256)) {}

  void Add(std::string sha256, std::string text) { texts_[std::move(sha256)] = std::move(text); }

  std::string id() const override { return "fixture"; }
  // Looks up the source digest, then the digest of the PNG itself; unknown
  // images read as blank.
  absl::StatusOr<std::string> Recognize(const OcrRequest& request) override;

 private:
  std::map<std::string, std::string> texts_;
};

// Single-quotes `s` for /bin/sh.
std::string ShellQuote(std::string_view s);

}  // namespace lurescan

#endif  // LURESCAN_OCR_ENGINE_H_
