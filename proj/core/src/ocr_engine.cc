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
#include "lurescan/ocr_engine.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lurescan/error.h"
#include "lurescan/imaging.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

constexpr int kShellNotFound = 127;
constexpr size_t kMaxDiagnostic = 2000;

// Temporary file removed on scope exit.
class TempFile {
 public:
  explicit TempFile(std::string_view suffix) {
    std::string pattern = (std::filesystem::temp_directory_path() / "lurescan-XXXXXX").string();
    pattern += suffix;
    int fd = mkstemps(pattern.data(), static_cast<int>(suffix.size()));
    if (fd >= 0) {
      close(fd);
      path_ = pattern;
    }
  }
  ~TempFile() {
    if (!path_.empty()) {
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  bool ok() const { return !path_.empty(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// RAII release for the concurrency slot.
struct SlotGuard {
  std::counting_semaphore<1024>& sem;
  explicit SlotGuard(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
};

}  // namespace

std::string ShellQuote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

CommandOcrEngine::CommandOcrEngine(std::string command_template, int max_concurrency)
    : template_(std::move(command_template)), slots_(std::clamp(max_concurrency, 1, 1024)) {}

std::string CommandOcrEngine::CommandFromEnvironment() {
  const char* env = std::getenv(kOcrCommandEnv);
  return env == nullptr ? std::string() : std::string(env);
}

std::string CommandOcrEngine::id() const { return Cat("command:", template_); }

absl::StatusOr<std::string> CommandOcrEngine::Recognize(const OcrRequest& request) {
  if (StripAsciiWhitespace(template_).empty()) {
    return MakeError(ErrorCode::kEngineUnavailable, "no OCR command configured");
  }
  SlotGuard slot(slots_);
  TempFile image(".png");
  TempFile diagnostics(".log");
  if (!image.ok() || !diagnostics.ok()) {
    return MakeError(ErrorCode::kIoFailure, "cannot create temporary files for OCR");
  }
  {
    std::ofstream out(image.path(), std::ios::binary);
    out.write(reinterpret_cast<const char*>(request.png.data()),
              static_cast<std::streamsize>(request.png.size()));
    if (!out) return MakeError(ErrorCode::kIoFailure, "cannot write OCR input image");
  }

  std::string command = template_;
  std::string quoted = ShellQuote(image.path());
  if (size_t at = command.find("{}"); at != std::string::npos) {
    command.replace(at, 2, quoted);
  } else {
    command += " " + quoted;
  }
  command = Cat("( ", command, " ) 2>", ShellQuote(diagnostics.path()), " </dev/null");

  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return MakeError(ErrorCode::kEngineUnavailable, "cannot start /bin/sh");
  std::string text;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) text.append(buf, n);
  int status = pclose(pipe);

  if (status == -1 || !WIFEXITED(status)) {
    return MakeError(ErrorCode::kEngineFailure, "OCR command terminated abnormally");
  }
  int code = WEXITSTATUS(status);
  if (code == 0) return text;
  std::string stderr_text = ReadAll(diagnostics.path());
  if (stderr_text.size() > kMaxDiagnostic) stderr_text = stderr_text.substr(stderr_text.size() - kMaxDiagnostic);
  if (code == kShellNotFound) {
    return MakeError(ErrorCode::kEngineUnavailable, Cat("OCR command not found: ", stderr_text));
  }
  return MakeError(ErrorCode::kEngineFailure, Cat("OCR command exited with ", code, ": ", stderr_text));
}

absl::StatusOr<std::string> FixtureOcrEngine::Recognize(const OcrRequest& request) {
  if (!request.source_sha256.empty()) {
    if (auto it = texts_.find(request.source_sha256); it != texts_.end()) return it->second;
  }
  if (auto it = texts_.find(Sha256Hex(request.png)); it != texts_.end()) return it->second;
  return std::string();
}

}  // namespace lurescan
