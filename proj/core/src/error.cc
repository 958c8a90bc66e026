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

#include "lurescan/error.h"

#include <array>
#include <string>

#include "absl/strings/cord.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

constexpr char kPayloadUrl[] = "type.lurescan/error_code";

struct CodeInfo {
  ErrorCode code;
  std::string_view name;
  absl::StatusCode canonical;
};

constexpr std::array kCodes = {
    CodeInfo{ErrorCode::kIoFailure, "IoFailure", absl::StatusCode::kUnavailable},
    CodeInfo{ErrorCode::kCorruptArchive, "CorruptArchive", absl::StatusCode::kDataLoss},
    CodeInfo{ErrorCode::kMissingWorkbook, "MissingWorkbook", absl::StatusCode::kNotFound},
    CodeInfo{ErrorCode::kMalformedXml, "MalformedXml", absl::StatusCode::kDataLoss},
    CodeInfo{ErrorCode::kBadSignature, "BadSignature", absl::StatusCode::kInvalidArgument},
    CodeInfo{ErrorCode::kUnsupportedVersion, "UnsupportedVersion", absl::StatusCode::kUnimplemented},
    CodeInfo{ErrorCode::kNotFound, "NotFound", absl::StatusCode::kNotFound},
    CodeInfo{ErrorCode::kCyclicFatChain, "CyclicFatChain", absl::StatusCode::kDataLoss},
    CodeInfo{ErrorCode::kTruncatedFile, "TruncatedFile", absl::StatusCode::kOutOfRange},
    CodeInfo{ErrorCode::kTruncatedChunk, "TruncatedChunk", absl::StatusCode::kOutOfRange},
    CodeInfo{ErrorCode::kOffsetOutOfRange, "OffsetOutOfRange", absl::StatusCode::kOutOfRange},
    CodeInfo{ErrorCode::kMalformedDirStream, "MalformedDirStream", absl::StatusCode::kDataLoss},
    CodeInfo{ErrorCode::kUnsupportedEncryption, "UnsupportedEncryption", absl::StatusCode::kUnimplemented},
    CodeInfo{ErrorCode::kDecryptionFailed, "DecryptionFailed", absl::StatusCode::kPermissionDenied},
    CodeInfo{ErrorCode::kLengthMismatch, "LengthMismatch", absl::StatusCode::kDataLoss},
    CodeInfo{ErrorCode::kUnsupportedFormat, "UnsupportedFormat", absl::StatusCode::kUnimplemented},
    CodeInfo{ErrorCode::kAlgorithmMismatch, "AlgorithmMismatch", absl::StatusCode::kInvalidArgument},
    CodeInfo{ErrorCode::kEngineUnavailable, "EngineUnavailable", absl::StatusCode::kUnavailable},
    CodeInfo{ErrorCode::kEngineFailure, "EngineFailure", absl::StatusCode::kInternal},
    CodeInfo{ErrorCode::kIdMismatch, "IdMismatch", absl::StatusCode::kInvalidArgument},
    CodeInfo{ErrorCode::kInvalidArgument, "InvalidArgument", absl::StatusCode::kInvalidArgument},
};

const CodeInfo& Info(ErrorCode code) {
  for (const auto& info : kCodes) {
    if (info.code == code) return info;
  }
  return kCodes.back();
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) { return Info(code).name; }

absl::Status MakeError(ErrorCode code, std::string_view message) {
  const CodeInfo& info = Info(code);
  absl::Status status(info.canonical, Cat(info.name, ": ", message));
  status.SetPayload(kPayloadUrl, absl::Cord(std::string(info.name)));
  return status;
}

std::optional<ErrorCode> GetErrorCode(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  auto payload = status.GetPayload(kPayloadUrl);
  if (!payload) return std::nullopt;
  std::string name(*payload);
  for (const auto& info : kCodes) {
    if (info.name == name) return info.code;
  }
  return std::nullopt;
}

}  // namespace lurescan
