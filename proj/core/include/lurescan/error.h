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

// Error vocabulary. Failures are reported as absl::Status values whose
// payload carries one of the ErrorCode kinds below, so callers can branch
// on the precise failure (e.g. CyclicFatChain vs. TruncatedFile) while the
// canonical status code stays meaningful to generic code.

#ifndef LURESCAN_ERROR_H_
#define LURESCAN_ERROR_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"

namespace lurescan {

enum class ErrorCode {
  kIoFailure,
  kCorruptArchive,
  kMissingWorkbook,
  kMalformedXml,
  kBadSignature,
  kUnsupportedVersion,
  kNotFound,
  kCyclicFatChain,
  kTruncatedFile,
  kTruncatedChunk,
  kOffsetOutOfRange,
  kMalformedDirStream,
  kUnsupportedEncryption,
  kDecryptionFailed,
  kLengthMismatch,
  kUnsupportedFormat,
  kAlgorithmMismatch,
  kEngineUnavailable,
  kEngineFailure,
  kIdMismatch,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

absl::Status MakeError(ErrorCode code, std::string_view message);

// Returns the ErrorCode attached by MakeError, or nullopt for statuses that
// did not originate here (including OkStatus).
std::optional<ErrorCode> GetErrorCode(const absl::Status& status);

inline bool HasErrorCode(const absl::Status& status, ErrorCode code) {
  return GetErrorCode(status) == code;
}

}  // namespace lurescan

// Propagates a non-OK status from `expr` out of the current function.
#define LURESCAN_RETURN_IF_ERROR(expr)              \
  do {                                              \
    if (absl::Status _st = (expr); !_st.ok()) {     \
      return _st;                                   \
    }                                               \
  } while (0)

#define LURESCAN_CONCAT_INNER_(a, b) a##b
#define LURESCAN_CONCAT_(a, b) LURESCAN_CONCAT_INNER_(a, b)

// Assigns the value of a StatusOr expression to `lhs` or returns its status.
#define LURESCAN_ASSIGN_OR_RETURN(lhs, expr) \
  LURESCAN_ASSIGN_OR_RETURN_IMPL_(LURESCAN_CONCAT_(_statusor_, __LINE__), lhs, expr)
#define LURESCAN_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                   \
  if (!tmp.ok()) return tmp.status();                  \
  lhs = std::move(tmp).value()

#endif  // LURESCAN_ERROR_H_
