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
// Confusion-matrix metrics for labeled evaluation corpora.

#ifndef LURESCAN_METRICS_H_
#define LURESCAN_METRICS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace lurescan {

struct EvalMetrics {
  int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, accuracy = 0, f1 = 0;

  // Ratios with a zero denominator are defined as 0.
  static EvalMetrics FromCounts(int64_t tp, int64_t fp, int64_t fn, int64_t tn);
};

// Half-away-from-zero rounding to three decimals, as reported.
double Round3(double value);

using LabeledIds = std::vector<std::pair<std::string, bool>>;

// Errors: IdMismatch when the id sets differ or an id repeats.
absl::StatusOr<EvalMetrics> Evaluate(const LabeledIds& predictions, const LabeledIds& truth);

// Accepts a JSON array or JSON lines of {"id": string, "malicious": bool},
// or two-column CSV "id,label" with label in {0,1,true,false,malicious,benign}.
// Errors: InvalidArgument.
absl::StatusOr<LabeledIds> ParseLabels(std::string_view text);

}  // namespace lurescan

#endif  // LURESCAN_METRICS_H_
