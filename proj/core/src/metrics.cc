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
#include "lurescan/metrics.h"

#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "lurescan/error.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

double Ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

absl::StatusOr<bool> ParseLabelToken(std::string_view raw) {
  std::string v = AsciiLower(StripAsciiWhitespace(raw));
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  if (v == "1" || v == "true" || v == "malicious") return true;
  if (v == "0" || v == "false" || v == "benign") return false;
  return MakeError(ErrorCode::kInvalidArgument, Cat("unrecognized label '", raw, "'"));
}

absl::StatusOr<std::pair<std::string, bool>> FromJsonObject(const nlohmann::json& obj) {
  if (!obj.is_object() || !obj.contains("id")) {
    return MakeError(ErrorCode::kInvalidArgument, "label record needs an \"id\" field");
  }
  std::string id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
  for (const char* key : {"malicious", "label", "predicted"}) {
    if (!obj.contains(key)) continue;
    const auto& v = obj[key];
    if (v.is_boolean()) return std::make_pair(id, v.get<bool>());
    if (v.is_number_integer()) return std::make_pair(id, v.get<int64_t>() != 0);
    if (v.is_string()) {
      auto b = ParseLabelToken(v.get<std::string>());
      if (!b.ok()) return b.status();
      return std::make_pair(id, *b);
    }
  }
  return MakeError(ErrorCode::kInvalidArgument, Cat("record '", id, "' has no boolean label"));
}

}  // namespace

EvalMetrics EvalMetrics::FromCounts(int64_t tp, int64_t fp, int64_t fn, int64_t tn) {
  EvalMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  m.precision = Ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  m.recall = Ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  m.accuracy = Ratio(static_cast<double>(tp + tn), static_cast<double>(tp + fp + fn + tn));
  m.f1 = Ratio(2 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

double Round3(double value) { return std::round(value * 1000.0) / 1000.0; }

absl::StatusOr<EvalMetrics> Evaluate(const LabeledIds& predictions, const LabeledIds& truth) {
  if (predictions.size() != truth.size()) {
    return MakeError(ErrorCode::kIdMismatch,
                     Cat(predictions.size(), " predictions for ", truth.size(), " labeled ids"));
  }
  std::map<std::string, bool> labels;
  for (const auto& [id, label] : truth) {
    if (!labels.emplace(id, label).second) {
      return MakeError(ErrorCode::kIdMismatch, Cat("duplicate truth id '", id, "'"));
    }
  }
  std::map<std::string, bool> seen;
  int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& [id, predicted] : predictions) {
    auto it = labels.find(id);
    if (it == labels.end()) return MakeError(ErrorCode::kIdMismatch, Cat("no truth label for '", id, "'"));
    if (!seen.emplace(id, predicted).second) {
      return MakeError(ErrorCode::kIdMismatch, Cat("duplicate prediction id '", id, "'"));
    }
    bool actual = it->second;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
    else ++tn;
  }
  return EvalMetrics::FromCounts(tp, fp, fn, tn);
}

absl::StatusOr<LabeledIds> ParseLabels(std::string_view text) {
  LabeledIds out;
  std::string_view trimmed = StripAsciiWhitespace(text);
  if (trimmed.empty()) return out;
  if (trimmed.front() == '[') {
    nlohmann::json doc = nlohmann::json::parse(trimmed, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
      return MakeError(ErrorCode::kInvalidArgument, "malformed JSON label array");
    }
    for (const auto& obj : doc) {
      auto rec = FromJsonObject(obj);
      if (!rec.ok()) return rec.status();
      out.push_back(*std::move(rec));
    }
    return out;
  }
  size_t line_no = 0;
  for (std::string_view line : Split(trimmed, '\n')) {
    ++line_no;
    line = StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '{') {
      nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
      if (obj.is_discarded()) return MakeError(ErrorCode::kInvalidArgument, Cat("line ", line_no, ": bad JSON"));
      auto rec = FromJsonObject(obj);
      if (!rec.ok()) return rec.status();
      out.push_back(*std::move(rec));
      continue;
    }
    size_t comma = line.rfind(',');
    if (comma == std::string_view::npos) {
      return MakeError(ErrorCode::kInvalidArgument, Cat("line ", line_no, ": expected 'id,label'"));
    }
    std::string_view id = StripAsciiWhitespace(line.substr(0, comma));
    auto label = ParseLabelToken(line.substr(comma + 1));
    if (!label.ok()) {
      if (line_no == 1) continue;  // header row
      return label.status();
    }
    out.emplace_back(std::string(id), *label);
  }
  return out;
}

}  // namespace lurescan
