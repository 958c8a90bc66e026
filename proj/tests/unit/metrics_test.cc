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

#include <gtest/gtest.h>

#include <random>

#include "lurescan/error.h"

namespace lurescan {
namespace {

TEST(MetricsTest, PublishedConfusionCounts) {
  EvalMetrics m = EvalMetrics::FromCounts(156, 11, 3, 2853);
  EXPECT_NEAR(Round3(m.precision), 0.934, 1e-9);
  EXPECT_NEAR(Round3(m.recall), 0.981, 1e-9);
  EXPECT_NEAR(Round3(m.accuracy), 0.995, 1e-9);
  EXPECT_NEAR(Round3(m.f1), 0.957, 1e-9);
}

TEST(MetricsTest, AllCorrect) {
  LabeledIds truth, pred;
  for (int i = 0; i < 10; ++i) {
    truth.push_back({"s" + std::to_string(i), i % 3 == 0});
    pred.push_back({"s" + std::to_string(9 - i), (9 - i) % 3 == 0});
  }
  auto m = Evaluate(pred, truth);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->precision, 1.0);
  EXPECT_EQ(m->recall, 1.0);
  EXPECT_EQ(m->accuracy, 1.0);
  EXPECT_EQ(m->f1, 1.0);
}

TEST(MetricsTest, ZeroDenominators) {
  EvalMetrics m = EvalMetrics::FromCounts(0, 0, 0, 12);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(EvalMetrics::FromCounts(0, 0, 0, 0).accuracy, 0.0);
}

TEST(MetricsTest, DefinitionsHoldOnRandomCounts) {
  std::mt19937 rng(5);
  for (int i = 0; i < 1000; ++i) {
    int64_t tp = rng() % 50, fp = rng() % 50, fn = rng() % 50, tn = rng() % 50;
    EvalMetrics m = EvalMetrics::FromCounts(tp, fp, fn, tn);
    for (double v : {m.precision, m.recall, m.accuracy, m.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (tp + fp > 0) EXPECT_DOUBLE_EQ(m.precision, static_cast<double>(tp) / (tp + fp));
    if (m.precision + m.recall > 0) {
      EXPECT_DOUBLE_EQ(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall));
    }
  }
}

TEST(MetricsTest, Round3) {
  EXPECT_EQ(Round3(0.9345), 0.935);
  EXPECT_EQ(Round3(0.9344), 0.934);
  EXPECT_EQ(Round3(1.0), 1.0);
}

TEST(EvaluateTest, IdMismatch) {
  LabeledIds truth = {{"a", true}, {"b", false}};
  EXPECT_TRUE(HasErrorCode(Evaluate({{"a", true}}, truth).status(), ErrorCode::kIdMismatch));
  EXPECT_TRUE(HasErrorCode(Evaluate({{"a", true}, {"c", true}}, truth).status(), ErrorCode::kIdMismatch));
  EXPECT_TRUE(HasErrorCode(Evaluate({{"a", true}, {"a", false}}, truth).status(), ErrorCode::kIdMismatch));
}

TEST(ParseLabelsTest, Formats) {
  auto json = ParseLabels(R"([{"id":"a","malicious":true},{"id":"b","malicious":false}])");
  ASSERT_TRUE(json.ok()) << json.status();
  EXPECT_EQ(*json, (LabeledIds{{"a", true}, {"b", false}}));
  auto jsonl = ParseLabels("{\"id\":\"a\",\"label\":\"malicious\"}\n{\"id\":\"b\",\"predicted\":false}\n");
  ASSERT_TRUE(jsonl.ok()) << jsonl.status();
  EXPECT_EQ(*jsonl, (LabeledIds{{"a", true}, {"b", false}}));
  auto csv = ParseLabels("id,label\na,1\nb,benign\n");
  ASSERT_TRUE(csv.ok()) << csv.status();
  EXPECT_EQ(*csv, (LabeledIds{{"a", true}, {"b", false}}));
  EXPECT_FALSE(ParseLabels("id,label\na,maybe\n").ok());
}

}  // namespace
}  // namespace lurescan
