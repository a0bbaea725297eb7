/*
 * Copyright 2026 The ShaTS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "shats/predictor.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shats/error.h"
#include "support/test_util.h"

namespace shats {
namespace {

using ::shats::testing::ErrorCodeOf;
using ::testing::DoubleEq;
using ::testing::ElementsAre;

std::vector<double> Predict(Predictor& p, WindowShape shape,
                            const std::vector<double>& data) {
  return p.PredictBatch(WindowBatch{shape, data});
}

TEST(BuiltinPredictorTest, Constant) {
  auto p = MakeBuiltinPredictor("constant", {{"c", {0.3}}});
  EXPECT_THAT(Predict(*p, {2, 2}, std::vector<double>(12, 9.0)),
              ElementsAre(0.3, 0.3, 0.3));
  EXPECT_EQ(p->name(), "constant");
  EXPECT_FALSE(p->serial());
}

TEST(BuiltinPredictorTest, ConstantDefaultsToZero) {
  auto p = MakeBuiltinPredictor("constant", {});
  EXPECT_THAT(Predict(*p, {1, 1}, {5.0}), ElementsAre(0.0));
}

TEST(BuiltinPredictorTest, LinearSumsCells) {
  auto p = MakeBuiltinPredictor("linear", {{"weight", {1.0}}});
  EXPECT_THAT(Predict(*p, {2, 2}, std::vector<double>(4, 1.0)), ElementsAre(4.0));
}

TEST(BuiltinPredictorTest, LinearWeightLayouts) {
  const std::vector<double> window = {1, 2, 3, 4, 5, 6};  // 2 instants x 3
  auto per_feature =
      MakeBuiltinPredictor("linear", {{"weights", {1, 0, -1}}, {"bias", {0.5}}});
  EXPECT_THAT(Predict(*per_feature, {2, 3}, window),
              ElementsAre(0.5 + (1 - 3) + (4 - 6)));
  auto per_cell = MakeBuiltinPredictor("linear", {{"weights", {0, 0, 0, 0, 0, 2}}});
  EXPECT_THAT(Predict(*per_cell, {2, 3}, window), ElementsAre(12.0));
  auto mismatched = MakeBuiltinPredictor("linear", {{"weights", {1, 1}}});
  EXPECT_EQ(ErrorCodeOf([&] { Predict(*mismatched, {2, 3}, window); }),
            ErrorCode::kBadParams);
}

TEST(BuiltinPredictorTest, ThresholdAny) {
  auto p = MakeBuiltinPredictor("threshold-any", {{"feature", {2}}, {"tau", {5}}});
  std::vector<double> window(2 * 3, 0.0);
  window[2] = 6.0;  // (0, 2)
  std::vector<double> quiet(2 * 3, 4.0);
  quiet[0] = 100.0;  // other features may be large
  EXPECT_THAT(Predict(*p, {2, 3}, window), ElementsAre(1.0));
  EXPECT_THAT(Predict(*p, {2, 3}, quiet), ElementsAre(0.0));
  EXPECT_TRUE(p->probability());
  EXPECT_EQ(ErrorCodeOf([&] { Predict(*p, {2, 2}, std::vector<double>(4)); }),
            ErrorCode::kBadParams);
}

TEST(BuiltinPredictorTest, LastInstantThreshold) {
  auto p = MakeBuiltinPredictor("last-instant-threshold", {{"k", {2}}, {"tau", {1.5}}});
  // Row sums 3, 0, 0: only the first instant trips, outside the last two.
  EXPECT_THAT(Predict(*p, {3, 2}, {1, 2, 0, 0, 0, 0}), ElementsAre(0.0));
  EXPECT_THAT(Predict(*p, {3, 2}, {0, 0, 1, 1, 0, 0}), ElementsAre(1.0));
  auto last = MakeBuiltinPredictor("last-instant-threshold", {});
  EXPECT_THAT(Predict(*last, {2, 1}, {0.4, 0.6}), ElementsAre(1.0));
  EXPECT_THAT(Predict(*last, {2, 1}, {0.6, 0.4}), ElementsAre(0.0));
}

TEST(BuiltinPredictorTest, LogisticSum) {
  auto p = MakeBuiltinPredictor("logistic-sum", {{"weight", {2.0}}, {"bias", {-1.0}}});
  const auto out = Predict(*p, {1, 2}, {0.25, 0.25, 0.0, 0.0});
  EXPECT_THAT(out, ElementsAre(DoubleEq(0.5), DoubleEq(1.0 / (1.0 + std::exp(1.0)))));
  EXPECT_TRUE(p->probability());
}

TEST(BuiltinPredictorTest, Errors) {
  EXPECT_EQ(ErrorCodeOf([] { MakeBuiltinPredictor("forest", {}); }),
            ErrorCode::kUnknownPredictor);
  EXPECT_EQ(ErrorCodeOf([] { MakeBuiltinPredictor("constant", {{"c", {1}}, {"d", {2}}}); }),
            ErrorCode::kBadParams);
  EXPECT_EQ(ErrorCodeOf([] { MakeBuiltinPredictor("constant", {{"c", {1, 2}}}); }),
            ErrorCode::kBadParams);
  EXPECT_EQ(ErrorCodeOf([] {
              MakeBuiltinPredictor("threshold-any", {{"feature", {1.5}}});
            }),
            ErrorCode::kBadParams);
  EXPECT_EQ(ErrorCodeOf([] {
              MakeBuiltinPredictor("last-instant-threshold", {{"k", {0}}});
            }),
            ErrorCode::kBadParams);
  EXPECT_EQ(ErrorCodeOf([] {
              MakeBuiltinPredictor("linear", {{"weight", {1}}, {"weights", {1}}});
            }),
            ErrorCode::kBadParams);
  EXPECT_EQ(ErrorCodeOf([] {
              MakeBuiltinPredictor("constant",
                                   {{"c", {std::numeric_limits<double>::infinity()}}});
            }),
            ErrorCode::kBadParams);
}

TEST(BuiltinPredictorTest, NamesListed) {
  EXPECT_THAT(BuiltinPredictorNames(),
              ElementsAre("constant", "linear", "threshold-any",
                          "last-instant-threshold", "logistic-sum"));
}

TEST(ValidatePredictionsTest, RejectsBadOutputs) {
  auto plain = MakeBuiltinPredictor("constant", {{"c", {2}}});
  auto prob = MakeBuiltinPredictor("logistic-sum", {});
  EXPECT_NO_THROW(ValidatePredictions(*plain, {2.0, -7.0}, 2, 0));
  EXPECT_EQ(ErrorCodeOf([&] { ValidatePredictions(*plain, {1.0}, 2, 0); }),
            ErrorCode::kPredictorFailure);
  EXPECT_EQ(ErrorCodeOf([&] { ValidatePredictions(*plain, {std::nan("")}, 1, 0); }),
            ErrorCode::kPredictorFailure);
  EXPECT_EQ(ErrorCodeOf([&] { ValidatePredictions(*prob, {1.5}, 1, 0); }),
            ErrorCode::kPredictorFailure);
}

TEST(CountingPredictorTest, CountsWindowsAndBatches) {
  CountingPredictor counter;
  EXPECT_THAT(Predict(counter, {1, 1}, {1, 2, 3}), ElementsAre(0, 0, 0));
  Predict(counter, {1, 1}, {4});
  EXPECT_EQ(counter.windows(), 4u);
  EXPECT_EQ(counter.batches(), 2u);
  counter.Reset();
  EXPECT_EQ(counter.windows(), 0u);

  auto inner = MakeBuiltinPredictor("constant", {{"c", {0.7}}});
  CountingPredictor wrapped(inner.get());
  EXPECT_THAT(Predict(wrapped, {1, 1}, {1, 2}), ElementsAre(0.7, 0.7));
  EXPECT_EQ(wrapped.windows(), 2u);
}

}  // namespace
}  // namespace shats
