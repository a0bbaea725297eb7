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

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shats/error.h"
#include "shats/predictor.h"
#include "support/test_util.h"

namespace shats {
namespace {

using ::shats::testing::ErrorCodeOf;
using ::shats::testing::MockPredictorPath;
using ::testing::ElementsAre;

std::unique_ptr<Predictor> Spawn(std::vector<std::string> args,
                                 int timeout_ms = 5000) {
  args.insert(args.begin(), MockPredictorPath());
  return SpawnExternalPredictor(args, timeout_ms);
}

std::vector<double> Predict(Predictor& p, WindowShape shape,
                            const std::vector<double>& data) {
  return p.PredictBatch(WindowBatch{shape, data});
}

TEST(ExternalPredictorTest, ConstantModel) {
  auto p = Spawn({"constant", "0.5"});
  EXPECT_TRUE(p->serial());
  EXPECT_EQ(p->name(), "mock-constant");
  EXPECT_THAT(Predict(*p, {2, 2}, std::vector<double>(12, 1.0)),
              ElementsAre(0.5, 0.5, 0.5));
}

TEST(ExternalPredictorTest, MeanModel) {
  auto p = Spawn({"mean"});
  EXPECT_THAT(Predict(*p, {3, 2}, std::vector<double>(6, 2.0)), ElementsAre(2.0));
}

TEST(ExternalPredictorTest, ProcessPersistsAcrossCalls) {
  auto p = Spawn({"mean"});
  for (int i = 0; i < 50; ++i) {
    EXPECT_THAT(Predict(*p, {1, 2}, {1.0 * i, 3.0 * i}), ElementsAre(2.0 * i));
  }
}

TEST(ExternalPredictorTest, ValuesSurviveTheWire) {
  auto p = Spawn({"logistic-sum", "0.37", "-0.2"});
  auto twin = MakeBuiltinPredictor("logistic-sum", {{"weight", {0.37}}, {"bias", {-0.2}}});
  std::vector<double> data;
  for (int i = 0; i < 4 * 3 * 5; ++i) data.push_back(std::sin(i * 1.2345) * 1e-3 * (i + 1));
  EXPECT_EQ(Predict(*p, {3, 4}, data), Predict(*twin, {3, 4}, data));
}

TEST(ExternalPredictorTest, EmptyBatch) {
  auto p = Spawn({"mean"});
  EXPECT_TRUE(Predict(*p, {2, 2}, {}).empty());
}

TEST(ExternalPredictorTest, ProtocolViolations) {
  for (const char* mode : {"malformed", "bad-id", "short", "extra-key", "null-output"}) {
    auto p = Spawn({mode});
    EXPECT_EQ(ErrorCodeOf([&] { Predict(*p, {1, 1}, {1.0, 2.0}); }),
              ErrorCode::kProtocolViolation)
        << mode;
    // A broken channel stays broken rather than producing numbers later.
    EXPECT_EQ(ErrorCodeOf([&] { Predict(*p, {1, 1}, {1.0, 2.0}); }),
              ErrorCode::kPredictorFailure)
        << mode;
  }
}

TEST(ExternalPredictorTest, BadHandshakes) {
  EXPECT_EQ(ErrorCodeOf([] { Spawn({"no-handshake"}); }),
            ErrorCode::kProtocolViolation);
  EXPECT_EQ(ErrorCodeOf([] { Spawn({"bad-handshake"}); }),
            ErrorCode::kProtocolViolation);
}

TEST(ExternalPredictorTest, ChildExits) {
  auto p = Spawn({"crash"});
  EXPECT_EQ(ErrorCodeOf([&] { Predict(*p, {1, 1}, {1.0}); }),
            ErrorCode::kProtocolViolation);
}

TEST(ExternalPredictorTest, Timeout) {
  auto p = Spawn({"sleep", "3000"}, 200);
  EXPECT_EQ(ErrorCodeOf([&] { Predict(*p, {1, 1}, {1.0}); }), ErrorCode::kTimeout);
}

TEST(ExternalPredictorTest, SpawnFailures) {
  EXPECT_EQ(ErrorCodeOf([] {
              SpawnExternalPredictor({"/nonexistent/shats-model"}, 1000);
            }),
            ErrorCode::kSpawnFailure);
  EXPECT_EQ(ErrorCodeOf([] { SpawnExternalPredictor({}, 1000); }),
            ErrorCode::kSpawnFailure);
  EXPECT_EQ(ErrorCodeOf([] { SpawnExternalPredictor({MockPredictorPath(), "mean"}, 0); }),
            ErrorCode::kBadParams);
}

}  // namespace
}  // namespace shats
