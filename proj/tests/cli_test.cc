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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "shats/commands.h"
#include "shats/config.h"
#include "shats/error.h"
#include "support/test_util.h"

namespace shats::cli {
namespace {

namespace fs = std::filesystem;
using ::shats::testing::ErrorCodeOf;
using ::shats::testing::MockPredictorPath;
using ::shats::testing::TempDir;
using ::shats::testing::WriteText;
using ::testing::HasSubstr;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Shats(std::vector<std::string> args) {
  args.insert(args.begin(), "shats");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// 200 rows: two sensors, one constant column, one two-valued mode.
std::string SampleCsv() {
  std::ostringstream csv;
  csv << "timestamp,a,b,c,mode,label\n";
  for (int t = 0; t < 200; ++t) {
    csv << t << "," << std::sin(0.3 * t) << "," << std::cos(0.17 * t) << ",1.0,"
        << (t % 3 == 0 ? "x" : "y") << ",0\n";
  }
  return csv.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    WriteText(dir_ / "data.csv", SampleCsv());
    WriteText(dir_ / "config.json", R"({
      "data": "data.csv",
      "split": {"segment_length": 100, "train_fraction": 0.6,
                "val_fraction": 0.2, "padding": 4},
      "window_size": 5,
      "stride": 2,
      "workdir": "work",
      "grouping": {"strategy": "feature"},
      "background": {"sample": 6},
      "predictor": {"builtin": "logistic-sum", "params": {"weight": 0.3, "bias": -0.2}},
      "explain": {"count": 4},
      "method": "approximate",
      "seed": 11,
      "outputs": {"frames": "frames.json", "ranking": "ranking.json",
                  "heatmap": "heatmap.svg"}
    })");
  }

  Outcome Preprocess() { return Shats({"preprocess", "-c", Config()}); }
  std::string Config() const { return (dir_ / "config.json").string(); }

  TempDir dir_;
};

TEST(ConfigTest, RejectsUnknownKeys) {
  EXPECT_EQ(ErrorCodeOf([] { ConfigFromJson(R"({"windowsize": 3})", "."); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(ErrorCodeOf([] { ConfigFromJson(R"({"split": {"pad": 3}})", "."); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(ErrorCodeOf([] { ConfigFromJson("{", "."); }), ErrorCode::kConfigError);
  EXPECT_EQ(ErrorCodeOf([] { ConfigFromJson(R"({"method": "fast"})", "."); }),
            ErrorCode::kConfigError);
}

TEST(ConfigTest, ResolvesRelativePaths) {
  const RunConfig c =
      ConfigFromJson(R"({"data": "x.csv", "workdir": "/abs/w", "budget": 40})", "/base");
  EXPECT_EQ(c.data, fs::path("/base/x.csv"));
  EXPECT_EQ(c.workdir, fs::path("/abs/w"));
  EXPECT_EQ(c.budget, 40);
}

TEST(ConfigTest, ExclusiveSources) {
  RunConfig c;
  c.predictor_builtin = "constant";
  c.predictor_exec = {"/bin/true"};
  EXPECT_EQ(ErrorCodeOf([&] { CheckExclusiveSources(c); }), ErrorCode::kConfigError);
}

TEST(ExitCodeTest, Categories) {
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kConfigError, "")), kExitConfig);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kParseError, "")), kExitData);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kProtocolViolation, "")), kExitPredictor);
  EXPECT_EQ(ExitCodeFor(Error(ErrorCode::kInternal, "")), kExitInternal);
}

TEST_F(CliTest, PreprocessSummary) {
  const Outcome o = Preprocess();
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_THAT(o.out, HasSubstr("rows: 200"));
  EXPECT_THAT(o.out, HasSubstr("dropped columns: c"));
  // a, b, mode=x, mode=y, mode=<unseen>.
  EXPECT_THAT(o.out, HasSubstr("encoded features: 5"));
  EXPECT_TRUE(fs::exists(dir_ / "work" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "work" / "test" / "windows.json"));
}

TEST_F(CliTest, MissingDataLeavesNoOutputs) {
  const Outcome o = Shats({"preprocess", "-c", Config(), "--data",
                         (dir_ / "nope.csv").string()});
  EXPECT_NE(o.code, 0);
  EXPECT_THAT(o.err, HasSubstr("error:"));
  EXPECT_FALSE(fs::exists(dir_ / "work"));
}

TEST_F(CliTest, MissingWorkdirIsConfigError) {
  const Outcome o = Shats({"explain", "-c", Config()});
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir_ / "frames.json"));
}

TEST_F(CliTest, FlagsOverrideConfig) {
  ASSERT_EQ(Preprocess().code, 0);
  const Outcome o = Shats({"explain", "-c", Config(), "--seed", "99", "--budget", "9",
                         "--count", "2"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_THAT(o.out, HasSubstr("seed: 99"));
  EXPECT_THAT(o.out, HasSubstr("budget: 9"));
  const auto doc = nlohmann::json::parse(Slurp(dir_ / "frames.json"));
  EXPECT_EQ(doc["frames"].size(), 2u);
  EXPECT_EQ(doc["meta"]["seed"], 99);
  EXPECT_EQ(Shats({"explain", "-c", Config(), "--seed", "x"}).code, kExitConfig);
}

TEST_F(CliTest, ConstantPredictorGivesZeroAttributions) {
  ASSERT_EQ(Preprocess().code, 0);
  const Outcome o = Shats({"explain", "-c", Config(), "--predictor", "constant",
                         "--predictor-params", R"({"c": 0.4})"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto doc = nlohmann::json::parse(Slurp(dir_ / "frames.json"));
  for (const auto& frame : doc["frames"]) {
    EXPECT_NEAR(frame["prediction"].get<double>(), 0.4, 1e-15);
    for (const auto& phi : frame["attributions"]) EXPECT_EQ(phi.get<double>(), 0.0);
  }
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  ASSERT_EQ(Preprocess().code, 0);
  ASSERT_EQ(Shats({"explain", "-c", Config()}).code, 0);
  const std::string first = Slurp(dir_ / "frames.json");
  ASSERT_EQ(Shats({"explain", "-c", Config(), "--threads", "3"}).code, 0);
  EXPECT_EQ(Slurp(dir_ / "frames.json"), first);
  ASSERT_EQ(Shats({"explain", "-c", Config(), "--seed", "12"}).code, 0);
  EXPECT_NE(Slurp(dir_ / "frames.json"), first);
}

TEST_F(CliTest, ExternalTwinMatchesBuiltin) {
  ASSERT_EQ(Preprocess().code, 0);
  ASSERT_EQ(Shats({"explain", "-c", Config()}).code, 0);
  const auto builtin = nlohmann::json::parse(Slurp(dir_ / "frames.json"));
  const Outcome o = Shats({"explain", "-c", Config(), "--predictor-exec",
                         MockPredictorPath() + " logistic-sum 0.3 -0.2"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto external = nlohmann::json::parse(Slurp(dir_ / "frames.json"));
  ASSERT_EQ(builtin["frames"].size(), external["frames"].size());
  for (std::size_t i = 0; i < builtin["frames"].size(); ++i) {
    const auto& a = builtin["frames"][i]["attributions"];
    const auto& b = external["frames"][i]["attributions"];
    for (std::size_t g = 0; g < a.size(); ++g) {
      EXPECT_NEAR(a[g].get<double>(), b[g].get<double>(), 1e-9);
    }
  }
}

TEST_F(CliTest, BrokenPredictorExitsWithPredictorCode) {
  ASSERT_EQ(Preprocess().code, 0);
  const Outcome o = Shats({"explain", "-c", Config(), "--predictor-exec",
                         MockPredictorPath() + " bad-id"});
  EXPECT_EQ(o.code, kExitPredictor);
  EXPECT_FALSE(fs::exists(dir_ / "frames.json"));
}

TEST_F(CliTest, RankAndHeatmap) {
  ASSERT_EQ(Preprocess().code, 0);
  ASSERT_EQ(Shats({"explain", "-c", Config()}).code, 0);
  ASSERT_EQ(Shats({"rank", "-c", Config()}).code, 0);
  const auto ranking = nlohmann::json::parse(Slurp(dir_ / "ranking.json"));
  EXPECT_EQ(ranking["ranking"].size(), 5u);
  EXPECT_EQ(ranking["windows"], 4);
  ASSERT_EQ(Shats({"heatmap", "-c", Config()}).code, 0);
  EXPECT_THAT(Slurp(dir_ / "heatmap.svg"), HasSubstr("<svg"));
}

TEST_F(CliTest, RankEventsWithTruth) {
  ASSERT_EQ(Preprocess().code, 0);
  ASSERT_EQ(Shats({"explain", "-c", Config(), "--split", "train", "--count", "20"}).code, 0);
  const auto frames = nlohmann::json::parse(Slurp(dir_ / "frames.json"));
  const std::int64_t first = frames["frames"][0]["origin"];
  const std::int64_t last = frames["frames"][19]["origin"];
  WriteText(dir_ / "events.json",
            nlohmann::json{{"events",
                            {{{"name", "e1"}, {"start", first}, {"end", last},
                              {"truth", "a"}}}}}
                .dump());
  const Outcome o =
      Shats({"rank", "-c", Config(), "--events", (dir_ / "events.json").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto doc = nlohmann::json::parse(Slurp(dir_ / "ranking.json"));
  EXPECT_EQ(doc["events"][0]["windows"], 20);
  EXPECT_EQ(doc["localization"]["k"], 1);
  const double score = doc["localization"]["score"];
  EXPECT_TRUE(score == 0.0 || score == 1.0);
}

TEST_F(CliTest, GoldenCsvHeatmap) {
  WriteText(dir_ / "frames.json", R"({
    "grouping": ["a", "b"],
    "frames": [
      {"origin": 3, "prediction": 0.75, "baseline": 0.5, "attributions": [0.5, -0.25]},
      {"origin": 4, "prediction": 0.125, "baseline": 0.5, "attributions": [0, -0.375]}
    ],
    "meta": {"method": "exact", "budget": null, "seed": 0, "K": 1}
  })");
  const Outcome o = Shats({"heatmap", "-c", Config(), "--heatmap",
                         (dir_ / "h.csv").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(Slurp(dir_ / "h.csv"),
            "group,3,4\n"
            "a,0.5,0\n"
            "b,-0.25,-0.375\n"
            "prediction,0.75,0.125\n");
}

TEST(CliSelftestTest, AllChecksPass) {
  const Outcome o = Shats({"selftest"});
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_THAT(o.out, ::testing::Not(HasSubstr("FAIL")));
}

TEST(CliUsageTest, UnknownSubcommandIsConfigError) {
  EXPECT_EQ(Shats({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(Shats({}).code, kExitConfig);
}

}  // namespace
}  // namespace shats::cli
