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

#include "shats/pipeline.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shats/error.h"
#include "shats/grouping.h"
#include "support/test_util.h"

namespace shats {
namespace {

using ::shats::testing::ErrorCodeOf;
using ::testing::ElementsAre;
using ::testing::ElementsAreArray;
using ::testing::UnorderedElementsAre;

std::vector<std::int64_t> Range(std::int64_t first, std::int64_t last) {
  std::vector<std::int64_t> out(last - first + 1);
  std::iota(out.begin(), out.end(), first);
  return out;
}

Column Continuous(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.values = std::move(values);
  return c;
}

Column Categorical(std::string name, std::vector<std::string> text) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::kCategorical;
  c.text = std::move(text);
  return c;
}

// SplitWithPadding

TEST(SplitWithPaddingTest, DefaultSpecOnOneSegment) {
  const RowSplit split = SplitWithPadding(1000, SplitSpec{});
  EXPECT_EQ(split.train, Range(0, 589));
  EXPECT_EQ(split.val, Range(640, 749));
  EXPECT_EQ(split.test, Range(800, 999));
}

TEST(SplitWithPaddingTest, ExactFractionsNoPadding) {
  const RowSplit split = SplitWithPadding(8, {8, 0.5, 0.25, 0});
  EXPECT_EQ(split.train, Range(0, 3));
  EXPECT_EQ(split.val, Range(4, 5));
  EXPECT_EQ(split.test, Range(6, 7));
}

TEST(SplitWithPaddingTest, ShortTableIsOneSegment) {
  // Ten rows cannot fit 50 rows of padding twice, so they all train.
  EXPECT_EQ(SplitWithPadding(10, SplitSpec{}).train, Range(0, 9));
  const RowSplit split = SplitWithPadding(10, {1000, 0.5, 0.25, 0});
  EXPECT_EQ(split.train, Range(0, 4));
  EXPECT_EQ(split.val, Range(5, 6));
  EXPECT_EQ(split.test, Range(7, 9));
}

TEST(SplitWithPaddingTest, SegmentsRepeatWithPartialTail) {
  const RowSplit split = SplitWithPadding(250, {100, 0.6, 0.2, 5});
  const std::vector<std::int64_t> train = [] {
    std::vector<std::int64_t> out;
    for (auto r : Range(0, 54)) out.push_back(r);
    for (auto r : Range(100, 154)) out.push_back(r);
    for (auto r : Range(200, 224)) out.push_back(r);  // floor(0.6 * 50) - 5
    return out;
  }();
  EXPECT_EQ(split.train, train);
  std::vector<std::int64_t> val = Range(60, 74);
  for (auto r : Range(160, 174)) val.push_back(r);
  for (auto r : Range(230, 234)) val.push_back(r);
  EXPECT_EQ(split.val, val);
  std::vector<std::int64_t> test = Range(80, 99);
  for (auto r : Range(180, 199)) test.push_back(r);
  for (auto r : Range(240, 249)) test.push_back(r);
  EXPECT_EQ(split.test, test);
}

TEST(SplitWithPaddingTest, SetsAreDisjointAndSkipPadding) {
  for (std::size_t rows : {999u, 1000u, 2345u, 5000u}) {
    const SplitSpec spec{};
    const RowSplit split = SplitWithPadding(rows, spec);
    std::set<std::int64_t> all;
    for (const auto* set : {&split.train, &split.val, &split.test}) {
      for (auto r : *set) EXPECT_TRUE(all.insert(r).second) << r;
    }
    // Padding rows are exactly the ones missing.
    EXPECT_LE(all.size(), rows);
  }
}

TEST(SplitWithPaddingTest, InvalidSpecs) {
  EXPECT_EQ(ErrorCodeOf([] { SplitWithPadding(100, {100, 0.7, 0.3, 0}); }),
            ErrorCode::kInvalidSplit);
  EXPECT_EQ(ErrorCodeOf([] { SplitWithPadding(100, {100, 0.0, 0.3, 0}); }),
            ErrorCode::kInvalidSplit);
  EXPECT_EQ(ErrorCodeOf([] { SplitWithPadding(100, {100, 0.5, 0.2, -1}); }),
            ErrorCode::kInvalidSplit);
  EXPECT_EQ(ErrorCodeOf([] { SplitWithPadding(100, {10, 0.5, 0.2, 4}); }),
            ErrorCode::kSegmentTooShort);
  // Fits 2p+3 but a 10% val run cannot absorb 5 rows of padding.
  EXPECT_EQ(ErrorCodeOf([] { SplitWithPadding(100, {40, 0.5, 0.1, 5}); }),
            ErrorCode::kSegmentTooShort);
}

// PruneZeroVariance

TEST(PruneZeroVarianceTest, DropsConstantColumns) {
  TimeSeriesTable t;
  t.columns = {Continuous("ones", {1, 1, 1, 1}), Continuous("x", {1, 2, 3, 4}),
               Categorical("mode", {"a", "a", "a", "a"})};
  const std::vector<std::int64_t> train = {0, 1, 2, 3};
  const PruneResult r = PruneZeroVariance(t, train);
  EXPECT_THAT(r.dropped, ElementsAre("ones", "mode"));
  ASSERT_EQ(r.table.columns.size(), 1u);
  EXPECT_EQ(r.table.columns[0].name, "x");
}

TEST(PruneZeroVarianceTest, FiftyOneColumnsSevenConstant) {
  TimeSeriesTable t;
  for (int c = 0; c < 51; ++c) {
    std::vector<double> v(20);
    for (int r = 0; r < 20; ++r) v[r] = c % 7 == 0 ? 3.0 : r * (c + 1);
    t.columns.push_back(Continuous("c" + std::to_string(c), v));
  }
  const auto train = Range(0, 19);
  const PruneResult r = PruneZeroVariance(t, train);
  EXPECT_EQ(r.dropped.size(), 8u);  // c0, c7, ..., c49
  EXPECT_EQ(r.table.columns.size(), 43u);

  // Seven constant columns exactly.
  t.columns.erase(t.columns.begin() + 49);
  std::vector<double> extra(20);
  std::iota(extra.begin(), extra.end(), 0.0);
  t.columns.push_back(Continuous("extra", extra));
  EXPECT_EQ(PruneZeroVariance(t, train).table.columns.size(), 44u);
}

TEST(PruneZeroVarianceTest, UsesTrainRowsOnly) {
  TimeSeriesTable t;
  t.columns = {Continuous("drift", {5, 5, 5, 9, 12})};
  const std::vector<std::int64_t> train = {0, 1, 2};
  EXPECT_THAT(PruneZeroVariance(t, train).dropped, ElementsAre("drift"));
}

// EncodeAndNormalize

TEST(EncodeTest, StandardScoresOnTrainRows) {
  TimeSeriesTable t;
  t.columns = {Continuous("x", {0, 2, 100})};
  const std::vector<std::int64_t> train = {0, 1};
  const EncodeResult r = EncodeAndNormalize(t, train);
  EXPECT_THAT(r.matrix.data, ElementsAre(-1.0, 1.0, 99.0));
  ASSERT_EQ(r.report.continuous.size(), 1u);
  EXPECT_EQ(r.report.continuous[0].center, 1.0);
  EXPECT_EQ(r.report.continuous[0].scale, 1.0);
}

TEST(EncodeTest, MinMaxOnTrainRows) {
  TimeSeriesTable t;
  t.columns = {Continuous("x", {2, 6, 4, 10})};
  const std::vector<std::int64_t> train = {0, 1, 2};
  const EncodeResult r = EncodeAndNormalize(t, train, {NormalizationMode::kMinMax, true});
  EXPECT_THAT(r.matrix.data, ElementsAre(0.0, 1.0, 0.5, 2.0));
}

TEST(EncodeTest, StatisticsIgnoreValAndTestRows) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> train_dist(0.0, 1.0);
  std::normal_distribution<double> test_dist(50.0, 9.0);
  std::vector<double> v;
  for (int r = 0; r < 60; ++r) v.push_back(r < 30 ? train_dist(rng) : test_dist(rng));
  TimeSeriesTable t;
  t.columns = {Continuous("x", v)};
  const auto train = Range(0, 29);
  const EncodeResult r = EncodeAndNormalize(t, train);
  double mean = 0.0;
  for (int i = 0; i < 30; ++i) mean += v[i];
  mean /= 30;
  double var = 0.0;
  for (int i = 0; i < 30; ++i) var += (v[i] - mean) * (v[i] - mean);
  EXPECT_NEAR(r.report.continuous[0].center, mean, 1e-12);
  EXPECT_NEAR(r.report.continuous[0].scale, std::sqrt(var / 30), 1e-12);
  // Refitting on the other rows gives visibly different statistics.
  const auto rest = Range(30, 59);
  EXPECT_GT(std::fabs(EncodeAndNormalize(t, rest).report.continuous[0].center -
                      r.report.continuous[0].center),
            10.0);
}

TEST(EncodeTest, OneHotWithUnseenIndicator) {
  TimeSeriesTable t;
  t.columns = {Categorical("valve", {"open", "closed", "open", "stuck"})};
  const std::vector<std::int64_t> train = {0, 1, 2};
  const EncodeResult r = EncodeAndNormalize(t, train);
  EXPECT_THAT(r.report.feature_names,
              ElementsAre("valve=closed", "valve=open", "valve=<unseen>"));
  EXPECT_THAT(r.matrix.data, ElementsAre(0, 1, 0,   //
                                         1, 0, 0,   //
                                         0, 1, 0,   //
                                         0, 0, 1)); // unseen "stuck"
  for (const FeatureOrigin& o : r.report.feature_map) EXPECT_EQ(o.source, "valve");

  const EncodeResult off = EncodeAndNormalize(t, train, {NormalizationMode::kStandard, false});
  EXPECT_EQ(off.report.encoded_feature_count(), 2);
  EXPECT_THAT(std::vector<double>(off.matrix.data.end() - 2, off.matrix.data.end()),
              ElementsAre(0, 0));
}

TEST(EncodeTest, SixtyNineFeatures) {
  // 25 continuous columns, 19 categorical columns with 44 categories.
  TimeSeriesTable t;
  const int rows = 12;
  for (int c = 0; c < 25; ++c) {
    std::vector<double> v(rows);
    for (int r = 0; r < rows; ++r) v[r] = std::sin(r + c);
    t.columns.push_back(Continuous("S" + std::to_string(c), v));
  }
  for (int c = 0; c < 19; ++c) {
    const int categories = c < 13 ? 2 : 3;
    std::vector<std::string> v(rows);
    for (int r = 0; r < rows; ++r) v[r] = "s" + std::to_string(r % categories);
    t.columns.push_back(Categorical("A" + std::to_string(c), v));
  }
  const auto train = Range(0, rows - 1);
  const EncodeResult r =
      EncodeAndNormalize(t, train, {NormalizationMode::kStandard, false});
  EXPECT_EQ(r.report.encoded_feature_count(), 69);
  EXPECT_EQ(MultiFeatureGrouping(10, r.report.feature_map, GroupLevel::kSource).size(), 44);
  EXPECT_EQ(EncodeAndNormalize(t, train).report.encoded_feature_count(), 69 + 19);
}

TEST(EncodeTest, DegenerateScale) {
  TimeSeriesTable t;
  t.columns = {Continuous("flat", {1, 1, 2})};
  const std::vector<std::int64_t> train = {0, 1};
  EXPECT_EQ(ErrorCodeOf([&] { EncodeAndNormalize(t, train); }),
            ErrorCode::kDegenerateScale);
  EXPECT_EQ(ErrorCodeOf([&] {
              EncodeAndNormalize(t, train, {NormalizationMode::kMinMax, true});
            }),
            ErrorCode::kDegenerateScale);
}

TEST(EncodeTest, ReapplyingReportIsBitExact) {
  TimeSeriesTable t;
  t.columns = {Continuous("x", {0.1, 0.7, 0.3, 0.9, 0.2}),
               Categorical("m", {"b", "a", "b", "c", "a"}),
               Continuous("y", {3, 1, 4, 1, 5})};
  const auto train = Range(0, 3);
  const EncodeResult r = EncodeAndNormalize(t, train);
  EXPECT_EQ(ApplyEncoding(t, r.report).data, r.matrix.data);
  TimeSeriesTable missing;
  missing.columns = {t.columns[0]};
  EXPECT_EQ(ErrorCodeOf([&] { ApplyEncoding(missing, r.report); }),
            ErrorCode::kUnknownColumn);
}

// MakeWindows

EncodedMatrix Ramp(std::size_t rows) {
  EncodedMatrix m;
  m.rows = rows;
  m.features = 1;
  for (std::size_t r = 0; r < rows; ++r) m.data.push_back(static_cast<double>(r));
  return m;
}

TEST(MakeWindowsTest, StrideOne) {
  const auto rows = Range(0, 11);
  const WindowSet w = MakeWindows(Ramp(12), rows, {}, 10, 1);
  EXPECT_THAT(w.origins, ElementsAre(9, 10, 11));
  EXPECT_EQ(w.Window(1).front(), 1.0);
  EXPECT_EQ(w.Window(1).back(), 10.0);
}

TEST(MakeWindowsTest, StrideThree) {
  const auto rows = Range(0, 11);
  EXPECT_THAT(MakeWindows(Ramp(12), rows, {}, 10, 3).origins, ElementsAre(9));
}

TEST(MakeWindowsTest, LabelFromLastInstant) {
  std::vector<int> labels(10, 0);
  labels[9] = 1;
  const auto rows = Range(0, 9);
  const WindowSet w = MakeWindows(Ramp(10), rows, labels, 10, 1);
  EXPECT_THAT(w.labels, ElementsAre(1));
  labels[9] = 0;
  labels[0] = 1;
  EXPECT_THAT(MakeWindows(Ramp(10), rows, labels, 10, 1).labels, ElementsAre(0));
}

TEST(MakeWindowsTest, RunsAreNeverBridged) {
  std::vector<std::int64_t> rows = Range(0, 5);
  for (auto r : Range(9, 12)) rows.push_back(r);  // gap 6..8
  for (auto r : Range(20, 21)) rows.push_back(r);  // too short
  const WindowSet w = MakeWindows(Ramp(30), rows, {}, 3, 1);
  EXPECT_THAT(w.origins, ElementsAre(2, 3, 4, 5, 11, 12));
}

TEST(MakeWindowsTest, CountFormula) {
  for (int length : {5, 17, 100}) {
    for (int window : {1, 3, 5}) {
      for (int stride : {1, 2, 7}) {
        const auto rows = Range(0, length - 1);
        const WindowSet w = MakeWindows(Ramp(length), rows, {}, window, stride);
        EXPECT_EQ(w.size(), static_cast<std::size_t>((length - window) / stride + 1));
      }
    }
  }
}

TEST(MakeWindowsTest, BadArguments) {
  const auto rows = Range(0, 3);
  EXPECT_EQ(ErrorCodeOf([&] { MakeWindows(Ramp(4), rows, {}, 0, 1); }),
            ErrorCode::kInvalidDimensions);
  EXPECT_EQ(ErrorCodeOf([&] { MakeWindows(Ramp(4), rows, {}, 2, 0); }),
            ErrorCode::kInvalidDimensions);
}

// SampleBackground

WindowSet LabelledSet(std::size_t n, std::size_t anomalous) {
  WindowSet set;
  set.shape = {1, 1};
  for (std::size_t i = 0; i < n; ++i) {
    set.data.push_back(static_cast<double>(i));
    set.labels.push_back(i < anomalous ? 1 : 0);
    set.origins.push_back(static_cast<std::int64_t>(i));
  }
  return set;
}

std::size_t CountAnomalous(const BackgroundSet& bg, std::size_t anomalous) {
  std::size_t count = 0;
  for (double x : bg.data) count += x < static_cast<double>(anomalous);
  return count;
}

TEST(SampleBackgroundTest, StratifiedRatio) {
  // 12.1% anomalous.
  const WindowSet train = LabelledSet(1000, 121);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BackgroundSet bg = SampleBackground(train, 500, true, seed);
    EXPECT_EQ(bg.size(), 500u);
    const std::size_t a = CountAnomalous(bg, 121);
    EXPECT_TRUE(a == 60 || a == 61) << a;
  }
}

TEST(SampleBackgroundTest, WholeSetWithoutStratification) {
  const WindowSet train = LabelledSet(40, 5);
  const BackgroundSet bg = SampleBackground(train, 40, false, 9);
  std::vector<double> sorted = bg.data;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, train.data);
  EXPECT_EQ(bg.source, BackgroundSource::kSampled);
}

TEST(SampleBackgroundTest, AllNormal) {
  const BackgroundSet bg = SampleBackground(LabelledSet(50, 0), 10, true, 1);
  EXPECT_EQ(bg.size(), 10u);
}

TEST(SampleBackgroundTest, DeterministicAndDistinct) {
  const WindowSet train = LabelledSet(300, 30);
  const BackgroundSet a = SampleBackground(train, 50, true, 4);
  EXPECT_EQ(a.data, SampleBackground(train, 50, true, 4).data);
  EXPECT_NE(a.data, SampleBackground(train, 50, true, 5).data);
  EXPECT_EQ(std::set<double>(a.data.begin(), a.data.end()).size(), 50u);
}

TEST(SampleBackgroundTest, InsufficientWindows) {
  EXPECT_EQ(ErrorCodeOf([] { SampleBackground(LabelledSet(5, 1), 6, true, 0); }),
            ErrorCode::kInsufficientWindows);
  EXPECT_EQ(ErrorCodeOf([] { SampleBackground(LabelledSet(5, 1), 0, true, 0); }),
            ErrorCode::kInsufficientWindows);
}

// Preprocess

TEST(PreprocessTest, WindowsNeverCrossBoundaries) {
  // Adversarial: a value ramp makes any cross-run window detectable.
  TimeSeriesTable t;
  const int rows = 2600;
  std::vector<double> ramp(rows);
  std::vector<std::string> mode(rows);
  std::vector<int> labels(rows);
  for (int r = 0; r < rows; ++r) {
    ramp[r] = r;
    mode[r] = r % 3 ? "on" : "off";
    labels[r] = (r / 37) % 2;
  }
  t.columns = {Continuous("ramp", ramp), Categorical("mode", mode)};
  t.labels = labels;
  PreprocessOptions options;
  options.window_size = 10;
  options.stride = 2;
  const PreprocessResult r = Preprocess(t, options);
  for (const auto* set : {&r.train, &r.val, &r.test}) {
    const std::vector<std::int64_t>& rows_of_split =
        set == &r.train ? r.split.train : set == &r.val ? r.split.val : r.split.test;
    const std::set<std::int64_t> allowed(rows_of_split.begin(), rows_of_split.end());
    for (std::size_t i = 0; i < set->size(); ++i) {
      const std::int64_t origin = set->origins[i];
      for (std::int64_t row = origin - 9; row <= origin; ++row) {
        EXPECT_TRUE(allowed.contains(row)) << "window ending at " << origin;
      }
      EXPECT_EQ(set->labels[i], labels[origin]);
      // Consecutive encoded ramp values inside each window.
      const auto w = set->Window(i);
      const int f = set->shape.features;
      EXPECT_NEAR(w[9 * f] - w[0], 9 * (w[f] - w[0]), 1e-9);
    }
  }
  // Per-run window counts: segments of 1000 give runs of 590/110/200.
  const auto per_run = [](int length) { return (length - 10) / 2 + 1; };
  // Tail segment of 600 rows: train 384-50, val 96-50, test 120.
  EXPECT_EQ(r.train.size(), static_cast<std::size_t>(2 * per_run(590) + per_run(334)));
  EXPECT_EQ(r.val.size(), static_cast<std::size_t>(2 * per_run(110) + per_run(46)));
  EXPECT_EQ(r.test.size(), static_cast<std::size_t>(2 * per_run(200) + per_run(120)));
  EXPECT_EQ(r.report.encoded_feature_count(), 4);
}

}  // namespace
}  // namespace shats
