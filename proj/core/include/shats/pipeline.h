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

#ifndef SHATS_PIPELINE_H_
#define SHATS_PIPELINE_H_

// Raw table -> model-ready windows: segment splitting with anti-leakage
// padding, zero-variance pruning, encoding and normalization fitted on
// training rows only, and sliding windows that never cross a split or gap.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shats/grouping.h"
#include "shats/table.h"
#include "shats/window.h"

namespace shats {

struct SplitSpec {
  std::int64_t segment_length = 1000;
  double train_fraction = 0.64;
  double val_fraction = 0.16;
  std::int64_t padding = 50;

  // Throws kInvalidSplit or kSegmentTooShort.
  void Validate() const;
};

// Sorted row indices of each subset.
struct RowSplit {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> val;
  std::vector<std::int64_t> test;
};

// Each segment of segment_length rows is cut into train | val | test runs.
// Run lengths are floor(fraction * L) for train and val; test takes the rest.
// The last `padding` rows of the train and val runs are discarded. A trailing
// partial segment follows the same rule, or goes wholly to training when it
// cannot hold three non-empty runs.
RowSplit SplitWithPadding(std::size_t row_count, const SplitSpec& spec);

struct PruneResult {
  TimeSeriesTable table;
  std::vector<std::string> dropped;
};

// Drops columns whose training rows all hold the same value.
PruneResult PruneZeroVariance(const TimeSeriesTable& table,
                              std::span<const std::int64_t> train_rows);

enum class NormalizationMode { kStandard, kMinMax };

std::string_view NormalizationName(NormalizationMode mode);

// standard: (x - mean) / std with the population std.
// minmax:   (x - min) / (max - min).
struct ContinuousEncoding {
  std::string name;
  double center = 0.0;  // mean or min
  double scale = 1.0;   // std or max - min
};

struct CategoricalEncoding {
  std::string name;
  // Categories observed on training rows, sorted.
  std::vector<std::string> categories;
};

struct EncodingReport {
  NormalizationMode mode = NormalizationMode::kStandard;
  // One extra indicator per categorical column catching categories never
  // seen in training.
  bool unseen_indicator = true;
  std::vector<std::string> dropped_columns;
  // Feature columns in table order; each names an entry below.
  std::vector<std::string> column_order;
  std::vector<ContinuousEncoding> continuous;
  std::vector<CategoricalEncoding> categorical;
  std::vector<std::string> feature_names;
  FeatureMap feature_map;

  int encoded_feature_count() const {
    return static_cast<int>(feature_map.size());
  }
};

// Row-major T x F' matrix.
struct EncodedMatrix {
  std::size_t rows = 0;
  int features = 0;
  std::vector<double> data;

  double At(std::size_t row, int feature) const {
    return data[row * static_cast<std::size_t>(features) + feature];
  }
};

struct EncodeOptions {
  NormalizationMode mode = NormalizationMode::kStandard;
  bool unseen_indicator = true;
};

struct EncodeResult {
  EncodedMatrix matrix;
  EncodingReport report;
};

// Fits the encoding on `train_rows` and applies it to every row.
// Throws kDegenerateScale for a continuous column that is constant on the
// training rows (it should have been pruned).
EncodeResult EncodeAndNormalize(const TimeSeriesTable& table,
                                std::span<const std::int64_t> train_rows,
                                const EncodeOptions& options = {});

// Re-applies a fitted encoding to a table with the report's columns.
EncodedMatrix ApplyEncoding(const TimeSeriesTable& table,
                            const EncodingReport& report);

// Windows over the maximal contiguous runs of `rows` (sorted). Each window is
// labelled by its last instant; runs shorter than window_size yield nothing.
// `labels` may be empty, in which case every label is 0.
WindowSet MakeWindows(const EncodedMatrix& matrix,
                      std::span<const std::int64_t> rows,
                      std::span<const int> labels, int window_size, int stride);

// K windows drawn without replacement, kept in their original order. With
// stratify, the anomalous count is round(K * anomalous fraction).
BackgroundSet SampleBackground(const WindowSet& train, std::size_t k,
                               bool stratify, std::uint64_t seed);

struct PreprocessOptions {
  SplitSpec split;
  int window_size = 10;
  int stride = 1;
  EncodeOptions encode;
};

struct PreprocessResult {
  std::size_t rows = 0;
  RowSplit split;
  EncodingReport report;
  WindowSet train;
  WindowSet val;
  WindowSet test;
};

// split -> prune -> encode -> window.
PreprocessResult Preprocess(const TimeSeriesTable& table,
                            const PreprocessOptions& options);

}  // namespace shats

#endif  // SHATS_PIPELINE_H_
