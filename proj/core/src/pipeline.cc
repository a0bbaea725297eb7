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
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shats/error.h"
#include "shats/numeric.h"

namespace shats {

// ---------------------------------------------------------------------------
// Splitting

namespace {

// floor(fraction * length), tolerant of products such as 0.29 * 100 landing
// a hair below an integer.
std::int64_t FractionOf(double fraction, std::int64_t length) {
  return static_cast<std::int64_t>(
      std::floor(fraction * static_cast<double>(length) + 1e-9));
}

struct SegmentRuns {
  std::int64_t train;
  std::int64_t val;
  std::int64_t test;
  bool fits;
};

SegmentRuns RunsFor(const SplitSpec& spec, std::int64_t length) {
  SegmentRuns runs{};
  runs.train = FractionOf(spec.train_fraction, length);
  runs.val = FractionOf(spec.val_fraction, length);
  runs.test = length - runs.train - runs.val;
  runs.fits = length >= 2 * spec.padding + 3 && runs.train - spec.padding >= 1 &&
              runs.val - spec.padding >= 1 && runs.test >= 1;
  return runs;
}

void AppendRange(std::vector<std::int64_t>& out, std::int64_t begin,
                 std::int64_t end) {
  for (std::int64_t r = begin; r < end; ++r) out.push_back(r);
}

}  // namespace

void SplitSpec::Validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0) ||
      !(val_fraction > 0.0 && val_fraction < 1.0) ||
      !(train_fraction + val_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidSplit,
                "fractions must lie in (0, 1) and leave room for a test run");
  }
  if (padding < 0) {
    throw Error(ErrorCode::kInvalidSplit, "padding must be non-negative");
  }
  if (segment_length < 1 || segment_length <= 2 * padding + 3) {
    throw Error(ErrorCode::kSegmentTooShort,
                "segment length " + std::to_string(segment_length) +
                    " must exceed 2 * padding + 3 = " +
                    std::to_string(2 * padding + 3));
  }
  if (!RunsFor(*this, segment_length).fits) {
    throw Error(ErrorCode::kSegmentTooShort,
                "a segment of " + std::to_string(segment_length) +
                    " rows cannot hold non-empty train/val/test runs with " +
                    std::to_string(padding) + " rows of padding");
  }
}

RowSplit SplitWithPadding(std::size_t row_count, const SplitSpec& spec) {
  spec.Validate();
  RowSplit split;
  const auto total = static_cast<std::int64_t>(row_count);
  for (std::int64_t start = 0; start < total; start += spec.segment_length) {
    const std::int64_t length = std::min(spec.segment_length, total - start);
    const SegmentRuns runs = RunsFor(spec, length);
    if (!runs.fits) {
      AppendRange(split.train, start, start + length);
      continue;
    }
    const std::int64_t val_start = start + runs.train;
    const std::int64_t test_start = val_start + runs.val;
    AppendRange(split.train, start, val_start - spec.padding);
    AppendRange(split.val, val_start, test_start - spec.padding);
    AppendRange(split.test, test_start, start + length);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Pruning

PruneResult PruneZeroVariance(const TimeSeriesTable& table,
                              std::span<const std::int64_t> train_rows) {
  if (train_rows.empty()) {
    throw Error(ErrorCode::kInsufficientWindows, "no training rows to inspect");
  }
  PruneResult result;
  result.table.labels = table.labels;
  result.table.timestamps = table.timestamps;
  for (const Column& column : table.columns) {
    bool constant = true;
    const auto first = train_rows.front();
    for (std::int64_t r : train_rows) {
      if (column.kind == ColumnKind::kContinuous
              ? column.values[r] != column.values[first]
              : column.text[r] != column.text[first]) {
        constant = false;
        break;
      }
    }
    if (constant) {
      result.dropped.push_back(column.name);
    } else {
      result.table.columns.push_back(column);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Encoding

std::string_view NormalizationName(NormalizationMode mode) {
  return mode == NormalizationMode::kStandard ? "standard" : "minmax";
}

EncodeResult EncodeAndNormalize(const TimeSeriesTable& table,
                                std::span<const std::int64_t> train_rows,
                                const EncodeOptions& options) {
  if (train_rows.empty()) {
    throw Error(ErrorCode::kInsufficientWindows, "no training rows to fit on");
  }
  EncodeResult result;
  EncodingReport& report = result.report;
  report.mode = options.mode;
  report.unseen_indicator = options.unseen_indicator;
  for (const Column& column : table.columns) {
    report.column_order.push_back(column.name);
    if (column.kind == ColumnKind::kContinuous) {
      ContinuousEncoding enc{column.name, 0.0, 1.0};
      if (options.mode == NormalizationMode::kStandard) {
        CompensatedSum sum;
        for (std::int64_t r : train_rows) sum.Add(column.values[r]);
        const double mean = sum.Total() / static_cast<double>(train_rows.size());
        CompensatedSum squares;
        for (std::int64_t r : train_rows) {
          const double d = column.values[r] - mean;
          squares.Add(d * d);
        }
        enc.center = mean;
        enc.scale =
            std::sqrt(squares.Total() / static_cast<double>(train_rows.size()));
      } else {
        double lo = column.values[train_rows.front()];
        double hi = lo;
        for (std::int64_t r : train_rows) {
          lo = std::min(lo, column.values[r]);
          hi = std::max(hi, column.values[r]);
        }
        enc.center = lo;
        enc.scale = hi - lo;
      }
      if (!(enc.scale > 0.0)) {
        throw Error(ErrorCode::kDegenerateScale,
                    "column '" + column.name +
                        "' has no spread on the training rows");
      }
      report.continuous.push_back(enc);
      report.feature_names.push_back(column.name);
      report.feature_map.push_back({column.name, column.name});
    } else {
      CategoricalEncoding enc{column.name, {}};
      for (std::int64_t r : train_rows) enc.categories.push_back(column.text[r]);
      std::sort(enc.categories.begin(), enc.categories.end());
      enc.categories.erase(
          std::unique(enc.categories.begin(), enc.categories.end()),
          enc.categories.end());
      for (const std::string& category : enc.categories) {
        report.feature_names.push_back(column.name + "=" + category);
        report.feature_map.push_back({column.name, column.name});
      }
      if (options.unseen_indicator) {
        report.feature_names.push_back(column.name + "=<unseen>");
        report.feature_map.push_back({column.name, column.name});
      }
      report.categorical.push_back(std::move(enc));
    }
  }
  result.matrix = ApplyEncoding(table, report);
  return result;
}

EncodedMatrix ApplyEncoding(const TimeSeriesTable& table,
                            const EncodingReport& report) {
  EncodedMatrix matrix;
  matrix.rows = table.rows();
  matrix.features = report.encoded_feature_count();
  matrix.data.assign(matrix.rows * static_cast<std::size_t>(matrix.features), 0.0);

  std::size_t next_continuous = 0;
  std::size_t next_categorical = 0;
  int offset = 0;
  for (const std::string& name : report.column_order) {
    const Column* column = table.Find(name);
    if (column == nullptr) {
      throw Error(ErrorCode::kUnknownColumn,
                  "encoded column '" + name + "' is missing from the table");
    }
    const bool continuous = next_continuous < report.continuous.size() &&
                            report.continuous[next_continuous].name == name;
    if (continuous) {
      if (column->kind != ColumnKind::kContinuous) {
        throw Error(ErrorCode::kParseError,
                    "column '" + name + "' was fitted as continuous");
      }
      const ContinuousEncoding& enc = report.continuous[next_continuous++];
      for (std::size_t r = 0; r < matrix.rows; ++r) {
        matrix.data[r * matrix.features + offset] =
            (column->values[r] - enc.center) / enc.scale;
      }
      ++offset;
      continue;
    }
    if (next_categorical >= report.categorical.size() ||
        report.categorical[next_categorical].name != name ||
        column->kind != ColumnKind::kCategorical) {
      throw Error(ErrorCode::kParseError,
                  "column '" + name + "' does not match the fitted encoding");
    }
    const CategoricalEncoding& enc = report.categorical[next_categorical++];
    const int width = static_cast<int>(enc.categories.size()) +
                      (report.unseen_indicator ? 1 : 0);
    for (std::size_t r = 0; r < matrix.rows; ++r) {
      const auto it = std::lower_bound(enc.categories.begin(),
                                       enc.categories.end(), column->text[r]);
      double* row = matrix.data.data() + r * matrix.features + offset;
      if (it != enc.categories.end() && *it == column->text[r]) {
        row[it - enc.categories.begin()] = 1.0;
      } else if (report.unseen_indicator) {
        row[enc.categories.size()] = 1.0;
      }
    }
    offset += width;
  }
  if (offset != matrix.features) {
    throw Error(ErrorCode::kInternal, "encoding report is inconsistent");
  }
  return matrix;
}

// ---------------------------------------------------------------------------
// Windowing

WindowSet MakeWindows(const EncodedMatrix& matrix,
                      std::span<const std::int64_t> rows,
                      std::span<const int> labels, int window_size,
                      int stride) {
  if (window_size < 1 || stride < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "window size and stride must be positive");
  }
  if (!labels.empty() && labels.size() != matrix.rows) {
    throw Error(ErrorCode::kShapeMismatch, "labels do not cover every row");
  }
  WindowSet set;
  set.shape = {window_size, matrix.features};
  set.stride = stride;
  const std::size_t row_width = static_cast<std::size_t>(matrix.features);

  std::size_t run_begin = 0;
  while (run_begin < rows.size()) {
    std::size_t run_end = run_begin + 1;
    while (run_end < rows.size() && rows[run_end] == rows[run_end - 1] + 1) {
      ++run_end;
    }
    if (run_end < rows.size() && rows[run_end] < rows[run_end - 1]) {
      throw Error(ErrorCode::kInternal, "row set is not sorted");
    }
    const std::int64_t first = rows[run_begin];
    const std::int64_t last = rows[run_end - 1];
    if (first < 0 || last >= static_cast<std::int64_t>(matrix.rows)) {
      throw Error(ErrorCode::kShapeMismatch, "row index outside the matrix");
    }
    for (std::int64_t origin = first + window_size - 1; origin <= last;
         origin += stride) {
      const std::int64_t start = origin - window_size + 1;
      const double* src = matrix.data.data() + start * row_width;
      set.data.insert(set.data.end(), src, src + window_size * row_width);
      set.labels.push_back(labels.empty() ? 0 : labels[origin]);
      set.origins.push_back(origin);
    }
    run_begin = run_end;
  }
  return set;
}

namespace {

// `count` elements of `pool` without replacement, returned sorted.
std::vector<std::size_t> Choose(std::vector<std::size_t> pool, std::size_t count,
                                std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + UniformBelow(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

BackgroundSet SampleBackground(const WindowSet& train, std::size_t k,
                               bool stratify, std::uint64_t seed) {
  const std::size_t n = train.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInsufficientWindows,
                "cannot draw " + std::to_string(k) + " background windows from " +
                    std::to_string(n));
  }
  std::mt19937_64 rng(DeriveSeed(seed, 0x6261636b67726f75ULL));
  std::vector<std::size_t> chosen;
  if (!stratify) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    chosen = Choose(std::move(pool), k, rng);
  } else {
    std::vector<std::size_t> anomalous;
    std::vector<std::size_t> normal;
    for (std::size_t i = 0; i < n; ++i) {
      (train.labels[i] ? anomalous : normal).push_back(i);
    }
    // round(k * a / n) in integer arithmetic.
    std::size_t want = (2 * k * anomalous.size() + n) / (2 * n);
    want = std::min(want, anomalous.size());
    if (k - want > normal.size()) want = k - normal.size();
    std::vector<std::size_t> a = Choose(anomalous, want, rng);
    std::vector<std::size_t> b = Choose(normal, k - want, rng);
    chosen.resize(k);
    std::merge(a.begin(), a.end(), b.begin(), b.end(), chosen.begin());
  }
  BackgroundSet background;
  background.shape = train.shape;
  background.source = BackgroundSource::kSampled;
  background.data.reserve(k * train.shape.cells());
  for (std::size_t i : chosen) {
    const auto window = train.Window(i);
    background.data.insert(background.data.end(), window.begin(), window.end());
  }
  return background;
}

// ---------------------------------------------------------------------------

PreprocessResult Preprocess(const TimeSeriesTable& table,
                            const PreprocessOptions& options) {
  PreprocessResult result;
  result.rows = table.rows();
  result.split = SplitWithPadding(result.rows, options.split);
  PruneResult pruned = PruneZeroVariance(table, result.split.train);
  if (pruned.table.columns.empty()) {
    throw Error(ErrorCode::kDegenerateScale,
                "every feature column is constant on the training rows");
  }
  EncodeResult encoded =
      EncodeAndNormalize(pruned.table, result.split.train, options.encode);
  result.report = std::move(encoded.report);
  result.report.dropped_columns = pruned.dropped;

  std::span<const int> labels;
  if (table.labels) labels = *table.labels;
  result.train = MakeWindows(encoded.matrix, result.split.train, labels,
                             options.window_size, options.stride);
  result.val = MakeWindows(encoded.matrix, result.split.val, labels,
                           options.window_size, options.stride);
  result.test = MakeWindows(encoded.matrix, result.split.test, labels,
                            options.window_size, options.stride);
  return result;
}

}  // namespace shats
