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

#include "shats/value_function.h"

#include <algorithm>
#include <bit>
#include <exception>
#include <string>
#include <vector>

#include "shats/error.h"
#include "shats/numeric.h"

namespace shats {

namespace {

// out_k[c] = select[c] ? explicand[c] : background_k[c], bit for bit.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
void BlendWindows(const double* explicand, const double* background,
                  const std::uint64_t* select, double* out, std::size_t cells,
                  std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    const double* bg = background + k * cells;
    double* row = out + k * cells;
    for (std::size_t c = 0; c < cells; ++c) {
      const std::uint64_t e = std::bit_cast<std::uint64_t>(explicand[c]);
      const std::uint64_t b = std::bit_cast<std::uint64_t>(bg[c]);
      row[c] = std::bit_cast<double>((e & select[c]) | (b & ~select[c]));
    }
  }
}

}  // namespace

CoalitionValueContext::CoalitionValueContext(std::span<const double> explicand,
                                             const BackgroundSet& background,
                                             const Grouping& grouping,
                                             Predictor& predictor,
                                             std::size_t max_batch)
    : explicand_(explicand),
      background_(background),
      grouping_(grouping),
      predictor_(predictor),
      max_batch_(std::max<std::size_t>(1, max_batch)) {
  const WindowShape shape{grouping.window_size(), grouping.feature_count()};
  if (explicand.size() != shape.cells()) {
    throw Error(ErrorCode::kShapeMismatch,
                "explicand has " + std::to_string(explicand.size()) +
                    " cells, grouping expects " + std::to_string(shape.cells()));
  }
  if (!(background.shape == shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                "background windows are " +
                    std::to_string(background.shape.instants) + "x" +
                    std::to_string(background.shape.features) +
                    ", grouping expects " + std::to_string(shape.instants) +
                    "x" + std::to_string(shape.features));
  }
  if (background.size() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "background set is empty");
  }
  buffer_.resize(std::min(background.size(), max_batch_) * shape.cells());
  select_.resize(shape.cells());
  group_cells_.resize(static_cast<std::size_t>(grouping.size()));
  for (int g = 0; g < grouping.size(); ++g) {
    for (const Cell& cell : grouping.groups()[g].cells) {
      group_cells_[g].push_back(static_cast<std::size_t>(cell.instant) *
                                    shape.features + cell.feature);
    }
    std::sort(group_cells_[g].begin(), group_cells_[g].end());
  }
}

double CoalitionValueContext::Value(const Coalition& coalition) {
  if (coalition.player_count() != grouping_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "coalition over " + std::to_string(coalition.player_count()) +
                    " players for a grouping of " +
                    std::to_string(grouping_.size()) + " groups");
  }
  const auto it = cache_.find(coalition);
  if (it != cache_.end()) return it->second;
  const double value = Evaluate(coalition);
  cache_.emplace(coalition, value);
  return value;
}

void CoalitionValueContext::Preload(const Coalition& coalition, double value) {
  cache_.emplace(coalition, value);
}

CoalitionGame CoalitionValueContext::AsGame() {
  return CoalitionGame{grouping_.size(),
                       [this](const Coalition& c) { return Value(c); }};
}

void CoalitionValueContext::Assemble(const std::vector<std::uint8_t>& member,
                                     std::size_t start, std::size_t count) {
  const std::size_t cells = explicand_.size();
  const double* explicand = explicand_.data();
  // A single chunk stays in the buffer between calls; only groups whose
  // membership changed are rewritten.
  if (start == 0 && count == background_.size() && assembled_ == member) {
    return;
  }
  std::size_t changed = 0;
  if (!assembled_.empty()) {
    for (std::size_t g = 0; g < member.size(); ++g) {
      if (member[g] != assembled_[g]) changed += group_cells_[g].size();
    }
  }
  // Scattered rewrites only pay off for a small share of the window.
  if (start == 0 && count == background_.size() && !assembled_.empty() &&
      2 * changed <= cells) {
    for (std::size_t g = 0; g < member.size(); ++g) {
      if (member[g] == assembled_[g]) continue;
      const std::vector<std::size_t>& indices = group_cells_[g];
      for (std::size_t k = 0; k < count; ++k) {
        const double* source =
            member[g] ? explicand : background_.data.data() + k * cells;
        double* out = buffer_.data() + k * cells;
        for (std::size_t c : indices) out[c] = source[c];
      }
    }
    assembled_ = member;
    return;
  }

  const std::vector<int>& cell_group = grouping_.cell_group();
  for (std::size_t c = 0; c < cells; ++c) {
    select_[c] = member[cell_group[c]] ? ~std::uint64_t{0} : 0;
  }
  BlendWindows(explicand, background_.data.data() + start * cells, select_.data(),
               buffer_.data(), cells, count);
  if (count == background_.size()) {
    assembled_ = member;
  } else {
    assembled_.clear();
  }
}

double CoalitionValueContext::Evaluate(const Coalition& coalition) {
  ++evaluated_;
  std::vector<std::uint8_t> member(static_cast<std::size_t>(grouping_.size()));
  for (int g = 0; g < grouping_.size(); ++g) member[g] = coalition.Contains(g);

  const std::size_t k_total = background_.size();
  const WindowShape shape = background_.shape;
  CompensatedSum total;
  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < k_total; start += max_batch_, ++batch_index) {
    const std::size_t count = std::min(max_batch_, k_total - start);
    Assemble(member, start, count);
    const WindowBatch batch{
        shape, std::span<const double>(buffer_.data(), count * shape.cells())};
    std::vector<double> outputs;
    try {
      outputs = predictor_.PredictBatch(batch);
    } catch (const Error& e) {
      throw Error(e.code(), "batch " + std::to_string(batch_index) + ": " +
                                e.detail());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kPredictorFailure,
                  "batch " + std::to_string(batch_index) + ": " + e.what());
    }
    ValidatePredictions(predictor_, outputs, count, batch_index);
    for (double y : outputs) total.Add(y);
  }
  return total.Total() / static_cast<double>(k_total);
}

}  // namespace shats
