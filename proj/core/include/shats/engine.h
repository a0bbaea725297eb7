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

#ifndef SHATS_ENGINE_H_
#define SHATS_ENGINE_H_

// Grouped Shapley attributions for windows of a time series. Each window is
// explained as a coalition game whose players are the groups of a Grouping
// and whose value function substitutes background windows for absent groups.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shats/grouping.h"
#include "shats/predictor.h"
#include "shats/window.h"

namespace shats {

enum class ExplainMethod { kExact, kApproximate };

std::string_view MethodName(ExplainMethod method);

struct ExplainConfig {
  ExplainMethod method = ExplainMethod::kApproximate;
  // Coalitions sampled per group; defaults to 20 * |G|. Approximate only.
  std::optional<std::int64_t> budget;
  std::uint64_t seed = 0;
  int exact_cap = 20;
  // Upper bound on the windows submitted in one PredictBatch call.
  std::size_t max_batch = 1024;
  // 0 uses every hardware thread.
  unsigned threads = 1;
};

struct ExplainRequest {
  WindowBatch windows;
  std::span<const std::int64_t> origins;
  const Grouping& grouping;
  const BackgroundSet& background;
  Predictor& predictor;
  ExplainConfig config;
};

struct AttributionFrame {
  std::int64_t origin = 0;
  // f(x*), identical to the grand-coalition value.
  double prediction = 0.0;
  // Empty-coalition value: mean prediction over the background.
  double baseline = 0.0;
  // One entry per group, in grouping order.
  std::vector<double> attributions;
  ExplainMethod method = ExplainMethod::kExact;
  std::optional<std::int64_t> budget;
  std::optional<std::uint64_t> seed;
};

// Budget the request resolves to (nullopt for the exact method).
std::optional<std::int64_t> ResolvedBudget(const ExplainRequest& request);

AttributionFrame ExplainWindow(const ExplainRequest& request, std::size_t index);

// Windows may run concurrently; output order matches input order. Per-window
// seeds are seed XOR origin. The first failing window aborts the batch.
std::vector<AttributionFrame> ExplainBatch(const ExplainRequest& request);

// Predictor invocations (individual windows predicted) that ExplainBatch
// would issue, measured by a dry run against a counting predictor.
std::uint64_t CountPredictorCalls(const ExplainRequest& request);

struct ExplainMeta {
  ExplainMethod method = ExplainMethod::kExact;
  std::optional<std::int64_t> budget;
  std::uint64_t seed = 0;
  std::size_t background_size = 0;
  std::optional<std::uint64_t> predictor_calls;
};

struct FramesDocument {
  std::vector<std::string> grouping;
  std::vector<AttributionFrame> frames;
  ExplainMeta meta;
};

// {"grouping": [...], "frames": [{"origin", "prediction", "baseline",
//  "attributions"}...], "meta": {"method", "budget", "seed", "K", ...}}
std::string FramesToJson(const FramesDocument& document);
FramesDocument FramesFromJson(std::string_view json_text);

}  // namespace shats

#endif  // SHATS_ENGINE_H_
