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

#include "shats/engine.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "shats/error.h"
#include "shats/game.h"
#include "shats/value_function.h"

namespace shats {

std::string_view MethodName(ExplainMethod method) {
  return method == ExplainMethod::kExact ? "exact" : "approximate";
}

namespace {

void CheckRequest(const ExplainRequest& request) {
  const WindowShape shape{request.grouping.window_size(),
                          request.grouping.feature_count()};
  if (!(request.windows.shape == shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                "windows are " + std::to_string(request.windows.shape.instants) +
                    "x" + std::to_string(request.windows.shape.features) +
                    " but the grouping covers " + std::to_string(shape.instants) +
                    "x" + std::to_string(shape.features));
  }
  if (request.origins.size() != request.windows.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(request.origins.size()) + " origins for " +
                    std::to_string(request.windows.size()) + " windows");
  }
  const int groups = request.grouping.size();
  if (request.config.method == ExplainMethod::kExact &&
      groups > request.config.exact_cap) {
    throw Error(ErrorCode::kExactMethodInfeasible,
                std::to_string(groups) + " groups exceed the exact cap of " +
                    std::to_string(request.config.exact_cap));
  }
  if (request.config.method == ExplainMethod::kApproximate) {
    const auto budget = ResolvedBudget(request);
    if (*budget < groups) {
      throw Error(ErrorCode::kInvalidBudget,
                  "budget " + std::to_string(*budget) + " is below |G| = " +
                      std::to_string(groups));
    }
  }
}

double Baseline(const ExplainRequest& request, Predictor& predictor) {
  if (request.windows.size() == 0) return 0.0;
  CoalitionValueContext context(request.windows.Window(0), request.background,
                                request.grouping, predictor,
                                request.config.max_batch);
  return context.Value(Coalition(request.grouping.size()));
}

AttributionFrame ExplainOne(const ExplainRequest& request, std::size_t index,
                            Predictor& predictor, double baseline) {
  const int groups = request.grouping.size();
  const std::int64_t origin = request.origins[index];
  CoalitionValueContext context(request.windows.Window(index),
                                request.background, request.grouping,
                                predictor, request.config.max_batch);
  context.Preload(Coalition(groups), baseline);
  const CoalitionGame game = context.AsGame();

  AttributionFrame frame;
  frame.origin = origin;
  frame.baseline = baseline;
  frame.method = request.config.method;
  ShapleyVector phi;
  if (request.config.method == ExplainMethod::kExact) {
    phi = ExactShapley(game, ExactOptions{request.config.exact_cap});
  } else {
    const std::int64_t budget = *ResolvedBudget(request);
    const std::uint64_t seed =
        request.config.seed ^ static_cast<std::uint64_t>(origin);
    phi = SampledShapley(game, AllocateStrata(budget, groups), seed);
    frame.budget = budget;
    frame.seed = seed;
  }
  // Every plan touches the grand coalition (stratum |G|-1 is never empty), so
  // this is a cache hit.
  frame.prediction = context.Value(Coalition::Grand(groups));
  frame.attributions = std::move(phi.values);
  return frame;
}

[[noreturn]] void RethrowWithOrigin(const std::exception_ptr& error,
                                    std::int64_t origin) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    throw Error(e.code(), "window origin " + std::to_string(origin) + ": " +
                              e.detail());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInternal,
                "window origin " + std::to_string(origin) + ": " + e.what());
  }
}

}  // namespace

std::optional<std::int64_t> ResolvedBudget(const ExplainRequest& request) {
  if (request.config.method == ExplainMethod::kExact) return std::nullopt;
  return request.config.budget.value_or(
      std::int64_t{20} * request.grouping.size());
}

AttributionFrame ExplainWindow(const ExplainRequest& request, std::size_t index) {
  CheckRequest(request);
  if (index >= request.windows.size()) {
    throw Error(ErrorCode::kShapeMismatch, "window index out of range");
  }
  try {
    const double baseline = Baseline(request, request.predictor);
    return ExplainOne(request, index, request.predictor, baseline);
  } catch (...) {
    RethrowWithOrigin(std::current_exception(), request.origins[index]);
  }
}

std::vector<AttributionFrame> ExplainBatch(const ExplainRequest& request) {
  CheckRequest(request);
  const std::size_t n = request.windows.size();
  std::vector<AttributionFrame> frames(n);
  if (n == 0) return frames;

  unsigned threads = request.config.threads == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : request.config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  std::unique_ptr<SerializedPredictor> serialized;
  Predictor* predictor = &request.predictor;
  if (threads > 1 && request.predictor.serial()) {
    serialized = std::make_unique<SerializedPredictor>(request.predictor);
    predictor = serialized.get();
  }

  double baseline = 0.0;
  try {
    baseline = Baseline(request, *predictor);
  } catch (...) {
    RethrowWithOrigin(std::current_exception(), request.origins[0]);
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        frames[i] = ExplainOne(request, i, *predictor, baseline);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) RethrowWithOrigin(errors[i], request.origins[i]);
  }
  return frames;
}

std::uint64_t CountPredictorCalls(const ExplainRequest& request) {
  CountingPredictor counter;
  ExplainRequest dry{request.windows,    request.origins, request.grouping,
                     request.background, counter,         request.config};
  ExplainBatch(dry);
  return counter.windows();
}

// ---------------------------------------------------------------------------
// Frames file

std::string FramesToJson(const FramesDocument& document) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["grouping"] = document.grouping;
  doc["frames"] = ordered_json::array();
  for (const AttributionFrame& frame : document.frames) {
    ordered_json entry;
    entry["origin"] = frame.origin;
    entry["prediction"] = frame.prediction;
    entry["baseline"] = frame.baseline;
    entry["attributions"] = frame.attributions;
    if (frame.seed) entry["seed"] = *frame.seed;
    doc["frames"].push_back(std::move(entry));
  }
  ordered_json meta;
  meta["method"] = std::string(MethodName(document.meta.method));
  meta["budget"] = document.meta.budget ? ordered_json(*document.meta.budget)
                                        : ordered_json(nullptr);
  meta["seed"] = document.meta.seed;
  meta["K"] = document.meta.background_size;
  if (document.meta.predictor_calls) {
    meta["predictor_calls"] = *document.meta.predictor_calls;
  }
  doc["meta"] = std::move(meta);
  return doc.dump(1) + "\n";
}

FramesDocument FramesFromJson(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("frames file is not valid JSON: ") + e.what());
  }
  FramesDocument document;
  try {
    document.grouping = doc.at("grouping").get<std::vector<std::string>>();
    const json& meta = doc.at("meta");
    const std::string method = meta.at("method").get<std::string>();
    document.meta.method =
        method == "exact" ? ExplainMethod::kExact : ExplainMethod::kApproximate;
    if (!meta.at("budget").is_null()) {
      document.meta.budget = meta.at("budget").get<std::int64_t>();
    }
    document.meta.seed = meta.at("seed").get<std::uint64_t>();
    document.meta.background_size = meta.at("K").get<std::size_t>();
    if (meta.contains("predictor_calls")) {
      document.meta.predictor_calls = meta["predictor_calls"].get<std::uint64_t>();
    }
    for (const json& entry : doc.at("frames")) {
      AttributionFrame frame;
      frame.origin = entry.at("origin").get<std::int64_t>();
      frame.prediction = entry.at("prediction").get<double>();
      frame.baseline = entry.at("baseline").get<double>();
      frame.attributions = entry.at("attributions").get<std::vector<double>>();
      frame.method = document.meta.method;
      frame.budget = document.meta.budget;
      if (entry.contains("seed")) frame.seed = entry["seed"].get<std::uint64_t>();
      if (frame.attributions.size() != document.grouping.size()) {
        throw Error(ErrorCode::kParseError,
                    "frame at origin " + std::to_string(frame.origin) +
                        " has the wrong number of attributions");
      }
      document.frames.push_back(std::move(frame));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("malformed frames file: ") + e.what());
  }
  return document;
}

}  // namespace shats
