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

#ifndef SHATS_TOOLS_CONFIG_H_
#define SHATS_TOOLS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shats/engine.h"
#include "shats/pipeline.h"
#include "shats/predictor.h"

namespace shats::cli {

// Everything one run needs. Loaded from JSON; every field has a flag twin
// and flags win. Relative paths in a config file resolve against the file's
// directory, relative paths on the command line against the working
// directory.
struct RunConfig {
  std::filesystem::path data;
  std::filesystem::path schema;
  SplitSpec split;
  int window_size = 10;
  int stride = 1;
  NormalizationMode normalization = NormalizationMode::kStandard;
  bool unseen_indicator = true;
  // Output of preprocess, input of explain.
  std::filesystem::path workdir = "shats_out";

  std::string grouping_strategy = "feature";  // temporal|feature|multifeature
  std::filesystem::path group_map;
  std::string grouping_level = "source";      // source|unit

  std::filesystem::path background_path;
  std::optional<std::size_t> background_sample;
  bool stratify = true;

  std::string predictor_builtin;
  PredictorParams predictor_params;
  std::vector<std::string> predictor_exec;
  int timeout_ms = 30000;

  std::string explain_split = "test";
  std::size_t explain_start = 0;
  std::optional<std::size_t> explain_count;

  ExplainMethod method = ExplainMethod::kApproximate;
  std::optional<std::int64_t> budget;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int exact_cap = 20;
  std::size_t max_batch = 1024;

  std::filesystem::path frames_path;
  std::filesystem::path ranking_path;
  std::filesystem::path heatmap_path;

  std::filesystem::path events_path;
  std::string convention = "absolute";
  int top_k = 1;

  double threshold = 0.5;
  std::optional<double> color_scale;
  int cell_size = 14;
  std::string heatmap_format;  // svg|csv; inferred from the extension if empty
};

// Throws shats::Error(kConfigError) on malformed documents.
RunConfig ConfigFromJson(std::string_view json_text,
                         const std::filesystem::path& base_dir);
RunConfig LoadConfig(const std::filesystem::path& path);

// Predictor sources and background sources are each mutually exclusive.
void CheckExclusiveSources(const RunConfig& config);

ExplainMethod ParseMethod(std::string_view text);
NormalizationMode ParseNormalization(std::string_view text);
// "{"c": 0.3, "weights": [1, 2]}" -> params.
PredictorParams ParsePredictorParams(std::string_view json_text);

}  // namespace shats::cli

#endif  // SHATS_TOOLS_CONFIG_H_
