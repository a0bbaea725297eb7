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

#ifndef SHATS_HEATMAP_H_
#define SHATS_HEATMAP_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shats/engine.h"

namespace shats {

enum class HeatmapKind { kSvg, kCsv };

struct HeatmapSpec {
  std::span<const AttributionFrame> frames;
  std::vector<std::string> group_names;
  // Dashed line on the prediction axis.
  double threshold = 0.5;
  // Half-width a of the symmetric color range [-a, a]; max |phi| when unset.
  std::optional<double> color_scale;
  int cell_width = 14;
  int cell_height = 14;
  HeatmapKind kind = HeatmapKind::kSvg;
};

struct Rgb {
  int r = 255;
  int g = 255;
  int b = 255;
};

// Diverging scale: deep red at +a, white at 0, deep blue at -a, linear in
// each half and clamped beyond |a|.
Rgb DivergingColor(double value, double scale);

// Windows along x, groups along y, prediction polyline on a right-hand axis.
// Throws kEmptyFrames.
std::string RenderHeatmap(const HeatmapSpec& spec);

// Header row "group,<origins...>", one row per group and a final
// "prediction" row; values printed with 17 significant digits.
std::string RenderHeatmapCsv(const HeatmapSpec& spec);
std::string RenderHeatmapSvg(const HeatmapSpec& spec);

}  // namespace shats

#endif  // SHATS_HEATMAP_H_
