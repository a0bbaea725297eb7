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

#include "shats/heatmap.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "shats/error.h"

namespace shats {

namespace {

constexpr Rgb kDeepRed{178, 24, 43};
constexpr Rgb kDeepBlue{33, 102, 172};
// Cells below this fraction of the scale stay unfilled.
constexpr double kBlankFraction = 0.005;

std::string Number17(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string Coord(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.2f", x);
  return buffer;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CheckSpec(const HeatmapSpec& spec) {
  if (spec.frames.empty()) {
    throw Error(ErrorCode::kEmptyFrames, "heatmap needs at least one frame");
  }
  for (const AttributionFrame& frame : spec.frames) {
    if (frame.attributions.size() != spec.group_names.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "frame at origin " + std::to_string(frame.origin) + " has " +
                      std::to_string(frame.attributions.size()) +
                      " attributions for " +
                      std::to_string(spec.group_names.size()) + " groups");
    }
  }
  if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "threshold must lie in [0, 1]");
  }
  if (spec.color_scale && !(*spec.color_scale > 0.0)) {
    throw Error(ErrorCode::kConfigError, "color scale must be positive");
  }
  if (spec.cell_width < 1 || spec.cell_height < 1) {
    throw Error(ErrorCode::kConfigError, "cell size must be positive");
  }
}

std::string Hex(const Rgb& c) {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", c.r, c.g, c.b);
  return buffer;
}

}  // namespace

Rgb DivergingColor(double value, double scale) {
  const double t = std::min(std::fabs(value) / scale, 1.0);
  const Rgb& end = value >= 0.0 ? kDeepRed : kDeepBlue;
  auto mix = [t](int target) {
    return static_cast<int>(std::lround(255.0 + t * (target - 255.0)));
  };
  return Rgb{mix(end.r), mix(end.g), mix(end.b)};
}

std::string RenderHeatmapCsv(const HeatmapSpec& spec) {
  CheckSpec(spec);
  std::string out = "group";
  for (const AttributionFrame& frame : spec.frames) {
    out += ',';
    out += std::to_string(frame.origin);
  }
  out += '\n';
  for (std::size_t g = 0; g < spec.group_names.size(); ++g) {
    out += CsvField(spec.group_names[g]);
    for (const AttributionFrame& frame : spec.frames) {
      out += ',';
      out += Number17(frame.attributions[g]);
    }
    out += '\n';
  }
  out += "prediction";
  for (const AttributionFrame& frame : spec.frames) {
    out += ',';
    out += Number17(frame.prediction);
  }
  out += '\n';
  return out;
}

std::string RenderHeatmapSvg(const HeatmapSpec& spec) {
  CheckSpec(spec);
  const std::size_t windows = spec.frames.size();
  const std::size_t groups = spec.group_names.size();

  double scale = 0.0;
  if (spec.color_scale) {
    scale = *spec.color_scale;
  } else {
    for (const AttributionFrame& frame : spec.frames) {
      for (double phi : frame.attributions) scale = std::max(scale, std::fabs(phi));
    }
    if (scale == 0.0) scale = 1.0;
  }

  std::size_t longest = 4;
  for (const std::string& name : spec.group_names) {
    longest = std::max(longest, name.size());
  }
  const double left = 12.0 + 7.0 * static_cast<double>(longest);
  const double top = 16.0;
  const double plot_w = static_cast<double>(windows * spec.cell_width);
  const double plot_h = static_cast<double>(groups * spec.cell_height);
  const double right = 48.0;
  const double bottom = 36.0;
  const double width = left + plot_w + right;
  const double height = top + plot_h + bottom;

  double lo = 0.0;
  double hi = 1.0;
  for (const AttributionFrame& frame : spec.frames) {
    lo = std::min(lo, frame.prediction);
    hi = std::max(hi, frame.prediction);
  }
  auto y_of = [&](double p) { return top + plot_h * (hi - p) / (hi - lo); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         Coord(width) + "\" height=\"" + Coord(height) + "\" viewBox=\"0 0 " +
         Coord(width) + " " + Coord(height) + "\">\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"10\">\n";

  for (std::size_t g = 0; g < groups; ++g) {
    const double y = top + static_cast<double>(g * spec.cell_height);
    svg += "<text class=\"group-label\" x=\"" + Coord(left - 4) + "\" y=\"" +
           Coord(y + spec.cell_height * 0.75) + "\" text-anchor=\"end\">" +
           XmlEscape(spec.group_names[g]) + "</text>\n";
    for (std::size_t i = 0; i < windows; ++i) {
      const double phi = spec.frames[i].attributions[g];
      const double x = left + static_cast<double>(i * spec.cell_width);
      svg += "<rect x=\"" + Coord(x) + "\" y=\"" + Coord(y) + "\" width=\"" +
             std::to_string(spec.cell_width) + "\" height=\"" +
             std::to_string(spec.cell_height) + "\"";
      if (std::fabs(phi) < kBlankFraction * scale) {
        svg += " class=\"cell empty\" fill=\"none\"";
      } else {
        svg += " class=\"cell\" fill=\"" + Hex(DivergingColor(phi, scale)) + "\"";
      }
      svg += "><title>" + XmlEscape(spec.group_names[g]) + " @ " +
             std::to_string(spec.frames[i].origin) + ": " + Number17(phi) +
             "</title></rect>\n";
    }
  }

  // Window origins along the bottom, thinned to roughly 50 px apart.
  const std::size_t every =
      std::max<std::size_t>(1, 50 / static_cast<std::size_t>(spec.cell_width));
  for (std::size_t i = 0; i < windows; i += every) {
    const double x = left + (static_cast<double>(i) + 0.5) * spec.cell_width;
    svg += "<text class=\"window-label\" x=\"" + Coord(x) + "\" y=\"" +
           Coord(top + plot_h + 14) + "\" text-anchor=\"middle\">" +
           std::to_string(spec.frames[i].origin) + "</text>\n";
  }

  // Prediction axis on the right.
  const double axis_x = left + plot_w + 6;
  svg += "<line class=\"axis\" x1=\"" + Coord(axis_x) + "\" y1=\"" + Coord(top) +
         "\" x2=\"" + Coord(axis_x) + "\" y2=\"" + Coord(top + plot_h) +
         "\" stroke=\"#555555\"/>\n";
  for (double tick : {lo, hi}) {
    svg += "<text class=\"axis-label\" x=\"" + Coord(axis_x + 4) + "\" y=\"" +
           Coord(y_of(tick) + 3) + "\">" + Number17(tick) + "</text>\n";
  }
  svg += "<line class=\"threshold\" x1=\"" + Coord(left) + "\" y1=\"" +
         Coord(y_of(spec.threshold)) + "\" x2=\"" + Coord(left + plot_w) +
         "\" y2=\"" + Coord(y_of(spec.threshold)) +
         "\" stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";

  svg += "<polyline class=\"prediction\" fill=\"none\" stroke=\"#7b2cbf\" "
         "stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < windows; ++i) {
    if (i) svg += ' ';
    const double x = left + (static_cast<double>(i) + 0.5) * spec.cell_width;
    svg += Coord(x) + "," + Coord(y_of(spec.frames[i].prediction));
  }
  svg += "\"/>\n";
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string RenderHeatmap(const HeatmapSpec& spec) {
  return spec.kind == HeatmapKind::kCsv ? RenderHeatmapCsv(spec)
                                        : RenderHeatmapSvg(spec);
}

}  // namespace shats
