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

#include "shats/window_io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "shats/error.h"
#include "shats/table.h"

namespace shats {

namespace {

using nlohmann::json;

std::uint64_t ToLittleEndian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((bits >> (8 * i)) & 0xff) << (56 - 8 * i);
    return out;
  }
}

json Parse(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, what + " is not valid JSON: " + e.what());
  }
}

}  // namespace

void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot write '" + tmp.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(ErrorCode::kIoError, "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot move '" + tmp.string() + "' into place: " + ec.message());
  }
}

void WriteWindowSet(const std::filesystem::path& dir, const WindowSet& windows) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create '" + dir.string() + "': " + ec.message());
  }
  std::string bytes(windows.data.size() * 8, '\0');
  for (std::size_t i = 0; i < windows.data.size(); ++i) {
    const std::uint64_t bits =
        ToLittleEndian(std::bit_cast<std::uint64_t>(windows.data[i]));
    std::memcpy(bytes.data() + 8 * i, &bits, 8);
  }
  WriteFileAtomically(dir / "windows.bin", bytes);

  json header;
  header["dtype"] = "<f8";
  header["order"] = "row-major";
  header["shape"] = {windows.size(), windows.shape.instants,
                     windows.shape.features};
  header["stride"] = windows.stride;
  header["labels"] = windows.labels;
  header["origins"] = windows.origins;
  WriteFileAtomically(dir / "windows.json", header.dump(1) + "\n");
}

WindowSet ReadWindowSet(const std::filesystem::path& dir) {
  const json header = Parse(ReadFile(dir / "windows.json"),
                            (dir / "windows.json").string());
  WindowSet windows;
  std::size_t n = 0;
  try {
    if (header.at("dtype") != "<f8" || header.at("order") != "row-major") {
      throw Error(ErrorCode::kParseError, "unsupported window encoding");
    }
    const auto& shape = header.at("shape");
    if (!shape.is_array() || shape.size() != 3) {
      throw Error(ErrorCode::kParseError, "shape must be [N, w, F]");
    }
    n = shape[0].get<std::size_t>();
    windows.shape = {shape[1].get<int>(), shape[2].get<int>()};
    windows.stride = header.at("stride").get<int>();
    windows.labels = header.at("labels").get<std::vector<int>>();
    windows.origins = header.at("origins").get<std::vector<std::int64_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "malformed window header in '" + dir.string() + "': " + e.what());
  }
  if (windows.labels.size() != n || windows.origins.size() != n) {
    throw Error(ErrorCode::kParseError,
                "window header lists inconsistent counts in '" + dir.string() + "'");
  }
  const std::string bytes = ReadFile(dir / "windows.bin");
  const std::size_t values = n * windows.shape.cells();
  if (bytes.size() != values * 8) {
    throw Error(ErrorCode::kParseError,
                "'" + (dir / "windows.bin").string() + "' holds " +
                    std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string(values * 8));
  }
  windows.data.resize(values);
  for (std::size_t i = 0; i < values; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, bytes.data() + 8 * i, 8);
    windows.data[i] = std::bit_cast<double>(ToLittleEndian(bits));
  }
  return windows;
}

BackgroundSet BackgroundFromWindows(const WindowSet& windows) {
  if (windows.size() == 0) {
    throw Error(ErrorCode::kInsufficientWindows, "background file is empty");
  }
  return BackgroundSet{windows.shape, windows.data, BackgroundSource::kFile};
}

std::string EncodingReportToJson(const EncodingReport& report) {
  json doc;
  doc["normalization"] = std::string(NormalizationName(report.mode));
  doc["unseen_indicator"] = report.unseen_indicator;
  doc["dropped_columns"] = report.dropped_columns;
  doc["column_order"] = report.column_order;
  doc["continuous"] = json::array();
  for (const auto& c : report.continuous) {
    json entry{{"name", c.name}};
    if (report.mode == NormalizationMode::kStandard) {
      entry["mean"] = c.center;
      entry["std"] = c.scale;
    } else {
      entry["min"] = c.center;
      entry["max"] = c.center + c.scale;
      entry["range"] = c.scale;
    }
    doc["continuous"].push_back(entry);
  }
  doc["categorical"] = json::array();
  for (const auto& c : report.categorical) {
    doc["categorical"].push_back({{"name", c.name}, {"categories", c.categories}});
  }
  doc["encoded_feature_count"] = report.encoded_feature_count();
  doc["features"] = json::array();
  for (std::size_t f = 0; f < report.feature_map.size(); ++f) {
    doc["features"].push_back({{"name", report.feature_names[f]},
                               {"source", report.feature_map[f].source},
                               {"unit", report.feature_map[f].unit}});
  }
  return doc.dump(1) + "\n";
}

EncodingReport EncodingReportFromJson(std::string_view json_text) {
  const json doc = Parse(json_text, "encoding report");
  EncodingReport report;
  try {
    const std::string mode = doc.at("normalization").get<std::string>();
    if (mode != "standard" && mode != "minmax") {
      throw Error(ErrorCode::kParseError, "unknown normalization '" + mode + "'");
    }
    report.mode = mode == "standard" ? NormalizationMode::kStandard
                                     : NormalizationMode::kMinMax;
    report.unseen_indicator = doc.at("unseen_indicator").get<bool>();
    report.dropped_columns =
        doc.at("dropped_columns").get<std::vector<std::string>>();
    report.column_order = doc.at("column_order").get<std::vector<std::string>>();
    for (const auto& entry : doc.at("continuous")) {
      ContinuousEncoding c;
      c.name = entry.at("name").get<std::string>();
      if (report.mode == NormalizationMode::kStandard) {
        c.center = entry.at("mean").get<double>();
        c.scale = entry.at("std").get<double>();
      } else {
        c.center = entry.at("min").get<double>();
        c.scale = entry.at("range").get<double>();
      }
      report.continuous.push_back(c);
    }
    for (const auto& entry : doc.at("categorical")) {
      report.categorical.push_back(
          {entry.at("name").get<std::string>(),
           entry.at("categories").get<std::vector<std::string>>()});
    }
    for (const auto& entry : doc.at("features")) {
      report.feature_names.push_back(entry.at("name").get<std::string>());
      report.feature_map.push_back({entry.at("source").get<std::string>(),
                                    entry.at("unit").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("malformed encoding report: ") + e.what());
  }
  return report;
}

}  // namespace shats
