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

#include "shats/table.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shats/error.h"

namespace shats {

std::size_t TimeSeriesTable::rows() const {
  if (!columns.empty()) return columns.front().size();
  if (labels) return labels->size();
  if (timestamps) return timestamps->size();
  return 0;
}

const Column* TimeSeriesTable::Find(std::string_view name) const {
  for (const Column& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ColumnSchema ParseSchema(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") ||
      !doc["columns"].is_object()) {
    throw Error(ErrorCode::kConfigError,
                "schema must look like {\"columns\": {\"name\": \"kind\"}}");
  }
  ColumnSchema schema;
  for (const auto& [name, kind] : doc["columns"].items()) {
    const std::string k = kind.is_string() ? kind.get<std::string>() : "";
    if (k == "continuous") {
      schema[name] = ColumnKind::kContinuous;
    } else if (k == "categorical") {
      schema[name] = ColumnKind::kCategorical;
    } else {
      throw Error(ErrorCode::kConfigError,
                  "column '" + name + "' has unknown kind '" + kind.dump() + "'");
    }
  }
  return schema;
}

namespace {

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> ParseNumber(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto result = std::from_chars(begin, s.data() + s.size(), value);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

// RFC 4180 records: quoted fields may contain separators, quotes ("") and
// newlines. Unquoted fields are trimmed.
std::vector<std::vector<std::string>> SplitRecords(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  auto end_field = [&] {
    record.push_back(was_quoted ? field : Trim(field));
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record.front().empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kParseError, "unterminated quoted field");
  if (!field.empty() || !record.empty() || was_quoted) end_record();
  return records;
}

std::string RowList(const std::vector<std::size_t>& rows) {
  std::string out;
  for (std::size_t i = 0; i < rows.size() && i < 10; ++i) {
    if (i) out += ", ";
    out += std::to_string(rows[i]);
  }
  if (rows.size() > 10) out += ", ... (" + std::to_string(rows.size()) + " rows)";
  return out;
}

}  // namespace

TimeSeriesTable ParseCsv(std::string_view text, const ColumnSchema& schema) {
  const auto records = SplitRecords(text);
  if (records.empty()) throw Error(ErrorCode::kParseError, "CSV has no header");
  const std::vector<std::string>& header = records.front();
  const std::size_t width = header.size();
  const std::size_t rows = records.size() - 1;
  if (rows == 0) throw Error(ErrorCode::kParseError, "CSV has no data rows");
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      // Row numbers count the header as row 1, like a spreadsheet.
      throw Error(ErrorCode::kParseError,
                  "row " + std::to_string(r + 1) + " has " +
                      std::to_string(records[r].size()) + " fields, header has " +
                      std::to_string(width));
    }
  }
  {
    std::vector<std::string> sorted = header;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
      throw Error(ErrorCode::kParseError, "duplicate column '" + *dup + "'");
    }
  }
  for (const auto& [name, kind] : schema) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw Error(ErrorCode::kUnknownColumn,
                  "schema names column '" + name + "' absent from the CSV");
    }
  }

  TimeSeriesTable table;
  for (std::size_t c = 0; c < width; ++c) {
    const std::string& name = header[c];
    const std::string lowered = Lower(name);
    if (lowered == "timestamp") {
      std::vector<std::string> stamps(rows);
      for (std::size_t r = 0; r < rows; ++r) stamps[r] = records[r + 1][c];
      table.timestamps = std::move(stamps);
      continue;
    }
    if (lowered == "label") {
      std::vector<int> labels(rows);
      std::vector<std::size_t> bad;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto v = ParseNumber(records[r + 1][c]);
        if (!v || (*v != 0.0 && *v != 1.0)) {
          bad.push_back(r + 2);
        } else {
          labels[r] = static_cast<int>(*v);
        }
      }
      if (!bad.empty()) {
        throw Error(ErrorCode::kParseError,
                    "label must be 0 or 1; offending rows: " + RowList(bad));
      }
      table.labels = std::move(labels);
      continue;
    }

    Column column;
    column.name = name;
    std::vector<std::size_t> empty_rows;
    std::vector<std::optional<double>> parsed(rows);
    std::vector<std::size_t> unparsable;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string& cell = records[r + 1][c];
      if (cell.empty()) empty_rows.push_back(r + 2);
      parsed[r] = ParseNumber(cell);
      if (!parsed[r]) unparsable.push_back(r + 2);
    }
    if (!empty_rows.empty()) {
      throw Error(ErrorCode::kParseError, "column '" + name +
                                              "' has missing values in rows " +
                                              RowList(empty_rows));
    }
    const auto declared = schema.find(name);
    if (declared != schema.end()) {
      column.kind = declared->second;
    } else if (unparsable.size() == rows) {
      column.kind = ColumnKind::kCategorical;
    } else if (unparsable.empty()) {
      column.kind = ColumnKind::kContinuous;
    } else {
      throw Error(ErrorCode::kParseError,
                  "column '" + name + "' mixes numbers and text; non-numeric rows " +
                      RowList(unparsable) +
                      " (declare the column in a schema to override)");
    }
    if (column.kind == ColumnKind::kContinuous) {
      if (!unparsable.empty()) {
        throw Error(ErrorCode::kParseError, "continuous column '" + name +
                                                "' has non-numeric rows " +
                                                RowList(unparsable));
      }
      column.values.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) column.values[r] = *parsed[r];
    } else {
      column.text.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) column.text[r] = records[r + 1][c];
    }
    table.columns.push_back(std::move(column));
  }
  if (table.columns.empty()) {
    throw Error(ErrorCode::kParseError, "CSV has no feature columns");
  }
  return table;
}

TimeSeriesTable ReadCsv(const std::filesystem::path& path,
                        const ColumnSchema& schema) {
  return ParseCsv(ReadFile(path), schema);
}

}  // namespace shats
