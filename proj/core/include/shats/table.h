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

#ifndef SHATS_TABLE_H_
#define SHATS_TABLE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shats {

enum class ColumnKind { kContinuous, kCategorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  // Filled for continuous columns.
  std::vector<double> values;
  // Filled for categorical columns.
  std::vector<std::string> text;

  std::size_t size() const {
    return kind == ColumnKind::kContinuous ? values.size() : text.size();
  }
};

// T rows x F named feature columns, plus optional labels and timestamps.
struct TimeSeriesTable {
  std::vector<Column> columns;
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<std::string>> timestamps;

  std::size_t rows() const;
  const Column* Find(std::string_view name) const;
};

// Per-column kind overrides, e.g. {"columns": {"MV101": "categorical"}}.
using ColumnSchema = std::map<std::string, ColumnKind>;

ColumnSchema ParseSchema(std::string_view json_text);

// First row holds headers. Columns named "timestamp" and "label" (any case)
// are split off. Without a schema entry, a column is continuous when every
// value parses as a number. Empty or unparsable cells are rejected with their
// row numbers (kParseError).
TimeSeriesTable ParseCsv(std::string_view text, const ColumnSchema& schema = {});
TimeSeriesTable ReadCsv(const std::filesystem::path& path,
                        const ColumnSchema& schema = {});

std::string ReadFile(const std::filesystem::path& path);

}  // namespace shats

#endif  // SHATS_TABLE_H_
