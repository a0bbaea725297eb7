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

#include "shats/grouping.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shats/error.h"

namespace shats {

std::string_view StrategyName(GroupingStrategy strategy) {
  switch (strategy) {
    case GroupingStrategy::kTemporal:
      return "temporal";
    case GroupingStrategy::kFeature:
      return "feature";
    case GroupingStrategy::kMultiFeature:
      return "multifeature";
  }
  return "unknown";
}

namespace {

void CheckDimensions(int window_size, int feature_count) {
  if (window_size < 1 || feature_count < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "window " + std::to_string(window_size) + "x" +
                    std::to_string(feature_count) + " is empty");
  }
}

}  // namespace

Grouping::Grouping(int window_size, int feature_count, std::vector<Group> groups,
                   GroupingStrategy strategy)
    : window_size_(window_size),
      feature_count_(feature_count),
      groups_(std::move(groups)),
      strategy_(strategy) {
  CheckDimensions(window_size, feature_count);
  if (groups_.empty()) {
    throw Error(ErrorCode::kInvalidGrouping, "grouping has no groups");
  }
  cell_group_.assign(static_cast<std::size_t>(window_size) * feature_count, -1);
  std::set<std::string> names;
  std::size_t covered = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Group& group = groups_[g];
    if (group.cells.empty()) {
      throw Error(ErrorCode::kInvalidGrouping,
                  "group '" + group.name + "' is empty");
    }
    if (!names.insert(group.name).second) {
      throw Error(ErrorCode::kInvalidGrouping,
                  "duplicate group name '" + group.name + "'");
    }
    for (const Cell& cell : group.cells) {
      if (cell.instant < 0 || cell.instant >= window_size ||
          cell.feature < 0 || cell.feature >= feature_count) {
        throw Error(ErrorCode::kInvalidGrouping,
                    "group '" + group.name + "' has a cell outside the window");
      }
      int& slot =
          cell_group_[static_cast<std::size_t>(cell.instant) * feature_count +
                      cell.feature];
      if (slot != -1) {
        throw Error(ErrorCode::kInvalidGrouping,
                    "cell (" + std::to_string(cell.instant) + ", " +
                        std::to_string(cell.feature) +
                        ") belongs to two groups");
      }
      slot = static_cast<int>(g);
      ++covered;
    }
  }
  if (covered != cell_group_.size()) {
    throw Error(ErrorCode::kInvalidGrouping,
                std::to_string(cell_group_.size() - covered) +
                    " cells are not covered by any group");
  }
}

std::vector<std::string> Grouping::Names() const {
  std::vector<std::string> names;
  names.reserve(groups_.size());
  for (const Group& g : groups_) names.push_back(g.name);
  return names;
}

Grouping TemporalGrouping(int window_size, int feature_count) {
  CheckDimensions(window_size, feature_count);
  std::vector<Group> groups(static_cast<std::size_t>(window_size));
  for (int t = 0; t < window_size; ++t) {
    groups[t].name = "t" + std::to_string(t);
    for (int f = 0; f < feature_count; ++f) groups[t].cells.push_back({t, f});
  }
  return Grouping(window_size, feature_count, std::move(groups),
                  GroupingStrategy::kTemporal);
}

Grouping FeatureGrouping(int window_size, int feature_count,
                         const std::vector<std::string>& feature_names) {
  CheckDimensions(window_size, feature_count);
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<std::size_t>(feature_count)) {
    throw Error(ErrorCode::kInvalidDimensions,
                std::to_string(feature_names.size()) + " names for " +
                    std::to_string(feature_count) + " features");
  }
  std::vector<Group> groups(static_cast<std::size_t>(feature_count));
  for (int f = 0; f < feature_count; ++f) {
    groups[f].name =
        feature_names.empty() ? "f" + std::to_string(f) : feature_names[f];
    for (int t = 0; t < window_size; ++t) groups[f].cells.push_back({t, f});
  }
  return Grouping(window_size, feature_count, std::move(groups),
                  GroupingStrategy::kFeature);
}

namespace {

void CheckFeatureMap(const FeatureMap& feature_map) {
  if (feature_map.empty()) {
    throw Error(ErrorCode::kIncompleteFeatureMap, "feature map is empty");
  }
  for (std::size_t f = 0; f < feature_map.size(); ++f) {
    if (feature_map[f].source.empty() || feature_map[f].unit.empty()) {
      throw Error(ErrorCode::kIncompleteFeatureMap,
                  "encoded feature " + std::to_string(f) + " is unmapped");
    }
  }
}

// Groups of encoded features -> groups of cells spanning every instant.
std::vector<Group> ExpandToCells(
    int window_size,
    const std::vector<std::pair<std::string, std::vector<int>>>& features) {
  std::vector<Group> groups;
  groups.reserve(features.size());
  for (const auto& [name, members] : features) {
    Group group{name, {}};
    for (int t = 0; t < window_size; ++t) {
      for (int f : members) group.cells.push_back({t, f});
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

Grouping MultiFeatureGrouping(int window_size, const FeatureMap& feature_map,
                              GroupLevel level) {
  CheckFeatureMap(feature_map);
  CheckDimensions(window_size, static_cast<int>(feature_map.size()));
  std::vector<std::pair<std::string, std::vector<int>>> features;
  std::map<std::string, std::size_t> index;
  for (std::size_t f = 0; f < feature_map.size(); ++f) {
    const std::string& key = level == GroupLevel::kSource
                                 ? feature_map[f].source
                                 : feature_map[f].unit;
    auto [it, inserted] = index.emplace(key, features.size());
    if (inserted) features.push_back({key, {}});
    features[it->second].second.push_back(static_cast<int>(f));
  }
  return Grouping(window_size, static_cast<int>(feature_map.size()),
                  ExpandToCells(window_size, features),
                  GroupingStrategy::kMultiFeature);
}

Grouping GroupingFromGroupMap(std::string_view json_text, int window_size,
                              const FeatureMap& feature_map) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("group map is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kConfigError, "group map must be a JSON object");
  }
  const std::string level = doc.value("level", std::string("custom"));
  if (level != "source" && level != "unit" && level != "custom") {
    throw Error(ErrorCode::kConfigError, "unknown group-map level '" + level + "'");
  }
  CheckFeatureMap(feature_map);
  if (!doc.contains("groups")) {
    if (level == "custom") {
      throw Error(ErrorCode::kConfigError,
                  "a custom group map must list its groups");
    }
    return MultiFeatureGrouping(
        window_size, feature_map,
        level == "source" ? GroupLevel::kSource : GroupLevel::kUnit);
  }
  const auto& groups = doc["groups"];
  if (!groups.is_object()) {
    throw Error(ErrorCode::kConfigError, "'groups' must be an object");
  }

  std::map<std::string, std::vector<int>> by_source;
  for (std::size_t f = 0; f < feature_map.size(); ++f) {
    by_source[feature_map[f].source].push_back(static_cast<int>(f));
  }
  std::vector<int> owner(feature_map.size(), -1);
  std::vector<std::pair<std::string, std::vector<int>>> features;
  for (const auto& [name, columns] : groups.items()) {
    if (!columns.is_array()) {
      throw Error(ErrorCode::kConfigError,
                  "group '" + name + "' must list column names");
    }
    std::vector<int> members;
    for (const auto& column : columns) {
      if (!column.is_string()) {
        throw Error(ErrorCode::kConfigError,
                    "group '" + name + "' has a non-string column");
      }
      const auto it = by_source.find(column.get<std::string>());
      if (it == by_source.end()) {
        throw Error(ErrorCode::kUnknownColumn,
                    "group '" + name + "' names unknown column '" +
                        column.get<std::string>() + "'");
      }
      for (int f : it->second) {
        if (owner[f] != -1) {
          throw Error(ErrorCode::kInvalidGrouping,
                      "column '" + it->first + "' assigned to two groups");
        }
        owner[f] = static_cast<int>(features.size());
        members.push_back(f);
      }
    }
    std::sort(members.begin(), members.end());
    features.push_back({name, std::move(members)});
  }
  for (std::size_t f = 0; f < owner.size(); ++f) {
    if (owner[f] == -1) {
      throw Error(ErrorCode::kIncompleteFeatureMap,
                  "column '" + feature_map[f].source +
                      "' is not assigned to any group");
    }
  }
  return Grouping(window_size, static_cast<int>(feature_map.size()),
                  ExpandToCells(window_size, features),
                  GroupingStrategy::kMultiFeature);
}

}  // namespace shats
