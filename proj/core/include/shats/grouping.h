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

#ifndef SHATS_GROUPING_H_
#define SHATS_GROUPING_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace shats {

// (instant, feature) position inside a window.
struct Cell {
  int instant = 0;
  int feature = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Group {
  std::string name;
  std::vector<Cell> cells;
};

enum class GroupingStrategy { kTemporal, kFeature, kMultiFeature };

std::string_view StrategyName(GroupingStrategy strategy);

// Provenance of one encoded feature: the raw column it came from and the
// higher-level unit (process, subsystem) that column belongs to.
struct FeatureOrigin {
  std::string source;
  std::string unit;
};

// Indexed by encoded feature.
using FeatureMap = std::vector<FeatureOrigin>;

enum class GroupLevel { kSource, kUnit };

// A partition of the window_size x feature_count cell grid into named,
// non-empty, pairwise-disjoint groups. Groups are the Shapley players.
class Grouping {
 public:
  // Validates the partition property; throws kInvalidGrouping otherwise.
  Grouping(int window_size, int feature_count, std::vector<Group> groups,
           GroupingStrategy strategy);

  int window_size() const { return window_size_; }
  int feature_count() const { return feature_count_; }
  int size() const { return static_cast<int>(groups_.size()); }
  const std::vector<Group>& groups() const { return groups_; }
  GroupingStrategy strategy() const { return strategy_; }
  std::vector<std::string> Names() const;

  // Group index of each cell, instant-major (t * feature_count + f).
  const std::vector<int>& cell_group() const { return cell_group_; }

 private:
  int window_size_;
  int feature_count_;
  std::vector<Group> groups_;
  GroupingStrategy strategy_;
  std::vector<int> cell_group_;
};

// One group per instant, named t0..t{w-1}.
Grouping TemporalGrouping(int window_size, int feature_count);

// One group per feature. Names come from `feature_names` when supplied,
// otherwise f0..f{F-1}.
Grouping FeatureGrouping(int window_size, int feature_count,
                         const std::vector<std::string>& feature_names = {});

// One group per distinct source (or unit) name, ordered by first appearance
// in the feature map. One-hot siblings share a source and so share a group.
Grouping MultiFeatureGrouping(int window_size, const FeatureMap& feature_map,
                              GroupLevel level);

// Parses a group-map document
//   {"level": "source"|"unit"|"custom",
//    "groups": {"<name>": ["<column>", ...], ...}}
// Column names refer to raw (pre-encoding) columns and are expanded to every
// encoded feature whose source matches. Without "groups", level source/unit
// falls back to MultiFeatureGrouping. Groups keep document order.
Grouping GroupingFromGroupMap(std::string_view json_text, int window_size,
                              const FeatureMap& feature_map);

}  // namespace shats

#endif  // SHATS_GROUPING_H_
