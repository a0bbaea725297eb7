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

#ifndef SHATS_ANALYSIS_H_
#define SHATS_ANALYSIS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shats/engine.h"

namespace shats {

// kAbsolute: |phi_i| / sum_j |phi_j|, always in [0, 1].
// kRaw:      phi_i / sum_j phi_j, may leave [0, 1] when signs differ.
enum class ShareConvention { kAbsolute, kRaw };

std::string_view ConventionName(ShareConvention convention);

struct Shares {
  std::vector<double> values;
  // Set when the denominator vanished and uniform shares were substituted.
  bool degenerate = false;
};

Shares NormalizeShares(std::span<const double> attributions,
                       ShareConvention convention = ShareConvention::kAbsolute);

struct GroupRank {
  std::string name;
  double mean_share = 0.0;
  int rank = 0;
};

struct RankingReport {
  // Grouping order.
  std::vector<GroupRank> per_group;
  std::size_t window_count = 0;
  ShareConvention convention = ShareConvention::kAbsolute;
  // Frames whose shares fell back to uniform.
  std::size_t degenerate_windows = 0;

  // Name of the group ranked `rank` (1-based).
  const std::string& NameAtRank(int rank) const;
};

// Averages per-window shares over an event and ranks groups by descending
// mean share; ties go to the lower group index. Throws kEmptyEventWindow.
RankingReport RankSources(std::span<const AttributionFrame> frames,
                          const std::vector<std::string>& group_names,
                          ShareConvention convention = ShareConvention::kAbsolute);

// Fraction of events whose truth group sits within the top k ranks.
double LocalizationScore(std::span<const RankingReport> reports,
                         const std::vector<std::string>& truth, int k);

// {"windows": n, "convention": "...", "ranking": [{"name", "share", "rank"}]}
// with the ranking listed by rank.
std::string RankingToJson(const RankingReport& report);

}  // namespace shats

#endif  // SHATS_ANALYSIS_H_
