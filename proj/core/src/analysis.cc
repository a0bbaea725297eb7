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

#include "shats/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"
#include "shats/error.h"
#include "shats/numeric.h"

namespace shats {

std::string_view ConventionName(ShareConvention convention) {
  return convention == ShareConvention::kAbsolute ? "absolute" : "raw";
}

Shares NormalizeShares(std::span<const double> attributions,
                       ShareConvention convention) {
  Shares shares;
  const std::size_t n = attributions.size();
  if (n == 0) return shares;
  CompensatedSum total;
  for (double phi : attributions) {
    total.Add(convention == ShareConvention::kAbsolute ? std::fabs(phi) : phi);
  }
  const double denominator = total.Total();
  shares.values.resize(n);
  if (denominator == 0.0) {
    shares.degenerate = true;
    std::fill(shares.values.begin(), shares.values.end(), 1.0 / n);
    return shares;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = convention == ShareConvention::kAbsolute
                           ? std::fabs(attributions[i])
                           : attributions[i];
    shares.values[i] = phi / denominator;
  }
  return shares;
}

const std::string& RankingReport::NameAtRank(int rank) const {
  for (const GroupRank& g : per_group) {
    if (g.rank == rank) return g.name;
  }
  throw Error(ErrorCode::kInternal, "no group at rank " + std::to_string(rank));
}

RankingReport RankSources(std::span<const AttributionFrame> frames,
                          const std::vector<std::string>& group_names,
                          ShareConvention convention) {
  if (frames.empty()) {
    throw Error(ErrorCode::kEmptyEventWindow, "event has no frames");
  }
  const std::size_t groups = group_names.size();
  RankingReport report;
  report.window_count = frames.size();
  report.convention = convention;

  // Summing in origin order keeps the means independent of frame order.
  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frames[a].origin < frames[b].origin;
  });
  std::vector<CompensatedSum> sums(groups);
  for (std::size_t idx : order) {
    const AttributionFrame& frame = frames[idx];
    if (frame.attributions.size() != groups) {
      throw Error(ErrorCode::kShapeMismatch,
                  "frame at origin " + std::to_string(frame.origin) + " has " +
                      std::to_string(frame.attributions.size()) +
                      " attributions for " + std::to_string(groups) + " groups");
    }
    const Shares shares = NormalizeShares(frame.attributions, convention);
    if (shares.degenerate) ++report.degenerate_windows;
    for (std::size_t g = 0; g < groups; ++g) sums[g].Add(shares.values[g]);
  }
  report.per_group.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    report.per_group[g].name = group_names[g];
    report.per_group[g].mean_share =
        sums[g].Total() / static_cast<double>(frames.size());
  }
  std::vector<std::size_t> ranked(groups);
  std::iota(ranked.begin(), ranked.end(), 0);
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return report.per_group[a].mean_share > report.per_group[b].mean_share;
  });
  for (std::size_t r = 0; r < groups; ++r) {
    report.per_group[ranked[r]].rank = static_cast<int>(r + 1);
  }
  return report;
}

double LocalizationScore(std::span<const RankingReport> reports,
                         const std::vector<std::string>& truth, int k) {
  if (k < 1) {
    throw Error(ErrorCode::kConfigError, "k must be at least 1");
  }
  if (reports.size() != truth.size()) {
    throw Error(ErrorCode::kConfigError,
                std::to_string(truth.size()) + " truth names for " +
                    std::to_string(reports.size()) + " events");
  }
  if (reports.empty()) {
    throw Error(ErrorCode::kEmptyEventWindow, "no events to score");
  }
  std::size_t hits = 0;
  for (std::size_t e = 0; e < reports.size(); ++e) {
    const auto& groups = reports[e].per_group;
    const auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupRank& g) {
      return g.name == truth[e];
    });
    if (it == groups.end()) {
      throw Error(ErrorCode::kUnknownTruthName,
                  "event " + std::to_string(e) + " names unknown group '" +
                      truth[e] + "'");
    }
    if (it->rank <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(reports.size());
}

std::string RankingToJson(const RankingReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["windows"] = report.window_count;
  doc["convention"] = std::string(ConventionName(report.convention));
  std::vector<const GroupRank*> by_rank;
  for (const GroupRank& g : report.per_group) by_rank.push_back(&g);
  std::sort(by_rank.begin(), by_rank.end(),
            [](const GroupRank* a, const GroupRank* b) { return a->rank < b->rank; });
  doc["ranking"] = ordered_json::array();
  for (const GroupRank* g : by_rank) {
    ordered_json entry;
    entry["name"] = g->name;
    entry["share"] = g->mean_share;
    entry["rank"] = g->rank;
    doc["ranking"].push_back(std::move(entry));
  }
  if (report.degenerate_windows > 0) {
    doc["degenerate_windows"] = report.degenerate_windows;
  }
  return doc.dump(1) + "\n";
}

}  // namespace shats
