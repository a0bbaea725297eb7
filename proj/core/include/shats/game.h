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

#ifndef SHATS_GAME_H_
#define SHATS_GAME_H_

// Coalition-game mathematics: exact Shapley values (weighted and per-stratum
// forms), stratified budget allocation and the stratified sampled estimator.
// Nothing here knows about time series; the engine wraps a coalition value
// function as a CoalitionGame.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace shats {

// A set of players. Up to 64 players are stored inline in one machine word;
// larger games spill into additional words.
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(int player_count);
  // Players 0..63 taken from the bits of `mask`.
  static Coalition FromMask(int player_count, std::uint64_t mask);
  static Coalition FromMembers(int player_count, const std::vector<int>& members);
  static Coalition Grand(int player_count);

  int player_count() const { return player_count_; }
  bool Contains(int player) const;
  void Insert(int player);
  void Erase(int player);
  Coalition With(int player) const;
  int size() const;
  bool empty() const { return size() == 0; }
  // Strictly increasing member indices.
  std::vector<int> Members() const;
  // Low 64 bits.
  std::uint64_t mask() const { return low_; }

  std::size_t Hash() const;
  friend bool operator==(const Coalition& a, const Coalition& b) {
    return a.player_count_ == b.player_count_ && a.low_ == b.low_ &&
           a.high_ == b.high_;
  }

 private:
  int player_count_ = 0;
  std::uint64_t low_ = 0;
  std::vector<std::uint64_t> high_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const { return c.Hash(); }
};

using ValueFunction = std::function<double(const Coalition&)>;

// v: 2^N -> R. The value function must be defined on every coalition,
// including the empty one, and must be deterministic.
struct CoalitionGame {
  int player_count = 0;
  ValueFunction value;
};

enum class ShapleyMethod { kExact, kSampled };

struct ShapleyVector {
  std::vector<double> values;
  ShapleyMethod method = ShapleyMethod::kExact;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
};

// per_stratum[j] is the number of coalitions of size j (excluding the player
// being explained) sampled for every player.
struct StrataPlan {
  std::int64_t total_budget = 0;
  std::vector<std::int64_t> per_stratum;

  int player_count() const { return static_cast<int>(per_stratum.size()); }
  std::int64_t Allocated() const;
  // True when every stratum is sampled exhaustively.
  bool Saturated() const;
};

struct ExactOptions {
  // 2^n coalitions are enumerated; this bounds n.
  int max_players = 20;
};

// Weighted-marginal form. Evaluates every coalition exactly once.
ShapleyVector ExactShapley(const CoalitionGame& game,
                           const ExactOptions& options = {});

// Per-stratum form: phi_i = (1/n) sum_j mean_{|S|=j, i not in S} [v(S+i)-v(S)].
ShapleyVector ExactShapleyStratified(const CoalitionGame& game,
                                     const ExactOptions& options = {});

// m_j = min(floor(m (j+1)^(2/3) / D), C(n-1, j)), D = sum_{k<n} (k+1)^(2/3),
// followed by a minimum-one pass so that no stratum is left empty.
StrataPlan AllocateStrata(std::int64_t total_budget, int player_count);

// count distinct coalitions of exactly `size` players drawn uniformly without
// replacement from the coalitions of `player_count` players excluding
// `player`. Deterministic in `seed`. Returned in increasing rank order.
std::vector<Coalition> SampleStratum(int player_count, int player, int size,
                                     std::int64_t count, std::uint64_t seed);

// Stratified estimator. Coalition values are memoized across players and
// strata for the duration of the call.
ShapleyVector SampledShapley(const CoalitionGame& game, const StrataPlan& plan,
                             std::uint64_t seed);

}  // namespace shats

#endif  // SHATS_GAME_H_
