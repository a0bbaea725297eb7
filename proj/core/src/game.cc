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

#include "shats/game.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "shats/error.h"
#include "shats/numeric.h"

namespace shats {

// ---------------------------------------------------------------------------
// Coalition

Coalition::Coalition(int player_count) : player_count_(player_count) {
  if (player_count > 64) {
    high_.assign(static_cast<std::size_t>((player_count - 1) / 64), 0);
  }
}

Coalition Coalition::FromMask(int player_count, std::uint64_t mask) {
  Coalition c(player_count);
  if (player_count < 64) mask &= (std::uint64_t{1} << player_count) - 1;
  c.low_ = mask;
  return c;
}

Coalition Coalition::FromMembers(int player_count,
                                 const std::vector<int>& members) {
  Coalition c(player_count);
  for (int m : members) c.Insert(m);
  return c;
}

Coalition Coalition::Grand(int player_count) {
  Coalition c(player_count);
  for (int i = 0; i < player_count; ++i) c.Insert(i);
  return c;
}

bool Coalition::Contains(int player) const {
  if (player < 0 || player >= player_count_) return false;
  if (player < 64) return (low_ >> player) & 1;
  const int word = player / 64 - 1;
  return (high_[word] >> (player % 64)) & 1;
}

void Coalition::Insert(int player) {
  if (player < 0 || player >= player_count_) {
    throw Error(ErrorCode::kInternal, "player index " + std::to_string(player) +
                                          " out of range for " +
                                          std::to_string(player_count_));
  }
  if (player < 64) {
    low_ |= std::uint64_t{1} << player;
  } else {
    high_[player / 64 - 1] |= std::uint64_t{1} << (player % 64);
  }
}

void Coalition::Erase(int player) {
  if (player < 0 || player >= player_count_) return;
  if (player < 64) {
    low_ &= ~(std::uint64_t{1} << player);
  } else {
    high_[player / 64 - 1] &= ~(std::uint64_t{1} << (player % 64));
  }
}

Coalition Coalition::With(int player) const {
  Coalition c = *this;
  c.Insert(player);
  return c;
}

int Coalition::size() const {
  int n = std::popcount(low_);
  for (std::uint64_t w : high_) n += std::popcount(w);
  return n;
}

std::vector<int> Coalition::Members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < player_count_; ++i) {
    if (Contains(i)) out.push_back(i);
  }
  return out;
}

std::size_t Coalition::Hash() const {
  std::uint64_t h = MixSeed(low_ ^ static_cast<std::uint64_t>(player_count_));
  for (std::uint64_t w : high_) h = MixSeed(h ^ w);
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// StrataPlan

std::int64_t StrataPlan::Allocated() const {
  return std::accumulate(per_stratum.begin(), per_stratum.end(),
                         std::int64_t{0});
}

bool StrataPlan::Saturated() const {
  const int n = player_count();
  for (int j = 0; j < n; ++j) {
    const std::uint64_t cap = Binomial(static_cast<std::uint64_t>(n - 1),
                                       static_cast<std::uint64_t>(j));
    if (static_cast<std::uint64_t>(per_stratum[j]) != cap) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exact computation

namespace {

void CheckExactFeasible(const CoalitionGame& game, const ExactOptions& options) {
  if (game.player_count < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "a game needs at least one player");
  }
  if (!game.value) {
    throw Error(ErrorCode::kInternal, "game has no value function");
  }
  if (game.player_count > options.max_players || game.player_count > 40) {
    throw Error(ErrorCode::kPlayerCountExceedsExactCap,
                std::to_string(game.player_count) + " players exceed the cap of " +
                    std::to_string(std::min(options.max_players, 40)));
  }
}

// v(S) for every S, indexed by bitmask.
std::vector<double> EnumerateValues(const CoalitionGame& game) {
  const int n = game.player_count;
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> values(count);
  // Gray-code order: consecutive coalitions differ by one player.
  for (std::uint64_t step = 0; step < count; ++step) {
    const std::uint64_t mask = step ^ (step >> 1);
    values[mask] = game.value(Coalition::FromMask(n, mask));
  }
  return values;
}

}  // namespace

ShapleyVector ExactShapley(const CoalitionGame& game,
                           const ExactOptions& options) {
  CheckExactFeasible(game, options);
  const int n = game.player_count;
  const std::vector<double> v = EnumerateValues(game);

  // |S|! (n - |S| - 1)! / n!  ==  1 / (n C(n-1, |S|))
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) *
                       static_cast<double>(Binomial(n - 1, s)));
  }

  ShapleyVector result;
  result.method = ShapleyMethod::kExact;
  result.values.assign(static_cast<std::size_t>(n), 0.0);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    CompensatedSum phi;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      phi.Add(weight[std::popcount(mask)] * (v[mask | bit] - v[mask]));
    }
    result.values[i] = phi.Total();
  }
  return result;
}

ShapleyVector ExactShapleyStratified(const CoalitionGame& game,
                                     const ExactOptions& options) {
  CheckExactFeasible(game, options);
  const int n = game.player_count;
  const std::vector<double> v = EnumerateValues(game);

  ShapleyVector result;
  result.method = ShapleyMethod::kExact;
  result.values.assign(static_cast<std::size_t>(n), 0.0);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<CompensatedSum> strata(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::fill(strata.begin(), strata.end(), CompensatedSum{});
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      strata[std::popcount(mask)].Add(v[mask | bit] - v[mask]);
    }
    CompensatedSum phi;
    for (int j = 0; j < n; ++j) {
      phi.Add(strata[j].Total() / static_cast<double>(Binomial(n - 1, j)));
    }
    result.values[i] = phi.Total() / n;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Budget allocation

StrataPlan AllocateStrata(std::int64_t total_budget, int player_count) {
  if (player_count < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "a game needs at least one player");
  }
  if (total_budget < 1) {
    throw Error(ErrorCode::kInvalidBudget,
                "budget must be positive, got " + std::to_string(total_budget));
  }
  if (total_budget < player_count) {
    throw Error(ErrorCode::kInvalidBudget,
                "budget " + std::to_string(total_budget) +
                    " cannot give every one of " +
                    std::to_string(player_count) + " strata a coalition");
  }
  const int n = player_count;
  long double denominator = 0.0L;
  for (int k = 0; k < n; ++k) {
    denominator += std::pow(static_cast<long double>(k + 1), 2.0L / 3.0L);
  }

  StrataPlan plan;
  plan.total_budget = total_budget;
  plan.per_stratum.assign(static_cast<std::size_t>(n), 0);
  std::vector<long double> remainder(static_cast<std::size_t>(n), 0.0L);
  for (int j = 0; j < n; ++j) {
    const long double raw =
        static_cast<long double>(total_budget) *
        std::pow(static_cast<long double>(j + 1), 2.0L / 3.0L) / denominator;
    const long double floored = std::floor(raw);
    remainder[j] = raw - floored;
    const std::uint64_t cap = Binomial(n - 1, j);
    const auto share = static_cast<std::uint64_t>(floored);
    plan.per_stratum[j] = static_cast<std::int64_t>(std::min(share, cap));
  }

  // Minimum-one pass: every stratum must contribute to the 1/n average.
  std::vector<int> empty;
  for (int j = 0; j < n; ++j) {
    if (plan.per_stratum[j] == 0) empty.push_back(j);
  }
  std::stable_sort(empty.begin(), empty.end(), [&](int a, int b) {
    return remainder[a] > remainder[b];
  });
  std::int64_t leftover = total_budget - plan.Allocated();
  for (int j : empty) {
    if (leftover == 0) {
      // Fund the stratum from the largest allocation; one exists with >= 2
      // because the budget covers every stratum.
      const auto donor =
          std::max_element(plan.per_stratum.begin(), plan.per_stratum.end());
      --*donor;
      ++leftover;
    }
    plan.per_stratum[j] = 1;
    --leftover;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

// Lexicographic unranking of a size-k subset of `pool`.
std::vector<int> UnrankCombination(const std::vector<int>& pool, int k,
                                   std::uint64_t rank) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  const int m = static_cast<int>(pool.size());
  int x = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (;;) {
      const std::uint64_t block = Binomial(m - x - 1, k - slot - 1);
      if (block > rank) break;
      rank -= block;
      ++x;
    }
    out.push_back(pool[x]);
    ++x;
  }
  return out;
}

}  // namespace

std::vector<Coalition> SampleStratum(int player_count, int player, int size,
                                     std::int64_t count, std::uint64_t seed) {
  if (player_count < 1 || player < 0 || player >= player_count) {
    throw Error(ErrorCode::kInvalidDimensions,
                "player " + std::to_string(player) + " not in a game of " +
                    std::to_string(player_count));
  }
  if (size < 0 || size > player_count - 1) {
    throw Error(ErrorCode::kStratumExhausted,
                "no coalition of size " + std::to_string(size) +
                    " excludes a player among " + std::to_string(player_count));
  }
  const std::uint64_t cardinality = Binomial(player_count - 1, size);
  if (count < 0 || static_cast<std::uint64_t>(count) > cardinality) {
    throw Error(ErrorCode::kStratumExhausted,
                "requested " + std::to_string(count) + " coalitions of size " +
                    std::to_string(size) + " but only " +
                    std::to_string(cardinality) + " exist");
  }
  std::vector<int> pool;
  pool.reserve(static_cast<std::size_t>(player_count - 1));
  for (int p = 0; p < player_count; ++p) {
    if (p != player) pool.push_back(p);
  }

  std::mt19937_64 rng(seed);
  std::vector<Coalition> out;
  out.reserve(static_cast<std::size_t>(count));
  const auto wanted = static_cast<std::uint64_t>(count);

  if (cardinality != std::numeric_limits<std::uint64_t>::max()) {
    // Floyd's algorithm over ranks.
    std::set<std::uint64_t> ranks;
    for (std::uint64_t j = cardinality - wanted; j < cardinality; ++j) {
      const std::uint64_t t = UniformBelow(rng, j + 1);
      if (!ranks.insert(t).second) ranks.insert(j);
    }
    for (std::uint64_t r : ranks) {
      out.push_back(Coalition::FromMembers(player_count,
                                           UnrankCombination(pool, size, r)));
    }
    return out;
  }

  // Stratum too large to rank in 64 bits: rejection on random subsets.
  std::set<std::vector<int>> chosen;
  std::vector<int> scratch = pool;
  while (chosen.size() < wanted) {
    for (int s = 0; s < size; ++s) {
      const auto pick = s + static_cast<int>(UniformBelow(
                                rng, static_cast<std::uint64_t>(
                                         scratch.size() - s)));
      std::swap(scratch[s], scratch[pick]);
    }
    std::vector<int> members(scratch.begin(), scratch.begin() + size);
    std::sort(members.begin(), members.end());
    chosen.insert(std::move(members));
  }
  for (const auto& members : chosen) {
    out.push_back(Coalition::FromMembers(player_count, members));
  }
  return out;
}

ShapleyVector SampledShapley(const CoalitionGame& game, const StrataPlan& plan,
                             std::uint64_t seed) {
  const int n = game.player_count;
  if (n < 1 || !game.value) {
    throw Error(ErrorCode::kInvalidDimensions, "invalid game");
  }
  if (plan.player_count() != n) {
    throw Error(ErrorCode::kInvalidBudget,
                "plan has " + std::to_string(plan.player_count()) +
                    " strata for a game of " + std::to_string(n) + " players");
  }

  // Draw every stratum up front, then evaluate the distinct coalitions in
  // Gray-code order so that consecutive evaluations differ little.
  std::vector<std::vector<Coalition>> samples(static_cast<std::size_t>(n) * n);
  std::vector<Coalition> needed;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::int64_t m_j = plan.per_stratum[j];
      if (m_j <= 0) continue;
      std::vector<Coalition>& sample = samples[static_cast<std::size_t>(i) * n + j];
      sample = SampleStratum(n, i, j, m_j, DeriveSeed(seed, i, j));
      for (const Coalition& t : sample) {
        needed.push_back(t.With(i));
        needed.push_back(t);
      }
    }
  }
  if (n <= 64) {
    auto gray_rank = [](std::uint64_t mask) {
      for (int shift = 1; shift < 64; shift <<= 1) mask ^= mask >> shift;
      return mask;
    };
    std::stable_sort(needed.begin(), needed.end(),
                     [&](const Coalition& a, const Coalition& b) {
                       return gray_rank(a.mask()) < gray_rank(b.mask());
                     });
  }
  std::unordered_map<Coalition, double, CoalitionHash> cache;
  for (const Coalition& c : needed) {
    if (!cache.contains(c)) cache.emplace(c, game.value(c));
  }
  auto value = [&](const Coalition& c) { return cache.at(c); };

  ShapleyVector result;
  result.method = ShapleyMethod::kSampled;
  result.seed = seed;
  result.budget = plan.total_budget;
  result.values.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    CompensatedSum phi;
    for (int j = 0; j < n; ++j) {
      const std::int64_t m_j = plan.per_stratum[j];
      if (m_j <= 0) continue;
      const std::vector<Coalition>& sample =
          samples[static_cast<std::size_t>(i) * n + j];
      CompensatedSum stratum;
      for (const Coalition& t : sample) {
        stratum.Add(value(t.With(i)) - value(t));
      }
      phi.Add(stratum.Total() / static_cast<double>(m_j));
    }
    result.values[i] = phi.Total() / n;
  }
  return result;
}

}  // namespace shats
