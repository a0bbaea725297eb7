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

#ifndef SHATS_VALUE_FUNCTION_H_
#define SHATS_VALUE_FUNCTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "shats/game.h"
#include "shats/grouping.h"
#include "shats/predictor.h"
#include "shats/window.h"

namespace shats {

// Background-substitution coalition value for one explicand window:
//
//   v(S) = (1/K) sum_k f(hybrid_k(S)),
//
// where hybrid_k(S) takes the explicand's cells for every group in S and
// background window k's cells elsewhere. Values are memoized per coalition.
// Not thread-safe; use one context per explained window.
class CoalitionValueContext {
 public:
  // The referenced objects must outlive the context. Throws kShapeMismatch.
  CoalitionValueContext(std::span<const double> explicand,
                        const BackgroundSet& background,
                        const Grouping& grouping, Predictor& predictor,
                        std::size_t max_batch = 1024);

  double Value(const Coalition& coalition);

  // Seeds the cache, e.g. with a baseline shared across windows.
  void Preload(const Coalition& coalition, double value);

  // Wraps Value() as a game over grouping().size() players. The game refers
  // to this context.
  CoalitionGame AsGame();

  const Grouping& grouping() const { return grouping_; }
  std::size_t cached_coalitions() const { return cache_.size(); }
  std::uint64_t evaluated_coalitions() const { return evaluated_; }

 private:
  double Evaluate(const Coalition& coalition);
  // Fills buffer_ with hybrids of background windows [start, start+count).
  void Assemble(const std::vector<std::uint8_t>& member, std::size_t start,
                std::size_t count);

  std::span<const double> explicand_;
  const BackgroundSet& background_;
  const Grouping& grouping_;
  Predictor& predictor_;
  std::size_t max_batch_;
  std::vector<double> buffer_;
  std::vector<std::uint64_t> select_;
  std::vector<std::vector<std::size_t>> group_cells_;
  // Group membership currently held in buffer_; empty when stale.
  std::vector<std::uint8_t> assembled_;
  std::unordered_map<Coalition, double, CoalitionHash> cache_;
  std::uint64_t evaluated_ = 0;
};

}  // namespace shats

#endif  // SHATS_VALUE_FUNCTION_H_
