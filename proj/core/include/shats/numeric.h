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

#ifndef SHATS_NUMERIC_H_
#define SHATS_NUMERIC_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace shats {

// Neumaier's compensated summation. Strata means average many marginal
// contributions that nearly cancel.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is always integral.
    const std::uint64_t factor = n - k + i;
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(result) * factor / i;
    if (wide > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = static_cast<std::uint64_t>(wide);
  }
  return result;
}

// SplitMix64 finalizer; used to derive independent stream seeds from a
// user seed and structural indices.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return MixSeed(MixSeed(MixSeed(seed) ^ a) ^ b);
}

// Uniform integer in [0, bound). Implemented by rejection on the raw engine
// output so results do not depend on the standard library's distribution
// implementation.
inline std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // 2^64 mod bound; draws at or above 2^64 - rem would bias the result.
  const std::uint64_t rem =
      (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  std::uint64_t draw = rng();
  if (rem != 0) {
    const std::uint64_t limit = 0 - rem;
    while (draw >= limit) draw = rng();
  }
  return draw % bound;
}

}  // namespace shats

#endif  // SHATS_NUMERIC_H_
