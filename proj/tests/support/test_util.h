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

#ifndef SHATS_TESTS_SUPPORT_TEST_UTIL_H_
#define SHATS_TESTS_SUPPORT_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "shats/error.h"
#include "shats/game.h"
#include "shats/window.h"

namespace shats::testing {

// Code of the shats::Error thrown by `f`, or nullopt when it returns.
template <typename F>
std::optional<ErrorCode> ErrorCodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Game backed by a value table indexed by coalition bitmask.
CoalitionGame TableGame(std::vector<double> table, int player_count);

// Uniform values in [-1, 1] for each of the 2^n coalitions.
std::vector<double> RandomTable(int player_count, std::mt19937_64& rng);
CoalitionGame RandomGame(int player_count, std::mt19937_64& rng);

// v(S) = 1 iff |S| >= quota.
CoalitionGame MajorityGame(int player_count, int quota);

// v(S) = sum of weights[i] over i in S.
CoalitionGame AdditiveGame(std::vector<double> weights);

// Counts value calls of the wrapped game.
struct CountedGame {
  CoalitionGame game;
  std::shared_ptr<std::uint64_t> calls;
};
CountedGame Counted(const CoalitionGame& game);

// Fresh directory under the test temp root, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path& path, const std::string& text);

BackgroundSet MakeBackground(WindowShape shape, std::vector<double> data);

// Path of the stand-in external model built alongside the tests.
std::string MockPredictorPath();
// Path of the command-line tool.
std::string ShatsBinaryPath();

}  // namespace shats::testing

#endif  // SHATS_TESTS_SUPPORT_TEST_UTIL_H_
