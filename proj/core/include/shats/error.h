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

#ifndef SHATS_ERROR_H_
#define SHATS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace shats {

// Every failure raised by the library carries one of these codes. The code
// determines the coarse category used by the command-line tool for its exit
// status.
enum class ErrorCode {
  // core_game
  kPlayerCountExceedsExactCap,
  kInvalidBudget,
  kStratumExhausted,
  kTooManyPlayers,
  // grouping
  kInvalidDimensions,
  kIncompleteFeatureMap,
  kInvalidGrouping,
  kUnknownColumn,
  // valuefn / predictors
  kShapeMismatch,
  kPredictorFailure,
  kSpawnFailure,
  kProtocolViolation,
  kTimeout,
  kUnknownPredictor,
  kBadParams,
  // pipeline
  kParseError,
  kSegmentTooShort,
  kInvalidSplit,
  kDegenerateScale,
  kInsufficientWindows,
  kIoError,
  // engine
  kExactMethodInfeasible,
  // analysis / heatmap
  kEmptyEventWindow,
  kUnknownTruthName,
  kEmptyFrames,
  // cli
  kConfigError,
  kInternal,
};

enum class ErrorCategory {
  kConfig,
  kData,
  kPredictor,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);
ErrorCategory CategoryOf(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return CategoryOf(code_); }
  // The message without the code prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace shats

#endif  // SHATS_ERROR_H_
