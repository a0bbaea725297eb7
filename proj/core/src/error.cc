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

#include "shats/error.h"

#include <string>

namespace shats {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPlayerCountExceedsExactCap:
      return "PlayerCountExceedsExactCap";
    case ErrorCode::kInvalidBudget:
      return "InvalidBudget";
    case ErrorCode::kStratumExhausted:
      return "StratumExhausted";
    case ErrorCode::kTooManyPlayers:
      return "TooManyPlayers";
    case ErrorCode::kInvalidDimensions:
      return "InvalidDimensions";
    case ErrorCode::kIncompleteFeatureMap:
      return "IncompleteFeatureMap";
    case ErrorCode::kInvalidGrouping:
      return "InvalidGrouping";
    case ErrorCode::kUnknownColumn:
      return "UnknownColumn";
    case ErrorCode::kShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::kPredictorFailure:
      return "PredictorFailure";
    case ErrorCode::kSpawnFailure:
      return "SpawnFailure";
    case ErrorCode::kProtocolViolation:
      return "ProtocolViolation";
    case ErrorCode::kTimeout:
      return "Timeout";
    case ErrorCode::kUnknownPredictor:
      return "UnknownPredictor";
    case ErrorCode::kBadParams:
      return "BadParams";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kSegmentTooShort:
      return "SegmentTooShort";
    case ErrorCode::kInvalidSplit:
      return "InvalidSplit";
    case ErrorCode::kDegenerateScale:
      return "DegenerateScale";
    case ErrorCode::kInsufficientWindows:
      return "InsufficientWindows";
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kExactMethodInfeasible:
      return "ExactMethodInfeasible";
    case ErrorCode::kEmptyEventWindow:
      return "EmptyEventWindow";
    case ErrorCode::kUnknownTruthName:
      return "UnknownTruthName";
    case ErrorCode::kEmptyFrames:
      return "EmptyFrames";
    case ErrorCode::kConfigError:
      return "ConfigError";
    case ErrorCode::kInternal:
      return "Internal";
  }
  return "Unknown";
}

ErrorCategory CategoryOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidBudget:
    case ErrorCode::kInvalidSplit:
    case ErrorCode::kInvalidGrouping:
    case ErrorCode::kIncompleteFeatureMap:
    case ErrorCode::kUnknownColumn:
    case ErrorCode::kExactMethodInfeasible:
    case ErrorCode::kPlayerCountExceedsExactCap:
    case ErrorCode::kInvalidDimensions:
    case ErrorCode::kUnknownTruthName:
      return ErrorCategory::kConfig;
    case ErrorCode::kParseError:
    case ErrorCode::kSegmentTooShort:
    case ErrorCode::kDegenerateScale:
    case ErrorCode::kInsufficientWindows:
    case ErrorCode::kIoError:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kEmptyEventWindow:
    case ErrorCode::kEmptyFrames:
      return ErrorCategory::kData;
    case ErrorCode::kPredictorFailure:
    case ErrorCode::kSpawnFailure:
    case ErrorCode::kProtocolViolation:
    case ErrorCode::kTimeout:
    case ErrorCode::kUnknownPredictor:
    case ErrorCode::kBadParams:
      return ErrorCategory::kPredictor;
    case ErrorCode::kStratumExhausted:
    case ErrorCode::kTooManyPlayers:
    case ErrorCode::kInternal:
      return ErrorCategory::kInternal;
  }
  return ErrorCategory::kInternal;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace shats
