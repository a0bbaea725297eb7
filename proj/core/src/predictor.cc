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

#include "shats/predictor.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "shats/error.h"

namespace shats {

namespace {

class ParamReader {
 public:
  ParamReader(std::string_view predictor, const PredictorParams& params,
              std::set<std::string> allowed)
      : predictor_(predictor), params_(params) {
    for (const auto& [key, value] : params) {
      if (!allowed.contains(key)) {
        throw Error(ErrorCode::kBadParams, "unknown parameter '" + key +
                                               "' for predictor " + predictor_);
      }
      if (value.empty()) {
        throw Error(ErrorCode::kBadParams, "parameter '" + key + "' is empty");
      }
      for (double v : value) {
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::kBadParams,
                      "parameter '" + key + "' is not finite");
        }
      }
    }
  }

  bool Has(const std::string& key) const { return params_.contains(key); }

  double Scalar(const std::string& key, std::optional<double> fallback) const {
    const auto it = params_.find(key);
    if (it == params_.end()) {
      if (!fallback) {
        throw Error(ErrorCode::kBadParams, "predictor " + predictor_ +
                                               " requires parameter '" + key +
                                               "'");
      }
      return *fallback;
    }
    if (it->second.size() != 1) {
      throw Error(ErrorCode::kBadParams,
                  "parameter '" + key + "' must be a scalar");
    }
    return it->second.front();
  }

  int Index(const std::string& key, std::optional<int> fallback) const {
    const double v = Scalar(key, fallback ? std::optional<double>(*fallback)
                                          : std::nullopt);
    if (v < 0 || v != std::floor(v)) {
      throw Error(ErrorCode::kBadParams,
                  "parameter '" + key + "' must be a non-negative integer");
    }
    return static_cast<int>(v);
  }

  std::vector<double> Vector(const std::string& key) const {
    return params_.at(key);
  }

 private:
  std::string predictor_;
  const PredictorParams& params_;
};

// Per-cell weights given either per feature (broadcast over instants), per
// cell, or as a single scalar.
class CellWeights {
 public:
  CellWeights() = default;
  CellWeights(std::vector<double> weights, double scalar)
      : weights_(std::move(weights)), scalar_(scalar) {}

  double WeightedSum(const WindowBatch& batch, std::size_t i) const {
    const std::span<const double> window = batch.Window(i);
    const int features = batch.shape.features;
    double sum = 0.0;
    if (weights_.empty()) {
      for (double x : window) sum += x;
      return scalar_ * sum;
    }
    if (weights_.size() == window.size()) {
      for (std::size_t c = 0; c < window.size(); ++c) sum += weights_[c] * window[c];
      return sum;
    }
    if (weights_.size() == static_cast<std::size_t>(features)) {
      for (std::size_t c = 0; c < window.size(); ++c) {
        sum += weights_[c % features] * window[c];
      }
      return sum;
    }
    throw Error(ErrorCode::kBadParams,
                std::to_string(weights_.size()) +
                    " weights fit neither the feature count " +
                    std::to_string(features) + " nor the cell count " +
                    std::to_string(window.size()));
  }

 private:
  std::vector<double> weights_;
  double scalar_ = 1.0;
};

CellWeights ReadWeights(const ParamReader& reader) {
  if (reader.Has("weights") && reader.Has("weight")) {
    throw Error(ErrorCode::kBadParams, "give either 'weights' or 'weight'");
  }
  if (reader.Has("weights")) return CellWeights(reader.Vector("weights"), 1.0);
  return CellWeights({}, reader.Scalar("weight", 1.0));
}

class ConstantPredictor : public Predictor {
 public:
  explicit ConstantPredictor(double c) : c_(c) {}
  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    return std::vector<double>(batch.size(), c_);
  }
  std::string name() const override { return "constant"; }

 private:
  double c_;
};

class LinearPredictor : public Predictor {
 public:
  LinearPredictor(CellWeights weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}
  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = bias_ + weights_.WeightedSum(batch, i);
    }
    return out;
  }
  std::string name() const override { return "linear"; }

 private:
  CellWeights weights_;
  double bias_;
};

// 1 if any instant of one encoded feature exceeds tau.
class ThresholdAnyPredictor : public Predictor {
 public:
  ThresholdAnyPredictor(int feature, double tau) : feature_(feature), tau_(tau) {}
  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    if (feature_ >= batch.shape.features) {
      throw Error(ErrorCode::kBadParams,
                  "feature " + std::to_string(feature_) +
                      " out of range for windows with " +
                      std::to_string(batch.shape.features) + " features");
    }
    std::vector<double> out(batch.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (int t = 0; t < batch.shape.instants; ++t) {
        if (batch.At(i, t, feature_) > tau_) {
          out[i] = 1.0;
          break;
        }
      }
    }
    return out;
  }
  bool probability() const override { return true; }
  std::string name() const override { return "threshold-any"; }

 private:
  int feature_;
  double tau_;
};

// 1 if the row sum of any of the last k instants exceeds tau.
class LastInstantThresholdPredictor : public Predictor {
 public:
  LastInstantThresholdPredictor(int k, double tau) : k_(k), tau_(tau) {}
  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    const int w = batch.shape.instants;
    const int first = std::max(0, w - k_);
    std::vector<double> out(batch.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (int t = first; t < w; ++t) {
        double row = 0.0;
        for (int f = 0; f < batch.shape.features; ++f) row += batch.At(i, t, f);
        if (row > tau_) {
          out[i] = 1.0;
          break;
        }
      }
    }
    return out;
  }
  bool probability() const override { return true; }
  std::string name() const override { return "last-instant-threshold"; }

 private:
  int k_;
  double tau_;
};

class LogisticSumPredictor : public Predictor {
 public:
  LogisticSumPredictor(CellWeights weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}
  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double z = bias_ + weights_.WeightedSum(batch, i);
      out[i] = 1.0 / (1.0 + std::exp(-z));
    }
    return out;
  }
  bool probability() const override { return true; }
  std::string name() const override { return "logistic-sum"; }

 private:
  CellWeights weights_;
  double bias_;
};

}  // namespace

const std::vector<std::string>& BuiltinPredictorNames() {
  static const std::vector<std::string> names = {
      "constant", "linear", "threshold-any", "last-instant-threshold",
      "logistic-sum"};
  return names;
}

std::unique_ptr<Predictor> MakeBuiltinPredictor(std::string_view name,
                                                const PredictorParams& params) {
  if (name == "constant") {
    ParamReader reader(name, params, {"c"});
    return std::make_unique<ConstantPredictor>(reader.Scalar("c", 0.0));
  }
  if (name == "linear") {
    ParamReader reader(name, params, {"weights", "weight", "bias"});
    return std::make_unique<LinearPredictor>(ReadWeights(reader),
                                             reader.Scalar("bias", 0.0));
  }
  if (name == "threshold-any") {
    ParamReader reader(name, params, {"feature", "tau"});
    return std::make_unique<ThresholdAnyPredictor>(
        reader.Index("feature", std::nullopt), reader.Scalar("tau", 0.5));
  }
  if (name == "last-instant-threshold") {
    ParamReader reader(name, params, {"k", "tau"});
    const int k = reader.Index("k", 1);
    if (k < 1) throw Error(ErrorCode::kBadParams, "k must be at least 1");
    return std::make_unique<LastInstantThresholdPredictor>(
        k, reader.Scalar("tau", 0.5));
  }
  if (name == "logistic-sum") {
    ParamReader reader(name, params, {"weights", "weight", "bias"});
    return std::make_unique<LogisticSumPredictor>(ReadWeights(reader),
                                                  reader.Scalar("bias", 0.0));
  }
  throw Error(ErrorCode::kUnknownPredictor,
              "no built-in predictor named '" + std::string(name) + "'");
}

void ValidatePredictions(const Predictor& predictor,
                         const std::vector<double>& outputs,
                         std::size_t expected, std::size_t batch_index) {
  const std::string where = "predictor " + predictor.name() + ", batch " +
                            std::to_string(batch_index);
  if (outputs.size() != expected) {
    throw Error(ErrorCode::kPredictorFailure,
                where + ": returned " + std::to_string(outputs.size()) +
                    " outputs for " + std::to_string(expected) + " windows");
  }
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!std::isfinite(outputs[i])) {
      throw Error(ErrorCode::kPredictorFailure,
                  where + ": non-finite output at position " + std::to_string(i));
    }
    if (predictor.probability() && (outputs[i] < 0.0 || outputs[i] > 1.0)) {
      throw Error(ErrorCode::kPredictorFailure,
                  where + ": probability " + std::to_string(outputs[i]) +
                      " outside [0, 1] at position " + std::to_string(i));
    }
  }
}

std::vector<double> CountingPredictor::PredictBatch(const WindowBatch& batch) {
  windows_ += batch.size();
  ++batches_;
  if (inner_ == nullptr) return std::vector<double>(batch.size(), 0.0);
  return inner_->PredictBatch(batch);
}

std::string CountingPredictor::name() const {
  return inner_ == nullptr ? "counting" : "counting(" + inner_->name() + ")";
}

}  // namespace shats
