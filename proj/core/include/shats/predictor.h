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

#ifndef SHATS_PREDICTOR_H_
#define SHATS_PREDICTOR_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "shats/window.h"

namespace shats {

// Black-box model f: window -> scalar.
class Predictor {
 public:
  virtual ~Predictor() = default;

  // Returns exactly one finite output per window in the batch.
  virtual std::vector<double> PredictBatch(const WindowBatch& batch) = 0;

  // A serial predictor must never be called concurrently.
  virtual bool serial() const { return false; }
  // Probability models must return values in [0, 1].
  virtual bool probability() const { return false; }
  virtual std::string name() const = 0;
};

// Scalars are stored as one-element vectors.
using PredictorParams = std::map<std::string, std::vector<double>>;

// Analytic models: "constant", "linear", "threshold-any",
// "last-instant-threshold", "logistic-sum". Throws kUnknownPredictor or
// kBadParams.
std::unique_ptr<Predictor> MakeBuiltinPredictor(std::string_view name,
                                                const PredictorParams& params);
const std::vector<std::string>& BuiltinPredictorNames();

// Checks the output contract of PredictBatch; throws kPredictorFailure
// mentioning `batch_index` on a length mismatch, a non-finite value or a
// probability outside [0, 1].
void ValidatePredictions(const Predictor& predictor,
                         const std::vector<double>& outputs,
                         std::size_t expected, std::size_t batch_index);

// Counts windows and batches. With no inner predictor every output is 0,
// which is enough for dry runs: the set of coalitions the engine evaluates
// never depends on predicted values.
class CountingPredictor : public Predictor {
 public:
  CountingPredictor() = default;
  explicit CountingPredictor(Predictor* inner) : inner_(inner) {}

  std::vector<double> PredictBatch(const WindowBatch& batch) override;
  bool serial() const override { return inner_ != nullptr && inner_->serial(); }
  bool probability() const override {
    return inner_ != nullptr && inner_->probability();
  }
  std::string name() const override;

  std::uint64_t windows() const { return windows_.load(); }
  std::uint64_t batches() const { return batches_.load(); }
  void Reset() {
    windows_ = 0;
    batches_ = 0;
  }

 private:
  Predictor* inner_ = nullptr;
  std::atomic<std::uint64_t> windows_{0};
  std::atomic<std::uint64_t> batches_{0};
};

// Funnels every call to a serial predictor through one lock.
class SerializedPredictor : public Predictor {
 public:
  explicit SerializedPredictor(Predictor& inner) : inner_(inner) {}

  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    std::lock_guard<std::mutex> lock(mutex_);
    return inner_.PredictBatch(batch);
  }
  bool serial() const override { return false; }
  bool probability() const override { return inner_.probability(); }
  std::string name() const override { return inner_.name(); }

 private:
  Predictor& inner_;
  std::mutex mutex_;
};

// Launches `command` and talks NDJSON over its stdin/stdout:
//   child  -> {"proto": 1, "name": "<string>"}           (first line)
//   parent -> {"id": n, "w": w, "f": f, "windows": [[[...]]]}
//   child  -> {"id": n, "outputs": [...]}
// The child persists across calls and is shut down by closing its stdin.
// Throws kSpawnFailure, kProtocolViolation or kTimeout.
std::unique_ptr<Predictor> SpawnExternalPredictor(
    const std::vector<std::string>& command, int timeout_ms);

}  // namespace shats

#endif  // SHATS_PREDICTOR_H_
