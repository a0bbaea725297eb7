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

#ifndef SHATS_WINDOW_H_
#define SHATS_WINDOW_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shats {

// Windows are stored instant-major: cell (t, f) lives at t * features + f.
struct WindowShape {
  int instants = 0;
  int features = 0;

  std::size_t cells() const {
    return static_cast<std::size_t>(instants) * static_cast<std::size_t>(features);
  }
  friend bool operator==(const WindowShape&, const WindowShape&) = default;
};

// A read-only view over `size` contiguous windows of one shape.
struct WindowBatch {
  WindowShape shape;
  std::span<const double> data;

  std::size_t size() const {
    return shape.cells() == 0 ? 0 : data.size() / shape.cells();
  }
  std::span<const double> Window(std::size_t i) const {
    return data.subspan(i * shape.cells(), shape.cells());
  }
  double At(std::size_t i, int instant, int feature) const {
    return data[i * shape.cells() +
                static_cast<std::size_t>(instant) * shape.features + feature];
  }
};

struct WindowSet {
  WindowShape shape;
  std::vector<double> data;
  std::vector<int> labels;
  // Row index of each window's last instant.
  std::vector<std::int64_t> origins;
  int stride = 1;

  std::size_t size() const { return origins.size(); }
  std::span<const double> Window(std::size_t i) const {
    return std::span<const double>(data).subspan(i * shape.cells(),
                                                 shape.cells());
  }
  WindowBatch AsBatch() const { return {shape, data}; }
};

enum class BackgroundSource { kFile, kSampled };

// The K reference windows whose values stand in for absent groups.
struct BackgroundSet {
  WindowShape shape;
  std::vector<double> data;
  BackgroundSource source = BackgroundSource::kFile;

  std::size_t size() const {
    return shape.cells() == 0 ? 0 : data.size() / shape.cells();
  }
  std::span<const double> Window(std::size_t k) const {
    return std::span<const double>(data).subspan(k * shape.cells(),
                                                 shape.cells());
  }
};

}  // namespace shats

#endif  // SHATS_WINDOW_H_
