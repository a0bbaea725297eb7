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

#ifndef SHATS_WINDOW_IO_H_
#define SHATS_WINDOW_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "shats/pipeline.h"
#include "shats/window.h"

namespace shats {

// A window directory holds
//   windows.bin   N*w*F little-endian float64, row-major (window, instant,
//                 feature)
//   windows.json  {"dtype": "<f8", "order": "row-major", "shape": [N, w, F],
//                  "stride": s, "labels": [...], "origins": [...]}
void WriteWindowSet(const std::filesystem::path& dir, const WindowSet& windows);
WindowSet ReadWindowSet(const std::filesystem::path& dir);

BackgroundSet BackgroundFromWindows(const WindowSet& windows);

std::string EncodingReportToJson(const EncodingReport& report);
EncodingReport EncodingReportFromJson(std::string_view json_text);

// Writes through a temporary sibling and renames, so readers never observe a
// partial file.
void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view content);

}  // namespace shats

#endif  // SHATS_WINDOW_IO_H_
