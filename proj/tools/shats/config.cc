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

#include "shats/config.h"

#include <set>
#include <string>

#include "json.hpp"
#include "shats/error.h"
#include "shats/table.h"

namespace shats::cli {

namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

void CheckKeys(const json& object, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!object.is_object()) Bad(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) Bad("unknown key '" + key + "' in " + where);
  }
}

std::filesystem::path Resolve(const json& value,
                              const std::filesystem::path& base_dir) {
  if (!value.is_string()) Bad("paths must be strings");
  std::filesystem::path p = value.get<std::string>();
  if (p.empty() || p.is_absolute()) return p;
  return base_dir / p;
}

template <typename T>
T Get(const json& object, const std::string& key) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    Bad("bad value for '" + key + "': " + e.what());
  }
}

PredictorParams ParamsFromJson(const json& params) {
  if (!params.is_object()) Bad("predictor params must be an object");
  PredictorParams out;
  for (const auto& [key, value] : params.items()) {
    if (value.is_number()) {
      out[key] = {value.get<double>()};
    } else if (value.is_array()) {
      std::vector<double> values;
      for (const auto& v : value) {
        if (!v.is_number()) Bad("predictor param '" + key + "' must be numeric");
        values.push_back(v.get<double>());
      }
      out[key] = std::move(values);
    } else {
      Bad("predictor param '" + key + "' must be a number or array");
    }
  }
  return out;
}

}  // namespace

ExplainMethod ParseMethod(std::string_view text) {
  if (text == "exact") return ExplainMethod::kExact;
  if (text == "approximate" || text == "approx") return ExplainMethod::kApproximate;
  Bad("unknown method '" + std::string(text) + "'");
}

NormalizationMode ParseNormalization(std::string_view text) {
  if (text == "standard") return NormalizationMode::kStandard;
  if (text == "minmax") return NormalizationMode::kMinMax;
  Bad("unknown normalization '" + std::string(text) + "'");
}

PredictorParams ParsePredictorParams(std::string_view json_text) {
  try {
    return ParamsFromJson(json::parse(json_text));
  } catch (const json::exception& e) {
    Bad(std::string("predictor params are not valid JSON: ") + e.what());
  }
}

RunConfig ConfigFromJson(std::string_view json_text,
                         const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    Bad(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(doc, "config",
            {"data", "schema", "split", "window_size", "stride", "normalization",
             "unseen_indicator", "workdir", "grouping", "background",
             "predictor", "explain", "method", "budget", "seed", "threads",
             "exact_cap", "max_batch", "outputs", "rank", "heatmap"});
  RunConfig c;
  if (doc.contains("data")) c.data = Resolve(doc["data"], base_dir);
  if (doc.contains("schema")) c.schema = Resolve(doc["schema"], base_dir);
  if (doc.contains("split")) {
    const json& s = doc["split"];
    CheckKeys(s, "split",
              {"segment_length", "train_fraction", "val_fraction", "padding"});
    if (s.contains("segment_length")) c.split.segment_length = Get<std::int64_t>(s, "segment_length");
    if (s.contains("train_fraction")) c.split.train_fraction = Get<double>(s, "train_fraction");
    if (s.contains("val_fraction")) c.split.val_fraction = Get<double>(s, "val_fraction");
    if (s.contains("padding")) c.split.padding = Get<std::int64_t>(s, "padding");
  }
  if (doc.contains("window_size")) c.window_size = Get<int>(doc, "window_size");
  if (doc.contains("stride")) c.stride = Get<int>(doc, "stride");
  if (doc.contains("normalization")) {
    c.normalization = ParseNormalization(Get<std::string>(doc, "normalization"));
  }
  if (doc.contains("unseen_indicator")) c.unseen_indicator = Get<bool>(doc, "unseen_indicator");
  if (doc.contains("workdir")) c.workdir = Resolve(doc["workdir"], base_dir);
  if (doc.contains("grouping")) {
    const json& g = doc["grouping"];
    CheckKeys(g, "grouping", {"strategy", "group_map", "level"});
    if (g.contains("strategy")) c.grouping_strategy = Get<std::string>(g, "strategy");
    if (g.contains("group_map")) c.group_map = Resolve(g["group_map"], base_dir);
    if (g.contains("level")) c.grouping_level = Get<std::string>(g, "level");
  }
  if (doc.contains("background")) {
    const json& b = doc["background"];
    CheckKeys(b, "background", {"path", "sample", "stratify"});
    if (b.contains("path")) c.background_path = Resolve(b["path"], base_dir);
    if (b.contains("sample")) c.background_sample = Get<std::size_t>(b, "sample");
    if (b.contains("stratify")) c.stratify = Get<bool>(b, "stratify");
  }
  if (doc.contains("predictor")) {
    const json& p = doc["predictor"];
    CheckKeys(p, "predictor", {"builtin", "params", "exec", "timeout_ms"});
    if (p.contains("builtin")) c.predictor_builtin = Get<std::string>(p, "builtin");
    if (p.contains("params")) c.predictor_params = ParamsFromJson(p["params"]);
    if (p.contains("exec")) c.predictor_exec = Get<std::vector<std::string>>(p, "exec");
    if (p.contains("timeout_ms")) c.timeout_ms = Get<int>(p, "timeout_ms");
  }
  if (doc.contains("explain")) {
    const json& e = doc["explain"];
    CheckKeys(e, "explain", {"split", "start", "count"});
    if (e.contains("split")) c.explain_split = Get<std::string>(e, "split");
    if (e.contains("start")) c.explain_start = Get<std::size_t>(e, "start");
    if (e.contains("count")) c.explain_count = Get<std::size_t>(e, "count");
  }
  if (doc.contains("method")) c.method = ParseMethod(Get<std::string>(doc, "method"));
  if (doc.contains("budget") && !doc["budget"].is_null()) {
    c.budget = Get<std::int64_t>(doc, "budget");
  }
  if (doc.contains("seed")) c.seed = Get<std::uint64_t>(doc, "seed");
  if (doc.contains("threads")) c.threads = Get<unsigned>(doc, "threads");
  if (doc.contains("exact_cap")) c.exact_cap = Get<int>(doc, "exact_cap");
  if (doc.contains("max_batch")) c.max_batch = Get<std::size_t>(doc, "max_batch");
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    CheckKeys(o, "outputs", {"frames", "ranking", "heatmap"});
    if (o.contains("frames")) c.frames_path = Resolve(o["frames"], base_dir);
    if (o.contains("ranking")) c.ranking_path = Resolve(o["ranking"], base_dir);
    if (o.contains("heatmap")) c.heatmap_path = Resolve(o["heatmap"], base_dir);
  }
  if (doc.contains("rank")) {
    const json& r = doc["rank"];
    CheckKeys(r, "rank", {"events", "convention", "k"});
    if (r.contains("events")) c.events_path = Resolve(r["events"], base_dir);
    if (r.contains("convention")) c.convention = Get<std::string>(r, "convention");
    if (r.contains("k")) c.top_k = Get<int>(r, "k");
  }
  if (doc.contains("heatmap")) {
    const json& h = doc["heatmap"];
    CheckKeys(h, "heatmap", {"threshold", "color_scale", "cell", "format"});
    if (h.contains("threshold")) c.threshold = Get<double>(h, "threshold");
    if (h.contains("color_scale") && !h["color_scale"].is_null()) {
      c.color_scale = Get<double>(h, "color_scale");
    }
    if (h.contains("cell")) c.cell_size = Get<int>(h, "cell");
    if (h.contains("format")) c.heatmap_format = Get<std::string>(h, "format");
  }
  return c;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    Bad("cannot read config: " + e.detail());
  }
  return ConfigFromJson(text, path.parent_path());
}

void CheckExclusiveSources(const RunConfig& config) {
  if (!config.predictor_builtin.empty() && !config.predictor_exec.empty()) {
    Bad("choose either a built-in predictor or an exec predictor, not both");
  }
  if (!config.background_path.empty() && config.background_sample) {
    Bad("choose either a background path or a background sample size, not both");
  }
}

}  // namespace shats::cli
