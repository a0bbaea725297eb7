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

#include "shats/commands.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shats/analysis.h"
#include "shats/engine.h"
#include "shats/error.h"
#include "shats/game.h"
#include "shats/grouping.h"
#include "shats/heatmap.h"
#include "shats/pipeline.h"
#include "shats/predictor.h"
#include "shats/table.h"
#include "shats/window_io.h"

namespace shats::cli {

namespace fs = std::filesystem;

int ExitCodeFor(const Error& error) {
  switch (error.category()) {
    case ErrorCategory::kConfig:
      return kExitConfig;
    case ErrorCategory::kData:
      return kExitData;
    case ErrorCategory::kPredictor:
      return kExitPredictor;
    case ErrorCategory::kInternal:
      return kExitInternal;
  }
  return kExitInternal;
}

namespace {

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

void RequireFile(const fs::path& path, const std::string& what) {
  if (path.empty()) Bad("no " + what + " configured");
  if (!fs::exists(path)) Bad(what + " '" + path.string() + "' does not exist");
}

std::string JoinNames(const std::vector<std::string>& names) {
  if (names.empty()) return "(none)";
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

Grouping BuildGrouping(const RunConfig& config, const EncodingReport& report,
                       int window_size) {
  const int features = report.encoded_feature_count();
  if (config.grouping_strategy == "temporal") {
    return TemporalGrouping(window_size, features);
  }
  if (config.grouping_strategy == "feature") {
    return FeatureGrouping(window_size, features, report.feature_names);
  }
  if (config.grouping_strategy == "multifeature") {
    if (!config.group_map.empty()) {
      RequireFile(config.group_map, "group map");
      return GroupingFromGroupMap(ReadFile(config.group_map), window_size,
                                  report.feature_map);
    }
    if (config.grouping_level != "source" && config.grouping_level != "unit") {
      Bad("unknown grouping level '" + config.grouping_level + "'");
    }
    return MultiFeatureGrouping(window_size, report.feature_map,
                                config.grouping_level == "source"
                                    ? GroupLevel::kSource
                                    : GroupLevel::kUnit);
  }
  Bad("unknown grouping strategy '" + config.grouping_strategy + "'");
}

std::unique_ptr<Predictor> BuildPredictor(const RunConfig& config) {
  if (!config.predictor_exec.empty()) {
    return SpawnExternalPredictor(config.predictor_exec, config.timeout_ms);
  }
  if (!config.predictor_builtin.empty()) {
    return MakeBuiltinPredictor(config.predictor_builtin, config.predictor_params);
  }
  Bad("no predictor configured (set predictor.builtin or predictor.exec)");
}

HeatmapKind HeatmapKindFor(const RunConfig& config) {
  std::string format = config.heatmap_format;
  if (format.empty()) {
    format = config.heatmap_path.extension() == ".csv" ? "csv" : "svg";
  }
  if (format == "csv") return HeatmapKind::kCsv;
  if (format == "svg") return HeatmapKind::kSvg;
  Bad("unknown heatmap format '" + format + "'");
}

ShareConvention ConventionFor(const RunConfig& config) {
  if (config.convention == "absolute") return ShareConvention::kAbsolute;
  if (config.convention == "raw") return ShareConvention::kRaw;
  Bad("unknown share convention '" + config.convention + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

void RunPreprocess(const RunConfig& config, std::ostream& out) {
  RequireFile(config.data, "data file");
  ColumnSchema schema;
  if (!config.schema.empty()) {
    RequireFile(config.schema, "schema file");
    schema = ParseSchema(ReadFile(config.schema));
  }
  if (config.workdir.empty()) Bad("no workdir configured");
  const TimeSeriesTable table = ReadCsv(config.data, schema);

  PreprocessOptions options;
  options.split = config.split;
  options.window_size = config.window_size;
  options.stride = config.stride;
  options.encode.mode = config.normalization;
  options.encode.unseen_indicator = config.unseen_indicator;
  const PreprocessResult result = Preprocess(table, options);

  // Stage everything, then swap the directory into place.
  fs::path staging = config.workdir;
  staging += ".staging";
  fs::remove_all(staging);
  WriteWindowSet(staging / "train", result.train);
  WriteWindowSet(staging / "val", result.val);
  WriteWindowSet(staging / "test", result.test);
  WriteFileAtomically(staging / "report.json", EncodingReportToJson(result.report));
  fs::remove_all(config.workdir);
  if (config.workdir.has_parent_path()) {
    fs::create_directories(config.workdir.parent_path());
  }
  fs::rename(staging, config.workdir);

  out << "rows: " << result.rows << "\n"
      << "split rows: train " << result.split.train.size() << ", val "
      << result.split.val.size() << ", test " << result.split.test.size() << "\n"
      << "dropped columns: " << JoinNames(result.report.dropped_columns) << "\n"
      << "encoded features: " << result.report.encoded_feature_count() << "\n"
      << "windows: train " << result.train.size() << ", val "
      << result.val.size() << ", test " << result.test.size() << "\n"
      << "written to " << config.workdir.string() << "\n";
}

void RunExplain(const RunConfig& config, std::ostream& out) {
  CheckExclusiveSources(config);
  if (config.frames_path.empty()) Bad("no frames output path configured");
  RequireFile(config.workdir / "report.json", "encoding report");
  const fs::path split_dir = config.workdir / config.explain_split;
  RequireFile(split_dir / "windows.json", "window set");
  if (!config.background_path.empty()) {
    RequireFile(config.background_path / "windows.json", "background window set");
  }

  const EncodingReport report =
      EncodingReportFromJson(ReadFile(config.workdir / "report.json"));
  const WindowSet all = ReadWindowSet(split_dir);
  const std::size_t start = std::min(config.explain_start, all.size());
  const std::size_t count =
      std::min(config.explain_count.value_or(all.size()), all.size() - start);

  const Grouping grouping = BuildGrouping(config, report, all.shape.instants);

  BackgroundSet background;
  if (!config.background_path.empty()) {
    background = BackgroundFromWindows(ReadWindowSet(config.background_path));
  } else if (config.background_sample) {
    const WindowSet train = ReadWindowSet(config.workdir / "train");
    background = SampleBackground(train, *config.background_sample,
                                  config.stratify, config.seed);
  } else {
    Bad("no background configured (set background.path or background.sample)");
  }

  std::unique_ptr<Predictor> predictor = BuildPredictor(config);
  CountingPredictor counter(predictor.get());

  ExplainConfig explain;
  explain.method = config.method;
  explain.budget = config.budget;
  explain.seed = config.seed;
  explain.threads = config.threads;
  explain.exact_cap = config.exact_cap;
  explain.max_batch = config.max_batch;
  const std::size_t cells = all.shape.cells();
  const ExplainRequest request{
      WindowBatch{all.shape, std::span<const double>(all.data).subspan(
                                 start * cells, count * cells)},
      std::span<const std::int64_t>(all.origins).subspan(start, count),
      grouping,
      background,
      counter,
      explain};

  FramesDocument document;
  document.grouping = grouping.Names();
  document.frames = ExplainBatch(request);
  document.meta.method = config.method;
  document.meta.budget = ResolvedBudget(request);
  document.meta.seed = config.seed;
  document.meta.background_size = background.size();
  document.meta.predictor_calls = counter.windows();
  if (config.frames_path.has_parent_path()) {
    fs::create_directories(config.frames_path.parent_path());
  }
  WriteFileAtomically(config.frames_path, FramesToJson(document));

  out << "method: " << MethodName(config.method) << "\n";
  if (document.meta.budget) out << "budget: " << *document.meta.budget << "\n";
  out << "seed: " << config.seed << "\n"
      << "groups: " << grouping.size() << " ("
      << StrategyName(grouping.strategy()) << ")\n"
      << "background windows: " << background.size() << "\n"
      << "explained windows: " << document.frames.size() << "\n"
      << "predictor calls: " << counter.windows() << "\n"
      << "frames written to " << config.frames_path.string() << "\n";
}

void RunRank(const RunConfig& config, std::ostream& out) {
  RequireFile(config.frames_path, "frames file");
  const FramesDocument document = FramesFromJson(ReadFile(config.frames_path));
  const ShareConvention convention = ConventionFor(config);

  std::string result;
  if (config.events_path.empty()) {
    result = RankingToJson(
        RankSources(document.frames, document.grouping, convention));
  } else {
    RequireFile(config.events_path, "events file");
    nlohmann::ordered_json events;
    try {
      events = nlohmann::ordered_json::parse(ReadFile(config.events_path));
    } catch (const nlohmann::json::exception& e) {
      Bad(std::string("events file is not valid JSON: ") + e.what());
    }
    if (!events.is_object() || !events.contains("events") ||
        !events["events"].is_array()) {
      Bad("events file must look like {\"events\": [...]}");
    }
    const int k = events.value("k", config.top_k);
    nlohmann::ordered_json doc;
    doc["events"] = nlohmann::ordered_json::array();
    std::vector<RankingReport> reports;
    std::vector<std::string> truth;
    bool all_have_truth = true;
    for (const auto& event : events["events"]) {
      std::int64_t first = 0;
      std::int64_t last = 0;
      std::string name;
      try {
        name = event.at("name").get<std::string>();
        first = event.at("start").get<std::int64_t>();
        last = event.at("end").get<std::int64_t>();
      } catch (const nlohmann::json::exception& e) {
        Bad(std::string("malformed event: ") + e.what());
      }
      std::vector<AttributionFrame> frames;
      for (const AttributionFrame& f : document.frames) {
        if (f.origin >= first && f.origin <= last) frames.push_back(f);
      }
      if (frames.empty()) {
        throw Error(ErrorCode::kEmptyEventWindow,
                    "event '" + name + "' covers no frames");
      }
      const RankingReport report =
          RankSources(frames, document.grouping, convention);
      auto entry = nlohmann::ordered_json::parse(RankingToJson(report));
      nlohmann::ordered_json named;
      named["event"] = name;
      for (auto& [key, value] : entry.items()) named[key] = value;
      if (event.contains("truth")) {
        truth.push_back(event["truth"].get<std::string>());
        named["truth"] = truth.back();
      } else {
        all_have_truth = false;
      }
      doc["events"].push_back(std::move(named));
      reports.push_back(report);
    }
    if (all_have_truth && !reports.empty()) {
      doc["localization"] = {{"k", k},
                             {"score", LocalizationScore(reports, truth, k)}};
    }
    result = doc.dump(1) + "\n";
  }

  if (config.ranking_path.empty()) {
    out << result;
    return;
  }
  if (config.ranking_path.has_parent_path()) {
    fs::create_directories(config.ranking_path.parent_path());
  }
  WriteFileAtomically(config.ranking_path, result);
  out << "ranking written to " << config.ranking_path.string() << "\n";
}

void RunHeatmap(const RunConfig& config, std::ostream& out) {
  RequireFile(config.frames_path, "frames file");
  if (config.heatmap_path.empty()) Bad("no heatmap output path configured");
  const FramesDocument document = FramesFromJson(ReadFile(config.frames_path));
  HeatmapSpec spec;
  spec.frames = document.frames;
  spec.group_names = document.grouping;
  spec.threshold = config.threshold;
  spec.color_scale = config.color_scale;
  spec.cell_width = config.cell_size;
  spec.cell_height = config.cell_size;
  spec.kind = HeatmapKindFor(config);
  const std::string rendered = RenderHeatmap(spec);
  if (config.heatmap_path.has_parent_path()) {
    fs::create_directories(config.heatmap_path.parent_path());
  }
  WriteFileAtomically(config.heatmap_path, rendered);
  out << "heatmap written to " << config.heatmap_path.string() << "\n";
}

// ---------------------------------------------------------------------------
// selftest

namespace {

CoalitionGame TableGame(std::vector<double> table, int n) {
  auto shared = std::make_shared<std::vector<double>>(std::move(table));
  return {n, [shared](const Coalition& c) { return (*shared)[c.mask()]; }};
}

std::vector<double> RandomTable(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> table(std::size_t{1} << n);
  for (double& v : table) v = unit(rng);
  return table;
}

double MaxDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

bool RunSelftest(std::ostream& out) {
  std::mt19937_64 rng(20240601);
  bool all = true;
  auto report = [&](const std::string& name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    all = all && ok;
  };

  bool efficiency = true;
  bool symmetry = true;
  bool dummy = true;
  bool additivity = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 8;
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> v = RandomTable(n, rng);
    const auto phi = ExactShapley(TableGame(v, n)).values;
    double sum = 0.0;
    for (double x : phi) sum += x;
    const double total = v[size - 1] - v[0];
    efficiency &= std::fabs(sum - total) <= 1e-9 * std::max(1.0, std::fabs(total));

    // Player 0 becomes a dummy: v(S + 0) = v(S) + d.
    std::vector<double> d = v;
    const double gain = 0.37;
    for (std::size_t m = 0; m < size; ++m) {
      if (m & 1) d[m] = d[m & ~std::size_t{1}] + gain;
    }
    dummy &= std::fabs(ExactShapley(TableGame(d, n)).values[0] - gain) <= 1e-9;

    if (n >= 2) {
      // Players 0 and 1 made interchangeable.
      std::vector<double> s = v;
      for (std::size_t m = 0; m < size; ++m) {
        if ((m & 3) == 2) s[m] = s[(m & ~std::size_t{3}) | 1];
      }
      const auto sym = ExactShapley(TableGame(s, n)).values;
      symmetry &= std::fabs(sym[0] - sym[1]) <= 1e-9;
    }

    std::vector<double> w = RandomTable(n, rng);
    std::vector<double> vw(size);
    for (std::size_t m = 0; m < size; ++m) vw[m] = v[m] + w[m];
    const auto lhs = ExactShapley(TableGame(vw, n)).values;
    const auto rhs = ExactShapley(TableGame(w, n)).values;
    for (int i = 0; i < n; ++i) additivity &= std::fabs(lhs[i] - phi[i] - rhs[i]) <= 1e-9;
  }
  report("efficiency", efficiency);
  report("symmetry", symmetry);
  report("dummy", dummy);
  report("additivity", additivity);

  bool stratified = true;
  bool saturated = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const CoalitionGame game = TableGame(RandomTable(n, rng), n);
    const auto exact = ExactShapley(game).values;
    stratified &= MaxDiff(exact, ExactShapleyStratified(game).values) <= 1e-12;
    const StrataPlan plan =
        AllocateStrata(std::int64_t{n} << n, n);  // always saturating
    saturated &= plan.Saturated();
    saturated &= MaxDiff(exact, SampledShapley(game, plan, trial).values) <= 1e-12;
  }
  report("stratified form matches weighted form", stratified);
  report("saturated sampling matches exact", saturated);

  const StrataPlan plan = AllocateStrata(20, 4);
  report("strata allocation m=20 |G|=4 -> [1,3,3,1]",
         plan.per_stratum == std::vector<std::int64_t>{1, 3, 3, 1});

  // End to end: linear model, exact attributions obey efficiency.
  {
    const int w = 3;
    const int f = 2;
    const Grouping grouping = TemporalGrouping(w, f);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    BackgroundSet background{{w, f}, std::vector<double>(4 * w * f),
                             BackgroundSource::kSampled};
    for (double& x : background.data) x = unit(rng);
    std::vector<double> window(w * f);
    for (double& x : window) x = unit(rng);
    auto model = MakeBuiltinPredictor("logistic-sum", {{"weight", {0.8}}});
    const std::vector<std::int64_t> origins = {0};
    ExplainConfig cfg;
    cfg.method = ExplainMethod::kExact;
    const ExplainRequest request{WindowBatch{{w, f}, window}, origins, grouping,
                                 background, *model, cfg};
    const AttributionFrame frame = ExplainWindow(request, 0);
    double sum = 0.0;
    for (double x : frame.attributions) sum += x;
    report("engine efficiency (exact, logistic-sum)",
           std::fabs(sum - (frame.prediction - frame.baseline)) <= 1e-9);
  }
  return all;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

template <typename T>
T ParseValue(const std::string& flag, const std::string& text) {
  T value{};
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    Bad("--" + flag + " expects a number, got '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& flag, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  Bad("--" + flag + " expects true or false, got '" + text + "'");
}

std::vector<std::string> SplitWords(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& FlagTable() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"data", [](RunConfig& c, const std::string& v) { c.data = v; }},
      {"schema", [](RunConfig& c, const std::string& v) { c.schema = v; }},
      {"segment-length", [](RunConfig& c, const std::string& v) {
         c.split.segment_length = ParseValue<std::int64_t>("segment-length", v);
       }},
      {"train-fraction", [](RunConfig& c, const std::string& v) {
         c.split.train_fraction = ParseValue<double>("train-fraction", v);
       }},
      {"val-fraction", [](RunConfig& c, const std::string& v) {
         c.split.val_fraction = ParseValue<double>("val-fraction", v);
       }},
      {"padding", [](RunConfig& c, const std::string& v) {
         c.split.padding = ParseValue<std::int64_t>("padding", v);
       }},
      {"window-size", [](RunConfig& c, const std::string& v) {
         c.window_size = ParseValue<int>("window-size", v);
       }},
      {"stride", [](RunConfig& c, const std::string& v) {
         c.stride = ParseValue<int>("stride", v);
       }},
      {"normalization", [](RunConfig& c, const std::string& v) {
         c.normalization = ParseNormalization(v);
       }},
      {"unseen-indicator", [](RunConfig& c, const std::string& v) {
         c.unseen_indicator = ParseBool("unseen-indicator", v);
       }},
      {"workdir", [](RunConfig& c, const std::string& v) { c.workdir = v; }},
      {"grouping", [](RunConfig& c, const std::string& v) { c.grouping_strategy = v; }},
      {"group-map", [](RunConfig& c, const std::string& v) { c.group_map = v; }},
      {"level", [](RunConfig& c, const std::string& v) { c.grouping_level = v; }},
      {"background", [](RunConfig& c, const std::string& v) {
         c.background_path = v;
         c.background_sample.reset();
       }},
      {"background-size", [](RunConfig& c, const std::string& v) {
         c.background_sample = ParseValue<std::size_t>("background-size", v);
         c.background_path.clear();
       }},
      {"stratify", [](RunConfig& c, const std::string& v) {
         c.stratify = ParseBool("stratify", v);
       }},
      {"predictor", [](RunConfig& c, const std::string& v) {
         c.predictor_builtin = v;
         c.predictor_exec.clear();
       }},
      {"predictor-params", [](RunConfig& c, const std::string& v) {
         c.predictor_params = ParsePredictorParams(v);
       }},
      {"predictor-exec", [](RunConfig& c, const std::string& v) {
         c.predictor_exec = SplitWords(v);
         c.predictor_builtin.clear();
       }},
      {"timeout-ms", [](RunConfig& c, const std::string& v) {
         c.timeout_ms = ParseValue<int>("timeout-ms", v);
       }},
      {"split", [](RunConfig& c, const std::string& v) { c.explain_split = v; }},
      {"start", [](RunConfig& c, const std::string& v) {
         c.explain_start = ParseValue<std::size_t>("start", v);
       }},
      {"count", [](RunConfig& c, const std::string& v) {
         c.explain_count = ParseValue<std::size_t>("count", v);
       }},
      {"method", [](RunConfig& c, const std::string& v) { c.method = ParseMethod(v); }},
      {"budget", [](RunConfig& c, const std::string& v) {
         c.budget = ParseValue<std::int64_t>("budget", v);
       }},
      {"seed", [](RunConfig& c, const std::string& v) {
         c.seed = ParseValue<std::uint64_t>("seed", v);
       }},
      {"threads", [](RunConfig& c, const std::string& v) {
         c.threads = ParseValue<unsigned>("threads", v);
       }},
      {"exact-cap", [](RunConfig& c, const std::string& v) {
         c.exact_cap = ParseValue<int>("exact-cap", v);
       }},
      {"max-batch", [](RunConfig& c, const std::string& v) {
         c.max_batch = ParseValue<std::size_t>("max-batch", v);
       }},
      {"frames", [](RunConfig& c, const std::string& v) { c.frames_path = v; }},
      {"ranking", [](RunConfig& c, const std::string& v) { c.ranking_path = v; }},
      {"heatmap", [](RunConfig& c, const std::string& v) { c.heatmap_path = v; }},
      {"events", [](RunConfig& c, const std::string& v) { c.events_path = v; }},
      {"convention", [](RunConfig& c, const std::string& v) { c.convention = v; }},
      {"k", [](RunConfig& c, const std::string& v) { c.top_k = ParseValue<int>("k", v); }},
      {"threshold", [](RunConfig& c, const std::string& v) {
         c.threshold = ParseValue<double>("threshold", v);
       }},
      {"color-scale", [](RunConfig& c, const std::string& v) {
         c.color_scale = ParseValue<double>("color-scale", v);
       }},
      {"cell", [](RunConfig& c, const std::string& v) {
         c.cell_size = ParseValue<int>("cell", v);
       }},
      {"format", [](RunConfig& c, const std::string& v) { c.heatmap_format = v; }},
  };
  return table;
}

}  // namespace

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grouped Shapley explanations for time-series predictors"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flags;
  std::vector<std::pair<std::string, CLI::Option*>> registered;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run configuration");
    for (const auto& [name, setter] : FlagTable()) {
      registered.emplace_back(name, sub->add_option("--" + name, flags[name]));
    }
  };
  CLI::App* preprocess =
      app.add_subcommand("preprocess", "Split, encode and window a CSV series");
  CLI::App* explain =
      app.add_subcommand("explain", "Compute grouped Shapley attributions");
  CLI::App* rank = app.add_subcommand("rank", "Rank groups by mean share");
  CLI::App* heatmap = app.add_subcommand("heatmap", "Render an attribution heatmap");
  CLI::App* selftest =
      app.add_subcommand("selftest", "Check Shapley axioms and route agreement");
  for (CLI::App* sub : {preprocess, explain, rank, heatmap}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (selftest->parsed()) {
      return RunSelftest(out) ? kExitOk : kExitInternal;
    }
    RunConfig config;
    if (!config_path.empty()) config = LoadConfig(config_path);
    for (const auto& [name, option] : registered) {
      if (option->count() == 0) continue;
      for (const auto& [flag, setter] : FlagTable()) {
        if (flag == name) setter(config, flags[name]);
      }
    }
    if (preprocess->parsed()) RunPreprocess(config, out);
    if (explain->parsed()) RunExplain(config, out);
    if (rank->parsed()) RunRank(config, out);
    if (heatmap->parsed()) RunHeatmap(config, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace shats::cli
