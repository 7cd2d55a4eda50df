#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scram_xai/anomaly_detector.hpp"
#include "scram_xai/autoencoder.hpp"
#include "scram_xai/benchmark.hpp"
#include "scram_xai/corpus.hpp"
#include "scram_xai/csv.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/replay_attack.hpp"
#include "scram_xai/training.hpp"

namespace scram_xai {

// Parsed `key = value` file. Blank lines and `#` comments are ignored;
// repeated keys keep the last value.
inline std::map<std::string, std::string> parse_key_values(const std::vector<std::string>& lines,
                                                           const std::string& origin = "config") {
  std::map<std::string, std::string> out;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(origin + ": expected key = value, got '" + lines[n] + "'");
    }
    const auto key = csv::trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(origin + ": empty key in '" + lines[n] + "'");
    out[std::string(key)] = std::string(csv::trim(line.substr(eq + 1)));
  }
  return out;
}

// Everything a command may need. Paths are relative to the working directory.
struct RunConfig {
  std::string data_dir = "data";
  std::string out_dir = "out";
  std::string checkpoint = "out/model.ckpt";
  std::string calibration = "out/calibration.txt";

  CorpusSpec corpus{};
  std::vector<double> cycle_split = {34, 10, 3};
  std::vector<double> scram_split = {20, 4};
  std::size_t cycle_stride = 10;
  std::size_t scram_stride = 1;

  bool desk_scale = false;
  std::size_t window = 10;
  std::uint64_t model_seed = 11;
  TrainConfig train{};
  TrainConfig finetune = BenchmarkConfig{}.finetune;

  Metric metric = Metric::Mae;
  std::optional<double> threshold;  // epsilon; from the calibration file when unset
  std::optional<double> tau_shap;
  double quantile = 0.97;
  double tau_quantile = 0.999;
  std::size_t min_run = kDefaultMinRun;
  std::size_t histogram_bins = 50;

  ScenarioParams scenario{};
  AcceptanceLimits limits{};

  AeArchitecture architecture() const {
    AeArchitecture a = desk_scale ? AeArchitecture::desk_scale() : AeArchitecture{};
    a.window = window;
    return a;
  }

  BenchmarkConfig benchmark() const {
    BenchmarkConfig b;
    b.corpus.seed = corpus.seed;
    b.corpus.noise = corpus.noise;
    b.cycle_stride = cycle_stride;
    b.scram_stride = scram_stride;
    b.arch = AeArchitecture::desk_scale();
    b.arch.window = window;
    b.model_seed = model_seed;
    b.train = train;
    b.finetune = finetune;
    b.metric = metric;
    b.quantile = quantile;
    b.tau_quantile = tau_quantile;
    b.min_run = min_run;
    b.scenario = scenario;
    b.limits = limits;
    return b;
  }
};

namespace detail {

inline std::vector<double> parse_weights(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (auto cell : csv::split(value, '/')) {
    double v = std::nan("");
    try {
      v = csv::parse_number(csv::trim(cell));
    } catch (const IngestionError&) {
    }
    if (!(v >= 0.0)) throw ValidationError(key + ": expected weights like 34/10/3, got '" + value + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

// Applies recognised keys on top of `base`. Any other key is an error.
inline RunConfig apply_config(RunConfig base, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    auto num = [&] {
      double v = std::nan("");
      try {
        v = csv::parse_number(value);
      } catch (const IngestionError&) {
      }
      if (!std::isfinite(v)) throw ValidationError(key + ": '" + value + "' is not a number");
      return v;
    };
    auto count = [&] {
      const double v = num();
      if (v < 0.0 || v > 9.0e15 || v != std::floor(v)) {
        throw ValidationError(key + ": expected a non-negative integer, got '" + value + "'");
      }
      return static_cast<std::size_t>(v);
    };
    auto flag = [&] {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw ValidationError(key + ": expected true or false, got '" + value + "'");
    };

    if (key == "data_dir") base.data_dir = value;
    else if (key == "out_dir") base.out_dir = value;
    else if (key == "checkpoint") base.checkpoint = value;
    else if (key == "calibration") base.calibration = value;
    else if (key == "cycles") base.corpus.cycles = count();
    else if (key == "scrams") base.corpus.scrams = count();
    else if (key == "seed") base.corpus.seed = count();
    else if (key == "cycle_duration") base.corpus.cycle_duration = count();
    else if (key == "scram_duration") base.corpus.scram_duration = count();
    else if (key == "cycle_null_rate") base.corpus.cycle_null_rate = num();
    else if (key == "cycle_split") base.cycle_split = detail::parse_weights(key, value);
    else if (key == "scram_split") base.scram_split = detail::parse_weights(key, value);
    else if (key == "cycle_stride") base.cycle_stride = count();
    else if (key == "scram_stride") base.scram_stride = count();
    else if (key == "desk_scale") base.desk_scale = flag();
    else if (key == "window") base.window = count();
    else if (key == "model_seed") base.model_seed = count();
    else if (key == "train_seed") base.train.seed = count();
    else if (key == "finetune_seed") base.finetune.seed = count();
    else if (key == "epochs") base.train.epochs = count();
    else if (key == "finetune_epochs") base.finetune.epochs = count();
    else if (key == "learning_rate") base.train.learning_rate = base.finetune.learning_rate = num();
    else if (key == "batch_size") base.train.batch_size = base.finetune.batch_size = count();
    else if (key == "clip_norm") base.train.clip_norm = base.finetune.clip_norm = num();
    else if (key == "patience") base.train.patience = base.finetune.patience = count();
    else if (key == "metric") base.metric = parse_metric(value);
    else if (key == "threshold") base.threshold = num();
    else if (key == "tau_shap") base.tau_shap = num();
    else if (key == "quantile") base.quantile = num();
    else if (key == "tau_quantile") base.tau_quantile = num();
    else if (key == "min_run") base.min_run = count();
    else if (key == "histogram_bins") base.histogram_bins = count();
    else if (key == "t_start") base.scenario.t_start = count();
    else if (key == "period") base.scenario.period = count();
    else if (key == "t_attack") base.scenario.t_attack = count();
    else if (key == "repeats") base.scenario.repeats = count();
    else throw ValidationError("unknown config key '" + key + "'");
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  return apply_config(std::move(base), parse_key_values(csv::read_lines(path), path));
}

}  // namespace scram_xai
