#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <tuple>
#include <span>
#include <string>
#include <vector>

#include "scram_xai/anomaly_detector.hpp"
#include "scram_xai/autoencoder.hpp"
#include "scram_xai/checkpoint.hpp"
#include "scram_xai/corpus.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/evaluation.hpp"
#include "scram_xai/replay_attack.hpp"
#include "scram_xai/shap_explainer.hpp"
#include "scram_xai/training.hpp"

namespace scram_xai {

// End-to-end synthetic run: simulate, train, fine-tune, calibrate, attack one
// held-out SCRAM six ways, detect and explain.
struct BenchmarkConfig {
  CorpusSpec corpus = [] {
    CorpusSpec c;
    c.cycles = 40;
    c.scrams = 20;
    return c;
  }();
  std::vector<double> cycle_split = {34, 10, 3};  // train / validation / test
  std::vector<double> scram_split = {20, 4};      // train / validation
  std::size_t cycle_stride = 10;
  std::size_t scram_stride = 1;
  AeArchitecture arch = AeArchitecture::desk_scale();
  std::uint64_t model_seed = 11;
  TrainConfig train{};
  TrainConfig finetune = [] {
    TrainConfig t;
    t.seed = 8;
    t.epochs = 60;
    return t;
  }();
  Metric metric = Metric::Mae;
  double quantile = 0.97;
  double tau_quantile = 0.999;
  std::size_t min_run = kDefaultMinRun;
  ScenarioParams scenario{};
  AcceptanceLimits limits{};
  std::function<void(const std::string&)> log;
};

struct ScenarioRun {
  int level = 0;
  MultivariateSeries series;
  AttackGroundTruth truth;
  DetectionTimeline timeline;
  Explanation explanation;
  LocalizationReport report;
  ScenarioScore score;
};

struct BenchmarkResult {
  std::vector<char> checkpoint;
  TrainHistory cycle_history;
  TrainHistory scram_history;
  double epsilon = 0.0;
  double tau = 0.0;
  MultivariateSeries heldout;
  DetectionTimeline clean_timeline;
  ScenarioScore clean_score;
  std::vector<ScenarioRun> scenarios;
  SweepTable sweep;
  std::size_t window = 10;
  ScenarioParams scenario{};

  std::vector<Check> detection_checks(const AcceptanceLimits& lim) const {
    std::vector<Check> out;
    out.push_back({"clean accuracy", clean_score.accuracy >= lim.clean_accuracy,
                   fmt(clean_score.accuracy) + " >= " + fmt(lim.clean_accuracy, 2)});
    const std::size_t length = scenario.period * scenario.repeats;
    for (const auto& s : scenarios) {
      for (auto& c : check_scenario(s.score, length, lim)) out.push_back(std::move(c));
    }
    return out;
  }

  std::string summary() const {
    std::string out = "epsilon=" + csv::format_number(epsilon) + "\n";
    out += "tau_shap=" + csv::format_number(tau) + "\n\n";
    std::vector<ScenarioScore> scores{clean_score};
    for (const auto& s : scenarios) scores.push_back(s.score);
    out += scores_to_csv(scores) + "\n";
    out += sweep_to_csv(sweep) + "\n";
    for (const auto& s : scenarios) {
      out += s.score.name + "\n" + report_to_text(s.report) + "\n";
    }
    return out;
  }
};

namespace detail {

inline void log_line(const BenchmarkConfig& cfg, const std::string& msg) {
  if (cfg.log) cfg.log(msg);
}

inline std::vector<WindowTensor> windows_of(std::span<const Matrix> scaled, std::size_t w,
                                            std::size_t stride) {
  std::vector<WindowTensor> out;
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    auto part = windowize(scaled[k], w, stride, k);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace detail

// The SCRAM every scenario is built from: drawn like the training SCRAMs but
// with the onset pinned to the attack start.
inline ScramProfile heldout_profile(const BenchmarkConfig& cfg) {
  auto p = scram_profile(cfg.corpus, cfg.corpus.scrams);
  p.onset = cfg.scenario.t_attack;
  return p;
}

inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.corpus.validate();
  const std::size_t w = cfg.arch.window;
  BenchmarkResult res;
  res.window = w;
  res.scenario = cfg.scenario;

  detail::log_line(cfg, "simulating " + std::to_string(cfg.corpus.cycles) + " cycles and " +
                            std::to_string(cfg.corpus.scrams + 1) + " SCRAMs");
  const auto cyc = proportional_split(cfg.corpus.cycles, cfg.cycle_split);
  const auto scr = proportional_split(cfg.corpus.scrams, cfg.scram_split);
  std::vector<MultivariateSeries> cycles;
  std::vector<MultivariateSeries> scrams;
  for (std::size_t k = 0; k < cfg.corpus.cycles; ++k) {
    cycles.push_back(generate_full_cycle(cycle_profile(cfg.corpus, k)));
  }
  for (std::size_t k = 0; k < cfg.corpus.scrams; ++k) {
    scrams.push_back(make_scram(cfg.corpus, scram_profile(cfg.corpus, k)));
  }
  res.heldout = make_scram(cfg.corpus, heldout_profile(cfg));

  std::vector<Matrix> cyc_train, cyc_val, scr_train, scr_val;
  std::vector<MultivariateSeries> scr_train_series, scr_val_series;
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    if (k < cyc[0]) cyc_train.push_back(encode(cycles[k]));
    else if (k < cyc[0] + cyc[1]) cyc_val.push_back(encode(cycles[k]));
  }
  for (std::size_t k = 0; k < scrams.size(); ++k) {
    (k < scr[0] ? scr_train : scr_val).push_back(encode(scrams[k]));
    (k < scr[0] ? scr_train_series : scr_val_series).push_back(scrams[k]);
  }

  std::vector<Matrix> fit_corpus = cyc_train;
  fit_corpus.insert(fit_corpus.end(), scr_train.begin(), scr_train.end());
  const Scaler scaler = fit_scaler(fit_corpus);
  for (auto* set : {&cyc_train, &cyc_val, &scr_train, &scr_val}) {
    for (auto& m : *set) m = transform(scaler, m);
  }

  AeModel model(cfg.arch, cfg.model_seed);
  model.set_scaler(scaler);

  auto report = [&](const char* phase) {
    return [&cfg, phase](const EpochRecord& r) {
      detail::log_line(cfg, std::string(phase) + " epoch " + std::to_string(r.epoch) +
                                " train " + fmt(r.train_loss, 6) + " val " + fmt(r.val_loss, 6));
    };
  };
  {
    const auto tr = detail::windows_of(cyc_train, w, cfg.cycle_stride);
    const auto va = detail::windows_of(cyc_val, w, cfg.cycle_stride);
    detail::log_line(cfg, "training on " + std::to_string(tr.size()) + " cycle windows");
    res.cycle_history = train(model, std::span<const WindowTensor>(tr),
                              std::span<const WindowTensor>(va), cfg.train, report("cycle"));
  }
  {
    const auto tr = detail::windows_of(scr_train, w, cfg.scram_stride);
    const auto va = detail::windows_of(scr_val, w, cfg.scram_stride);
    detail::log_line(cfg, "fine-tuning on " + std::to_string(tr.size()) + " SCRAM windows");
    res.scram_history = finetune(model, std::span<const WindowTensor>(tr),
                                 std::span<const WindowTensor>(va), cfg.finetune,
                                 report("scram"));
  }
  res.checkpoint = serialize(model);

  res.epsilon = calibrate(model, scr_val_series, cfg.quantile, cfg.metric);
  detail::log_line(cfg, "epsilon " + csv::format_number(res.epsilon));

  std::vector<Matrix> scaled_train = cyc_train;
  scaled_train.insert(scaled_train.end(), scr_train.begin(), scr_train.end());
  const ExplainContext ctx{build_baseline(scr_train_series, scaler), feature_mean(scaled_train)};

  auto explain_series = [&](const MultivariateSeries& s, const DetectionTimeline& tl) {
    return explain(model, prepare(s, scaler), tl, ctx, detect_scram_onset(s), cfg.metric);
  };

  std::vector<PerSecondAttribution> normal;
  for (const auto& s : scr_val_series) {
    normal.push_back(explain_series(s, scan(model, s, res.epsilon, cfg.metric)).per_second);
  }
  res.tau = calibrate_tau(normal, cfg.tau_quantile);
  detail::log_line(cfg, "tau_shap " + csv::format_number(res.tau));

  res.clean_timeline = scan(model, res.heldout, res.epsilon, cfg.metric);
  res.clean_score = score_clean("clean", res.clean_timeline);

  std::vector<std::string> names{"clean"};
  std::vector<std::vector<double>> errors{series_errors(model, res.heldout, cfg.metric)};
  std::vector<std::vector<bool>> labels{std::vector<bool>(res.heldout.length(), false)};

  for (int level = 1; level <= 6; ++level) {
    ScenarioRun run;
    run.level = level;
    std::tie(run.series, run.truth) = build_scenario(res.heldout, level, cfg.scenario);
    const auto errs = series_errors(model, run.series, cfg.metric);
    run.timeline = make_timeline(errs, w, res.epsilon, cfg.metric, run.series.start_time);
    run.explanation = explain_series(run.series, run.timeline);
    run.report = localize(run.explanation.per_second, res.tau, cfg.min_run);
    run.report.low_confidence = run.explanation.low_confidence;
    const std::string name = "replay" + std::to_string(level);
    run.score = score_scenario(name, level, run.timeline, run.truth, run.report,
                               marked_seconds(run.explanation.per_second, res.tau));
    detail::log_line(cfg, name + " accuracy " + fmt(run.score.accuracy) + ", " +
                              std::to_string(run.score.reported.size()) + " signals reported");
    names.push_back(name);
    errors.push_back(errs);
    labels.push_back(run.truth.per_second_labels());
    res.scenarios.push_back(std::move(run));
  }
  res.sweep = sweep_from_errors(names, errors, labels, table_thresholds(), w, cfg.metric);
  return res;
}

}  // namespace scram_xai
