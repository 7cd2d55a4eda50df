// Command-line front end: simulate, inject, train, finetune, calibrate,
// detect, explain, report and benchmark. Commands talk through files only.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scram_xai/scram_xai.hpp"

namespace fs = std::filesystem;
using namespace scram_xai;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAcceptance = 3;
constexpr int kExitNothingToExplain = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw IngestionError(what + " not found: " + path);
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_file(const std::string& path, const std::string& text) {
  ensure_parent(path);
  csv::write_text(path, text);
}

void log(const std::string& msg) { std::cerr << msg << '\n'; }

// ---------------------------------------------------------------------------
// Corpus on disk

struct Corpus {
  std::vector<MultivariateSeries> cycle_train, cycle_val, cycle_test;
  std::vector<MultivariateSeries> scram_train, scram_val;
};

std::string manifest_path(const RunConfig& cfg) { return cfg.data_dir + "/manifest.csv"; }

Corpus load_corpus(const RunConfig& cfg, bool with_cycles) {
  require_file(manifest_path(cfg), "manifest");
  const auto manifest = read_manifest(manifest_path(cfg));
  const auto cycles = manifest.of_kind("cycle");
  const auto scrams = manifest.of_kind("scram");
  Corpus c;
  auto read = [&](const ManifestEntry& e) {
    const std::string path = cfg.data_dir + "/" + e.file;
    require_file(path, "series");
    auto s = read_series_csv(path);
    if (e.kind == "scram") s.events.push_back({EventKind::Scram, e.onset});
    return s;
  };
  if (with_cycles) {
    const auto split = proportional_split(cycles.size(), cfg.cycle_split);
    if (split.size() < 2) throw ValidationError("cycle_split needs train/validation weights");
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      auto s = read(cycles[k]);
      if (k < split[0]) c.cycle_train.push_back(std::move(s));
      else if (k < split[0] + split[1]) c.cycle_val.push_back(std::move(s));
      else c.cycle_test.push_back(std::move(s));
    }
    if (c.cycle_train.empty()) throw InsufficientDataError("no training cycles in the manifest");
  }
  const auto split = proportional_split(scrams.size(), cfg.scram_split);
  if (split.size() < 2) throw ValidationError("scram_split needs train/validation weights");
  for (std::size_t k = 0; k < scrams.size(); ++k) {
    (k < split[0] ? c.scram_train : c.scram_val).push_back(read(scrams[k]));
  }
  if (c.scram_train.empty()) throw InsufficientDataError("no training SCRAMs in the manifest");
  return c;
}

std::vector<Matrix> encode_all(const std::vector<MultivariateSeries>& set) {
  std::vector<Matrix> out;
  for (const auto& s : set) out.push_back(encode(s));
  return out;
}

std::vector<Matrix> prepare_all(const std::vector<MultivariateSeries>& set, const Scaler& sc) {
  std::vector<Matrix> out;
  for (const auto& s : set) out.push_back(prepare(s, sc));
  return out;
}

std::vector<WindowTensor> windows(const std::vector<Matrix>& scaled, std::size_t w,
                                  std::size_t stride) {
  return detail::windows_of(scaled, w, stride);
}

AeModel load_model(const RunConfig& cfg) {
  require_file(cfg.checkpoint, "checkpoint");
  auto model = load(cfg.checkpoint);
  if (!model.scaler()) throw FormatError(cfg.checkpoint + ": checkpoint carries no scaler");
  return model;
}

void check_features(const AeModel& model, const Matrix& scaled, const std::string& path) {
  if (static_cast<std::size_t>(scaled.cols()) != model.architecture().features) {
    throw ShapeError(path + ": series has " + std::to_string(scaled.cols()) +
                     " features, checkpoint expects " +
                     std::to_string(model.architecture().features));
  }
}

// ---------------------------------------------------------------------------
// Calibration file: `epsilon = ...`, `tau_shap = ...`, `metric = ...`

struct Calibration {
  double epsilon = 0.0;
  std::optional<double> tau;
  Metric metric = Metric::Mae;
};

std::string calibration_text(const Calibration& c) {
  std::string out = "# detection threshold and attribution threshold\n";
  out += "epsilon = " + csv::format_number(c.epsilon) + '\n';
  if (c.tau) out += "tau_shap = " + csv::format_number(*c.tau) + '\n';
  out += "metric = " + std::string(metric_name(c.metric)) + '\n';
  return out;
}

Calibration read_calibration(const std::string& path) {
  require_file(path, "calibration file");
  const auto kv = parse_key_values(csv::read_lines(path), path);
  Calibration c;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    return it == kv.end() ? std::nullopt : std::optional(it->second);
  };
  const auto eps = get("epsilon");
  if (!eps) throw IngestionError(path + ": no epsilon entry");
  c.epsilon = csv::parse_number(*eps);
  if (const auto t = get("tau_shap")) c.tau = csv::parse_number(*t);
  if (const auto m = get("metric")) c.metric = parse_metric(*m);
  return c;
}

double resolve_threshold(const RunConfig& cfg) {
  if (cfg.threshold) return *cfg.threshold;
  return read_calibration(cfg.calibration).epsilon;
}

double resolve_tau(const RunConfig& cfg) {
  if (cfg.tau_shap) return *cfg.tau_shap;
  const auto c = read_calibration(cfg.calibration);
  if (!c.tau) throw IngestionError(cfg.calibration + ": no tau_shap entry");
  return *c.tau;
}

ExplainContext explain_context(const Corpus& c, const Scaler& sc) {
  std::vector<Matrix> scaled = prepare_all(c.cycle_train, sc);
  for (auto& m : prepare_all(c.scram_train, sc)) scaled.push_back(std::move(m));
  return {build_baseline(c.scram_train, sc), feature_mean(scaled)};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const RunConfig& cfg) {
  cfg.corpus.validate();
  fs::create_directories(cfg.data_dir);
  Manifest m;
  for (std::size_t k = 0; k < cfg.corpus.cycles; ++k) {
    const auto p = cycle_profile(cfg.corpus, k);
    char name[32];
    std::snprintf(name, sizeof name, "cycle_%03zu.csv", k);
    write_series_csv(cfg.data_dir + "/" + name, generate_full_cycle(p));
    m.entries.push_back({"cycle", name, p.seed, 0});
  }
  for (std::size_t k = 0; k < cfg.corpus.scrams; ++k) {
    const auto p = scram_profile(cfg.corpus, k);
    char name[32];
    std::snprintf(name, sizeof name, "scram_%03zu.csv", k);
    write_series_csv(cfg.data_dir + "/" + name, make_scram(cfg.corpus, p));
    m.entries.push_back({"scram", name, p.seed, p.onset});
  }
  write_file(manifest_path(cfg), manifest_to_csv(m));
  std::cout << "wrote " << cfg.corpus.cycles << " cycles and " << cfg.corpus.scrams
            << " SCRAMs to " << cfg.data_dir << '\n';
  return kExitOk;
}

int cmd_inject(const RunConfig& cfg, const std::string& input, int level, std::string output,
               std::string truth_path) {
  require_file(input, "input series");
  const auto series = read_series_csv(input);
  const auto [falsified, truth] = build_scenario(series, level, cfg.scenario);
  if (output.empty()) output = cfg.out_dir + "/replay" + std::to_string(level) + ".csv";
  if (truth_path.empty()) {
    truth_path = cfg.out_dir + "/replay" + std::to_string(level) + "_truth.csv";
  }
  ensure_parent(output);
  write_series_csv(output, falsified);
  write_file(truth_path, truth_to_csv(truth, series.start_time));
  std::cout << "Replay#" << level << " -> " << output << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const auto c = load_corpus(cfg, true);
  std::vector<Matrix> fit = encode_all(c.cycle_train);
  for (auto& m : encode_all(c.scram_train)) fit.push_back(std::move(m));
  const Scaler sc = fit_scaler(fit);

  AeModel model(cfg.architecture(), cfg.model_seed);
  model.set_scaler(sc);
  const auto w = model.architecture().window;
  const auto tr = windows(prepare_all(c.cycle_train, sc), w, cfg.cycle_stride);
  const auto va = c.cycle_val.empty() ? std::vector<WindowTensor>{}
                                      : windows(prepare_all(c.cycle_val, sc), w, cfg.cycle_stride);
  log("training on " + std::to_string(tr.size()) + " windows");
  const auto h = train(model, std::span<const WindowTensor>(tr), std::span<const WindowTensor>(va),
                       cfg.train, [](const EpochRecord& r) {
                         log("epoch " + std::to_string(r.epoch) + " train " + fmt(r.train_loss, 6) +
                             " val " + fmt(r.val_loss, 6));
                       });
  ensure_parent(cfg.checkpoint);
  save(model, cfg.checkpoint);
  write_file(cfg.out_dir + "/train_history.csv", history_to_csv(h));
  std::cout << "checkpoint " << cfg.checkpoint << '\n';
  return kExitOk;
}

int cmd_finetune(const RunConfig& cfg) {
  auto model = load_model(cfg);
  const auto c = load_corpus(cfg, false);
  const auto& sc = *model.scaler();
  const auto w = model.architecture().window;
  const auto tr = windows(prepare_all(c.scram_train, sc), w, cfg.scram_stride);
  const auto va = c.scram_val.empty() ? std::vector<WindowTensor>{}
                                      : windows(prepare_all(c.scram_val, sc), w, cfg.scram_stride);
  log("fine-tuning on " + std::to_string(tr.size()) + " windows");
  const auto h =
      finetune(model, std::span<const WindowTensor>(tr), std::span<const WindowTensor>(va),
               cfg.finetune, [](const EpochRecord& r) {
                 log("epoch " + std::to_string(r.epoch) + " train " + fmt(r.train_loss, 6) +
                     " val " + fmt(r.val_loss, 6));
               });
  save(model, cfg.checkpoint);
  write_file(cfg.out_dir + "/finetune_history.csv", history_to_csv(h));
  std::cout << "checkpoint " << cfg.checkpoint << '\n';
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg) {
  const auto model = load_model(cfg);
  const auto c = load_corpus(cfg, true);
  if (c.scram_val.empty()) throw InsufficientDataError("no validation SCRAMs to calibrate on");
  Calibration cal;
  cal.metric = cfg.metric;
  cal.epsilon = calibrate(model, c.scram_val, cfg.quantile, cfg.metric);
  const auto ctx = explain_context(c, *model.scaler());
  std::vector<PerSecondAttribution> normal;
  for (const auto& s : c.scram_val) {
    const auto tl = scan(model, s, cal.epsilon, cfg.metric);
    normal.push_back(
        explain(model, prepare(s, *model.scaler()), tl, ctx, s.scram_onset(), cfg.metric)
            .per_second);
  }
  try {
    cal.tau = calibrate_tau(normal, cfg.tau_quantile);
  } catch (const InsufficientDataError& e) {
    log(std::string("tau_shap not calibrated: ") + e.what());
  }
  write_file(cfg.calibration, calibration_text(cal));
  std::cout << calibration_text(cal);
  return kExitOk;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

int cmd_detect(const RunConfig& cfg, const std::vector<std::string>& inputs,
               const std::vector<std::string>& truths, bool sweep, std::string output,
               std::string hist_path, const std::string& svg_path) {
  if (inputs.empty()) throw UsageError("detect: --input is required");
  for (const auto& in : inputs) require_file(in, "input series");
  for (const auto& t : truths) require_file(t, "truth file");
  const auto model = load_model(cfg);

  if (sweep) {
    if (truths.size() > inputs.size()) throw UsageError("detect: more --truth than --input files");
    std::vector<LabeledDataset> data;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      LabeledDataset d{stem_of(inputs[k]), read_series_csv(inputs[k]), {}};
      check_features(model, encode(d.series), inputs[k]);
      if (k < truths.size()) {
        d.labels = read_truth_csv(truths[k]).per_second_labels();
        if (d.labels.size() != d.series.length()) {
          throw IngestionError(truths[k] + ": length differs from " + inputs[k]);
        }
      } else {
        d.labels.assign(d.series.length(), false);
      }
      data.push_back(std::move(d));
    }
    const auto table = sweep_thresholds(model, data, table_thresholds(), cfg.metric);
    if (output.empty()) output = cfg.out_dir + "/sweep.csv";
    write_file(output, sweep_to_csv(table));
    std::cout << sweep_to_csv(table);
    return kExitOk;
  }

  if (inputs.size() != 1) throw UsageError("detect: exactly one --input outside --sweep");
  const double eps = resolve_threshold(cfg);
  const auto series = read_series_csv(inputs[0]);
  check_features(model, encode(series), inputs[0]);
  const auto tl = scan(model, series, eps, cfg.metric);
  const std::string stem = stem_of(inputs[0]);
  if (output.empty()) output = cfg.out_dir + "/" + stem + "_timeline.csv";
  if (hist_path.empty()) hist_path = cfg.out_dir + "/" + stem + "_histogram.csv";
  write_file(output, timeline_to_csv(tl));
  write_file(hist_path, histogram_to_csv(histogram(tl.scored_errors(), cfg.histogram_bins, stem)));
  if (!svg_path.empty()) {
    write_file(svg_path, svg::render_timeline(prepare(series, *model.scaler()), tl));
  }
  std::cout << tl.flagged_seconds().size() << " of " << tl.scored_errors().size()
            << " scored seconds flagged at epsilon " << csv::format_number(eps) << '\n';
  return kExitOk;
}

int cmd_explain(const RunConfig& cfg, const std::string& input, const std::string& timeline_path,
                std::optional<std::size_t> onset_override, std::string output,
                std::string report_path, const std::string& svg_path) {
  if (input.empty() || timeline_path.empty()) {
    throw UsageError("explain: --input and --timeline are required");
  }
  require_file(input, "input series");
  require_file(timeline_path, "timeline");
  const auto model = load_model(cfg);
  const auto series = read_series_csv(input);
  const Matrix scaled = prepare(series, *model.scaler());
  check_features(model, scaled, input);
  const auto tl = read_timeline_csv(timeline_path, resolve_threshold(cfg), cfg.metric);
  if (tl.records.size() != series.length()) {
    throw IngestionError(timeline_path + ": timeline length differs from " + input);
  }
  if (tl.flagged_seconds().empty()) {
    std::cout << "nothing to explain: no flagged windows in " << timeline_path << '\n';
    return kExitNothingToExplain;
  }
  const double tau = resolve_tau(cfg);
  const auto c = load_corpus(cfg, true);
  const auto ctx = explain_context(c, *model.scaler());
  const auto onset = onset_override ? onset_override : detect_scram_onset(series);
  const auto ex = explain(model, scaled, tl, ctx, onset, cfg.metric);
  auto report = localize(ex.per_second, tau, cfg.min_run);
  report.low_confidence = ex.low_confidence;

  const std::string stem = stem_of(input);
  if (output.empty()) output = cfg.out_dir + "/" + stem + "_attribution.csv";
  if (report_path.empty()) report_path = cfg.out_dir + "/" + stem + "_report.txt";
  write_file(output, attribution_to_csv(ex.per_second, series.start_time));
  write_file(report_path, report_to_text(report, series.start_time));
  if (!svg_path.empty()) write_file(svg_path, svg::render_attribution(ex.per_second, tau));
  std::cout << report_to_text(report, series.start_time);
  return kExitOk;
}

// Reads clean_timeline.csv and replay<k>_{timeline,truth,attribution}.csv
// from the output directory.
int cmd_report(const RunConfig& cfg) {
  const double eps = resolve_threshold(cfg);
  const double tau = resolve_tau(cfg);
  auto path = [&](const std::string& name) {
    const std::string p = cfg.out_dir + "/" + name;
    require_file(p, "artifact");
    return p;
  };
  const auto clean = read_timeline_csv(path("clean_timeline.csv"), eps, cfg.metric);
  std::vector<ScenarioScore> scores{score_clean("clean", clean)};
  std::vector<Check> checks{{"clean accuracy", scores[0].accuracy >= cfg.limits.clean_accuracy,
                             fmt(scores[0].accuracy) + " >= " + fmt(cfg.limits.clean_accuracy, 2)}};
  std::string reports;
  for (int level = 1; level <= 6; ++level) {
    const std::string name = "replay" + std::to_string(level);
    const auto tl = read_timeline_csv(path(name + "_timeline.csv"), eps, cfg.metric);
    const auto truth = read_truth_csv(path(name + "_truth.csv"));
    if (truth.mask[0].size() != tl.records.size()) {
      throw IngestionError(name + ": truth and timeline lengths differ");
    }
    const auto ps =
        read_attribution_csv(path(name + "_attribution.csv"), tl.records.size(), tl.start_time);
    const auto report = localize(ps, tau, cfg.min_run);
    auto s = score_scenario(name, level, tl, truth, report, marked_seconds(ps, tau));
    for (auto& c : check_scenario(s, cfg.scenario.period * cfg.scenario.repeats, cfg.limits)) {
      checks.push_back(std::move(c));
    }
    reports += name + "\n" + report_to_text(report, tl.start_time) + "\n";
    scores.push_back(std::move(s));
  }
  const std::string text =
      scores_to_csv(scores) + "\n" + reports + checks_to_text(checks);
  write_file(cfg.out_dir + "/report.txt", text);
  std::cout << text;
  return all_pass(checks) ? kExitOk : kExitAcceptance;
}

int cmd_benchmark(const RunConfig& cfg) {
  auto b = cfg.benchmark();
  const auto t0 = std::chrono::steady_clock::now();
  b.log = [&](const std::string& m) {
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log("[" + fmt(s, 1) + " s] " + m);
  };
  const auto r = run_benchmark(b);
  const std::string& dir = cfg.out_dir;
  fs::create_directories(dir);
  {
    std::ofstream out(dir + "/model.ckpt", std::ios::binary | std::ios::trunc);
    out.write(r.checkpoint.data(), static_cast<std::streamsize>(r.checkpoint.size()));
  }
  write_file(dir + "/train_history.csv", history_to_csv(r.cycle_history));
  write_file(dir + "/finetune_history.csv", history_to_csv(r.scram_history));
  write_file(dir + "/calibration.txt",
             calibration_text({r.epsilon, r.tau, b.metric}));
  write_series_csv(dir + "/heldout.csv", r.heldout);
  write_file(dir + "/clean_timeline.csv", timeline_to_csv(r.clean_timeline));
  for (const auto& s : r.scenarios) {
    const std::string name = dir + "/replay" + std::to_string(s.level);
    write_series_csv(name + ".csv", s.series);
    write_file(name + "_truth.csv", truth_to_csv(s.truth, s.series.start_time));
    write_file(name + "_timeline.csv", timeline_to_csv(s.timeline));
    write_file(name + "_attribution.csv", attribution_to_csv(s.explanation.per_second));
    write_file(name + "_report.txt", report_to_text(s.report));
  }
  write_file(dir + "/sweep.csv", sweep_to_csv(r.sweep));

  auto checks = r.detection_checks(b.limits);
  for (auto& c : check_sweep(r.sweep, b.limits)) checks.push_back(std::move(c));
  const auto& first = r.scenarios.front();
  for (auto& c : check_pattern(first.explanation.per_second, kReplayOrder[0],
                               b.scenario.t_attack, b.scenario.period * b.scenario.repeats,
                               b.scenario.period, r.window, r.tau)) {
    checks.push_back(std::move(c));
  }
  const std::string text = r.summary() + checks_to_text(checks);
  write_file(dir + "/summary.txt", text);
  std::cout << text;
  return all_pass(checks) ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replay-attack detection and attribution for reactor SCRAM signals"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> metric;
  std::optional<double> threshold;
  bool desk = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "simulation and model initialisation seed");
  app.add_option("--metric", metric, "reconstruction error metric")
      ->check(CLI::IsMember({"mae", "mse"}));
  app.add_option("--threshold", threshold, "detection threshold epsilon");
  app.add_flag("--desk-scale", desk, "use the small architecture");

  auto* simulate = app.add_subcommand("simulate", "write the synthetic corpus and its manifest");

  auto* inject = app.add_subcommand("inject", "replay-attack a SCRAM series");
  std::string inject_input, inject_output, inject_truth;
  int level = 0;
  inject->add_option("--input", inject_input, "SCRAM series CSV")->required();
  inject->add_option("--level", level, "Replay#k, k in 1..6")->required();
  inject->add_option("--output", inject_output, "falsified series CSV");
  inject->add_option("--truth", inject_truth, "ground-truth CSV");

  auto* train_cmd = app.add_subcommand("train", "train on the manifest's cycles");
  auto* finetune_cmd = app.add_subcommand("finetune", "fine-tune on the manifest's SCRAMs");
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "derive epsilon and tau_shap from validation SCRAMs");

  auto* detect = app.add_subcommand("detect", "score a series window by window");
  std::vector<std::string> detect_inputs, detect_truths;
  std::string detect_output, detect_hist, detect_svg;
  bool sweep = false;
  detect->add_option("--input", detect_inputs, "series CSV (repeat in sweep mode)");
  detect->add_option("--truth", detect_truths, "ground truth per input, sweep mode");
  detect->add_flag("--sweep", sweep, "accuracy over the fixed threshold grid");
  detect->add_option("--output", detect_output, "timeline or sweep CSV");
  detect->add_option("--histogram", detect_hist, "error histogram CSV");
  detect->add_option("--svg", detect_svg, "timeline rendering");

  auto* explain_cmd = app.add_subcommand("explain", "attribute flagged windows to signals");
  std::string explain_input, explain_timeline, explain_output, explain_report, explain_svg;
  std::optional<std::size_t> onset;
  explain_cmd->add_option("--input", explain_input, "series CSV");
  explain_cmd->add_option("--timeline", explain_timeline, "timeline CSV from detect");
  explain_cmd->add_option("--onset", onset, "SCRAM onset second, overrides detection");
  explain_cmd->add_option("--output", explain_output, "attribution CSV");
  explain_cmd->add_option("--report", explain_report, "localization report");
  explain_cmd->add_option("--svg", explain_svg, "attribution rendering");

  auto* report_cmd = app.add_subcommand("report", "score scenario artifacts against the limits");
  auto* bench = app.add_subcommand("benchmark", "end-to-end synthetic benchmark");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      if (!fs::is_regular_file(config_path)) throw UsageError("config not found: " + config_path);
      cfg = load_config(config_path);
    }
    if (seed) cfg.corpus.seed = cfg.model_seed = *seed;
    if (metric) cfg.metric = parse_metric(*metric);
    if (threshold) cfg.threshold = *threshold;
    if (desk) cfg.desk_scale = true;

    if (*simulate) return cmd_simulate(cfg);
    if (*inject) {
      if (level < 1 || level > 6) throw UsageError("--level must be in 1..6");
      return cmd_inject(cfg, inject_input, level, inject_output, inject_truth);
    }
    if (*train_cmd) return cmd_train(cfg);
    if (*finetune_cmd) return cmd_finetune(cfg);
    if (*calibrate_cmd) return cmd_calibrate(cfg);
    if (*detect) {
      return cmd_detect(cfg, detect_inputs, detect_truths, sweep, detect_output, detect_hist,
                        detect_svg);
    }
    if (*explain_cmd) {
      return cmd_explain(cfg, explain_input, explain_timeline, onset, explain_output,
                         explain_report, explain_svg);
    }
    if (*report_cmd) return cmd_report(cfg);
    if (*bench) return cmd_benchmark(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const scram_xai::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const scram_xai::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
