#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scram_xai/autoencoder.hpp"
#include "scram_xai/csv.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/series.hpp"

namespace scram_xai {

enum class Metric { Mae, Mse };

inline std::string_view metric_name(Metric m) { return m == Metric::Mae ? "mae" : "mse"; }

inline Metric parse_metric(std::string_view s) {
  if (s == "mae") return Metric::Mae;
  if (s == "mse") return Metric::Mse;
  throw ValidationError("metric must be mae or mse, got '" + std::string(s) + "'");
}

// Mean absolute / squared difference over all w*p elements.
template <typename A, typename B>
double reconstruction_error(const Eigen::MatrixBase<A>& recon, const Eigen::MatrixBase<B>& target,
                            Metric metric) {
  if (recon.rows() != target.rows() || recon.cols() != target.cols()) {
    throw ShapeError("reconstruction_error: shapes differ");
  }
  if (metric == Metric::Mse) return loss_mse(recon, target);
  return static_cast<double>((recon.template cast<double>() - target.template cast<double>())
                                 .cwiseAbs()
                                 .sum()) /
         static_cast<double>(recon.size());
}

template <typename T>
double window_error(const Autoencoder<T>& model, const Matrix& window, Metric metric) {
  return reconstruction_error(model.reconstruct(window), window, metric);
}

// Errors of many windows, evaluated in batches.
template <typename T>
std::vector<double> window_errors(const Autoencoder<T>& model, std::span<const Matrix> windows,
                                  Metric metric, std::size_t chunk = 512) {
  std::vector<double> out;
  out.reserve(windows.size());
  for (std::size_t start = 0; start < windows.size(); start += chunk) {
    const auto part = windows.subspan(start, std::min(chunk, windows.size() - start));
    const auto recon = model.reconstruct_batch(part);
    for (std::size_t k = 0; k < part.size(); ++k) {
      out.push_back(reconstruction_error(recon[k], part[k], metric));
    }
  }
  return out;
}

struct TimelineRecord {
  std::size_t t = 0;
  double error = std::numeric_limits<double>::quiet_NaN();  // NaN while unscored
  bool flagged = false;
  bool scored = false;

  bool operator==(const TimelineRecord& o) const {
    return t == o.t && flagged == o.flagged && scored == o.scored &&
           (error == o.error || (std::isnan(error) && std::isnan(o.error)));
  }
};

// One record per second. Seconds before the first full window are unscored.
struct DetectionTimeline {
  std::vector<TimelineRecord> records;
  double threshold = 0.15;
  Metric metric = Metric::Mae;
  std::size_t warmup = 9;  // w - 1
  double start_time = 0.0;

  std::vector<double> scored_errors() const {
    std::vector<double> e;
    for (const auto& r : records) {
      if (r.scored) e.push_back(r.error);
    }
    return e;
  }

  std::vector<std::size_t> flagged_seconds() const {
    std::vector<std::size_t> out;
    for (const auto& r : records) {
      if (r.flagged) out.push_back(r.t);
    }
    return out;
  }

  bool operator==(const DetectionTimeline&) const = default;
};

// Error of the window ending at each second t >= w-1, NaN before.
template <typename T>
std::vector<double> series_errors(const Autoencoder<T>& model, const MultivariateSeries& series,
                                  Metric metric) {
  if (!model.scaler()) throw StateError("model has no fitted scaler attached");
  const std::size_t w = model.architecture().window;
  if (series.length() < w) {
    throw ValidationError("series of length " + std::to_string(series.length()) +
                          " is shorter than the window " + std::to_string(w));
  }
  const Matrix scaled = prepare(series, *model.scaler());
  std::vector<Matrix> windows;
  windows.reserve(series.length() - w + 1);
  for (const auto& win : windowize(scaled, w)) windows.push_back(win.values);
  const auto errs = window_errors(model, std::span<const Matrix>(windows), metric);
  std::vector<double> out(series.length(), std::numeric_limits<double>::quiet_NaN());
  std::copy(errs.begin(), errs.end(), out.begin() + static_cast<std::ptrdiff_t>(w - 1));
  return out;
}

// flagged(t) <=> error(t) > threshold, for every scored second.
inline DetectionTimeline make_timeline(const std::vector<double>& errors, std::size_t w,
                                       double threshold, Metric metric, double start_time = 0.0) {
  if (w == 0) throw ValidationError("window must be >= 1");
  DetectionTimeline tl;
  tl.threshold = threshold;
  tl.metric = metric;
  tl.warmup = w - 1;
  tl.start_time = start_time;
  tl.records.resize(errors.size());
  for (std::size_t t = 0; t < errors.size(); ++t) {
    auto& r = tl.records[t];
    r.t = t;
    if (t + 1 < w) continue;
    r.scored = true;
    r.error = errors[t];
    if (r.error < 0.0 || std::isnan(r.error)) {
      throw ValidationError("window errors must be finite and >= 0");
    }
    r.flagged = r.error > threshold;
  }
  return tl;
}

template <typename T>
DetectionTimeline scan(const Autoencoder<T>& model, const MultivariateSeries& series,
                       double threshold, Metric metric = Metric::Mae) {
  return make_timeline(series_errors(model, series, metric), model.architecture().window,
                       threshold, metric, series.start_time);
}

// `t,error,flag`; unscored seconds have empty error and flag cells.
inline std::string timeline_to_csv(const DetectionTimeline& tl) {
  std::string out = "t,error,flag\n";
  for (const auto& r : tl.records) {
    out += csv::format_number(tl.start_time + static_cast<double>(r.t));
    out += ',';
    if (r.scored) {
      out += csv::format_number(r.error);
      out += r.flagged ? ",1" : ",0";
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

// Reads a timeline back. Threshold and metric are not stored in the file.
inline DetectionTimeline read_timeline_csv(const std::string& path, double threshold,
                                           Metric metric) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || csv::trim(lines[0]) != "t,error,flag") {
    throw IngestionError(path + ": expected header t,error,flag");
  }
  DetectionTimeline tl;
  tl.threshold = threshold;
  tl.metric = metric;
  std::optional<std::size_t> first_scored;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = csv::split(lines[row]);
    if (cells.size() != 3) throw IngestionError(path + ": malformed row " + std::to_string(row));
    TimelineRecord r;
    r.t = row - 1;
    if (row == 1) tl.start_time = csv::parse_number(cells[0]);
    const auto flag = csv::trim(cells[2]);
    if (!flag.empty()) {
      if (flag != "0" && flag != "1") throw IngestionError(path + ": flag must be 0 or 1");
      r.scored = true;
      r.flagged = flag == "1";
      r.error = csv::parse_number(cells[1]);
      if (!first_scored) first_scored = r.t;
    }
    tl.records.push_back(r);
  }
  tl.warmup = first_scored.value_or(0);
  return tl;
}

struct ErrorHistogram {
  std::vector<double> edges;  // bins + 1 edges, uniform on [0, max error]
  std::vector<std::size_t> counts;
  std::string label;
};

inline ErrorHistogram histogram(const std::vector<double>& errors, std::size_t bins,
                                std::string label = {}) {
  if (bins == 0) throw ValidationError("histogram: bins must be >= 1");
  if (errors.empty()) throw ValidationError("histogram: no errors to bin");
  const double max_error = *std::max_element(errors.begin(), errors.end());
  const double upper = max_error > 0.0 ? max_error : 1.0;
  ErrorHistogram h;
  h.label = std::move(label);
  h.counts.assign(bins, 0);
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges.push_back(upper * static_cast<double>(k) / static_cast<double>(bins));
  }
  for (double e : errors) {
    auto k = static_cast<std::size_t>(e / upper * static_cast<double>(bins));
    h.counts[std::min(k, bins - 1)] += 1;
  }
  return h;
}

inline std::string histogram_to_csv(const ErrorHistogram& h) {
  std::string out = "bin_left,bin_right,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out += csv::format_number(h.edges[k]) + ',' + csv::format_number(h.edges[k + 1]) + ',' +
           std::to_string(h.counts[k]) + '\n';
  }
  return out;
}

// Fraction of scored seconds whose flag equals the label.
inline double per_second_accuracy(const DetectionTimeline& tl, const std::vector<bool>& labels) {
  if (labels.size() != tl.records.size()) {
    throw ValidationError("per_second_accuracy: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(tl.records.size()) + " seconds");
  }
  std::size_t scored = 0;
  std::size_t agree = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!tl.records[t].scored) continue;
    ++scored;
    if (tl.records[t].flagged == labels[t]) ++agree;
  }
  if (scored == 0) throw ValidationError("per_second_accuracy: no scored seconds");
  return static_cast<double>(agree) / static_cast<double>(scored);
}

// Threshold grid of the published accuracy table.
inline const std::vector<double>& table_thresholds() {
  static const std::vector<double> grid = {0.05, 0.1, 0.11, 0.12, 0.13, 0.14, 0.15, 0.2, 0.25};
  return grid;
}

struct LabeledDataset {
  std::string name;
  MultivariateSeries series;
  std::vector<bool> labels;  // per second; all false for normal data
};

struct SweepTable {
  std::vector<double> thresholds;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> accuracy;  // [threshold][dataset]
};

// Accuracy table from precomputed per-second errors (one vector per dataset).
inline SweepTable sweep_from_errors(const std::vector<std::string>& names,
                                    const std::vector<std::vector<double>>& errors,
                                    const std::vector<std::vector<bool>>& labels,
                                    const std::vector<double>& thresholds, std::size_t w,
                                    Metric metric) {
  if (thresholds.empty()) throw ValidationError("sweep: no thresholds given");
  SweepTable table{thresholds, names, {}};
  for (double eps : thresholds) {
    std::vector<double> row;
    for (std::size_t d = 0; d < errors.size(); ++d) {
      row.push_back(per_second_accuracy(make_timeline(errors[d], w, eps, metric), labels[d]));
    }
    table.accuracy.push_back(std::move(row));
  }
  return table;
}

template <typename T>
SweepTable sweep_thresholds(const Autoencoder<T>& model, const std::vector<LabeledDataset>& data,
                            const std::vector<double>& thresholds, Metric metric = Metric::Mae) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> errors;
  std::vector<std::vector<bool>> labels;
  for (const auto& d : data) {
    names.push_back(d.name);
    errors.push_back(series_errors(model, d.series, metric));
    labels.push_back(d.labels);
  }
  return sweep_from_errors(names, errors, labels, thresholds, model.architecture().window, metric);
}

// Rows = thresholds, columns = datasets.
inline std::string sweep_to_csv(const SweepTable& table) {
  std::string out = "threshold";
  for (const auto& n : table.datasets) out += ',' + n;
  out += '\n';
  for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
    out += csv::format_number(table.thresholds[i]);
    for (double a : table.accuracy[i]) out += ',' + csv::format_number(a);
    out += '\n';
  }
  return out;
}

// Smallest value v in `values` with at least ceil(q * n) entries <= v.
inline double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("quantile must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

// Threshold = the target quantile of window errors on normal data.
template <typename T>
double calibrate(const Autoencoder<T>& model, const std::vector<MultivariateSeries>& normal,
                 double quantile = 0.97, Metric metric = Metric::Mae) {
  if (normal.empty()) throw ValidationError("calibrate: empty validation set");
  std::vector<double> all;
  for (const auto& s : normal) {
    for (double e : series_errors(model, s, metric)) {
      if (!std::isnan(e)) all.push_back(e);
    }
  }
  return empirical_quantile(std::move(all), quantile);
}

}  // namespace scram_xai
