#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scram_xai/anomaly_detector.hpp"
#include "scram_xai/autoencoder.hpp"
#include "scram_xai/csv.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/series.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai {

// Expected normalized behaviour around a SCRAM. Row o of `values` is the
// corpus mean at onset + o; every offset before onset maps to `plateau`.
struct BaselineTrajectory {
  Vector plateau;
  Matrix values;
  std::size_t source_count = 0;

  Eigen::Index features() const { return plateau.size(); }
  std::size_t coverage() const { return static_cast<std::size_t>(values.rows()); }

  Vector at(std::ptrdiff_t offset) const {
    if (offset < 0) return plateau;
    if (static_cast<std::size_t>(offset) >= coverage()) {
      throw AlignmentError("baseline covers offsets up to " + std::to_string(coverage() - 1) +
                           ", requested " + std::to_string(offset));
    }
    return values.row(offset).transpose();
  }

  // Baseline rows for the absolute seconds [end - w + 1, end] of a series
  // whose event started at `onset`.
  Matrix slice(std::size_t end, std::size_t w, std::size_t onset) const {
    if (w == 0 || end + 1 < w) throw AlignmentError("baseline slice: window starts before t=0");
    Matrix out(static_cast<Eigen::Index>(w), features());
    for (std::size_t k = 0; k < w; ++k) {
      const auto t = static_cast<std::ptrdiff_t>(end + 1 - w + k);
      out.row(static_cast<Eigen::Index>(k)) = at(t - static_cast<std::ptrdiff_t>(onset)).transpose();
    }
    return out;
  }
};

// Averages normalized SCRAMs aligned on their onsets. Coverage stops at the
// shortest post-onset tail in the corpus.
inline BaselineTrajectory build_baseline(std::span<const MultivariateSeries> corpus,
                                         const Scaler& scaler) {
  if (corpus.empty()) throw ValidationError("build_baseline: empty SCRAM corpus");
  std::vector<Matrix> scaled;
  std::vector<std::size_t> onsets;
  std::size_t tail = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto onset = corpus[k].scram_onset();
    if (!onset) {
      throw ValidationError("build_baseline: series " + std::to_string(k) +
                            " carries no SCRAM onset");
    }
    if (*onset == 0 || *onset >= corpus[k].length()) {
      throw ValidationError("build_baseline: series " + std::to_string(k) +
                            " needs at least one pre-onset second");
    }
    scaled.push_back(prepare(corpus[k], scaler));
    onsets.push_back(*onset);
    tail = std::min(tail, corpus[k].length() - *onset);
  }

  const Eigen::Index p = scaler.features();
  BaselineTrajectory b;
  b.source_count = corpus.size();
  b.plateau = Vector::Zero(p);
  b.values = Matrix::Zero(static_cast<Eigen::Index>(tail), p);
  const double n = static_cast<double>(corpus.size());
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    const auto on = static_cast<Eigen::Index>(onsets[k]);
    b.plateau += scaled[k].topRows(on).colwise().mean().transpose() / n;
    b.values += scaled[k].middleRows(on, static_cast<Eigen::Index>(tail)) / n;
  }
  return b;
}

// Per-feature mean over a set of normalized matrices.
inline Vector feature_mean(std::span<const Matrix> corpus) {
  if (corpus.empty()) throw ValidationError("feature_mean: empty corpus");
  Vector sum = Vector::Zero(corpus.front().cols());
  double rows = 0.0;
  for (const auto& m : corpus) {
    if (m.cols() != sum.size()) throw ShapeError("feature_mean: feature counts differ");
    sum += m.colwise().sum().transpose();
    rows += static_cast<double>(m.rows());
  }
  if (rows == 0.0) throw ValidationError("feature_mean: corpus has no rows");
  return sum / rows;
}

// Signals whose bit is set in `coalition` keep the observed values.
inline Matrix hybrid_window(const Matrix& observed, const Matrix& reference,
                            std::uint32_t coalition) {
  if (observed.rows() != reference.rows() || observed.cols() != reference.cols()) {
    throw AlignmentError("baseline slice does not match the window shape");
  }
  Matrix out = reference;
  for (Eigen::Index j = 0; j < observed.cols(); ++j) {
    if (coalition & (1u << j)) out.col(j) = observed.col(j);
  }
  return out;
}

template <typename T>
double payoff(const Autoencoder<T>& model, const Matrix& window, std::uint32_t coalition,
              const Matrix& reference, Metric metric) {
  return window_error(model, hybrid_window(window, reference, coalition), metric);
}

// s!(p-s-1)!/p! for s = 0..p-1.
inline std::vector<double> shapley_weights(std::size_t p) {
  std::vector<double> w(p);
  for (std::size_t s = 0; s < p; ++s) {
    double binom = 1.0;  // C(p-1, s)
    for (std::size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(p - k) / static_cast<double>(k);
    }
    w[s] = 1.0 / (static_cast<double>(p) * binom);
  }
  return w;
}

// Exact Shapley values from a full payoff table indexed by coalition bitmask.
inline std::vector<double> shapley_from_payoff(std::span<const double> v, std::size_t p) {
  if (p == 0 || p > 30 || v.size() != (std::size_t{1} << p)) {
    throw ValidationError("shapley_from_payoff: table must hold 2^p entries");
  }
  const auto weights = shapley_weights(p);
  std::vector<double> phi(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (s & bit) continue;
      phi[i] += weights[static_cast<std::size_t>(std::popcount(s))] * (v[s | bit] - v[s]);
    }
  }
  return phi;
}

inline constexpr std::size_t kDefaultExhaustiveLimit = 16;

struct ShapleyAttribution {
  std::size_t end = 0;       // window end second
  std::vector<double> phi;   // one value per signal
  double v_full = 0.0;       // observed-window error
  double v_empty = 0.0;      // reference-window error
  std::size_t evaluations = 0;
};

// Shapley values of the window error with whole-signal players. Coalitions
// that differ only in signals whose observed slice equals the reference give
// identical hybrids, so they share one evaluation.
template <typename T>
ShapleyAttribution exact_shapley(const Autoencoder<T>& model, const Matrix& window,
                                 const Matrix& reference, Metric metric, std::size_t end = 0,
                                 std::size_t exhaustive_limit = kDefaultExhaustiveLimit) {
  const auto p = static_cast<std::size_t>(window.cols());
  if (p > exhaustive_limit) {
    throw ValidationError("exact Shapley enumeration refused for " + std::to_string(p) +
                          " players (limit " + std::to_string(exhaustive_limit) +
                          "); use a permutation-sampling estimator instead");
  }
  if (reference.rows() != window.rows() || reference.cols() != window.cols()) {
    throw AlignmentError("baseline slice does not match the window shape");
  }
  std::uint32_t active = 0;
  for (std::size_t j = 0; j < p; ++j) {
    if (window.col(static_cast<Eigen::Index>(j)) != reference.col(static_cast<Eigen::Index>(j))) {
      active |= 1u << j;
    }
  }

  const std::size_t n = std::size_t{1} << p;
  std::vector<std::uint32_t> distinct;
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::uint32_t s = 0; s < n; ++s) {
    const std::uint32_t key = s & active;
    if (slot.emplace(key, distinct.size()).second) distinct.push_back(key);
  }

  std::vector<double> values(distinct.size());
  constexpr std::size_t kChunk = 512;
  std::vector<Matrix> hybrids;
  for (std::size_t start = 0; start < distinct.size(); start += kChunk) {
    const std::size_t stop = std::min(distinct.size(), start + kChunk);
    hybrids.clear();
    for (std::size_t k = start; k < stop; ++k) {
      hybrids.push_back(hybrid_window(window, reference, distinct[k]));
    }
    const auto errs = window_errors(model, std::span<const Matrix>(hybrids), metric, kChunk);
    std::copy(errs.begin(), errs.end(), values.begin() + static_cast<std::ptrdiff_t>(start));
  }

  std::vector<double> v(n);
  for (std::uint32_t s = 0; s < n; ++s) v[s] = values[slot.at(s & active)];

  ShapleyAttribution a;
  a.end = end;
  a.phi = shapley_from_payoff(v, p);
  a.v_full = v[n - 1];
  a.v_empty = v[0];
  a.evaluations = distinct.size();
  return a;
}

// Per second t, the mean attribution over windows whose span contains t.
// Uncovered seconds hold NaN and count 0.
struct PerSecondAttribution {
  Matrix phi;                      // length x p
  std::vector<std::size_t> count;  // windows covering each second

  std::size_t length() const { return count.size(); }
  bool defined(std::size_t t) const { return count[t] > 0; }
};

inline PerSecondAttribution aggregate_per_second(std::span<const ShapleyAttribution> attributions,
                                                 std::size_t w, std::size_t length,
                                                 std::size_t features = kSignalCount) {
  if (w == 0) throw ValidationError("aggregate_per_second: window must be >= 1");
  PerSecondAttribution out;
  out.phi = Matrix::Zero(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(features));
  out.count.assign(length, 0);
  for (const auto& a : attributions) {
    if (a.phi.size() != features) throw ShapeError("aggregate_per_second: feature count differs");
    if (a.end >= length || a.end + 1 < w) {
      throw BoundsError("aggregate_per_second: window ending at " + std::to_string(a.end) +
                        " lies outside the series");
    }
    for (std::size_t t = a.end + 1 - w; t <= a.end; ++t) {
      for (std::size_t j = 0; j < features; ++j) {
        out.phi(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) += a.phi[j];
      }
      ++out.count[t];
    }
  }
  for (std::size_t t = 0; t < length; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    if (out.count[t] == 0) {
      out.phi.row(row).setConstant(std::numeric_limits<double>::quiet_NaN());
    } else {
      out.phi.row(row) /= static_cast<double>(out.count[t]);
    }
  }
  return out;
}

// marked(t, j) <=> per-second value of signal j at t exceeds tau.
inline std::vector<std::vector<bool>> marked_seconds(const PerSecondAttribution& ps, double tau) {
  const auto p = static_cast<std::size_t>(ps.phi.cols());
  std::vector<std::vector<bool>> marks(p, std::vector<bool>(ps.length(), false));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t t = 0; t < ps.length(); ++t) {
      // NaN compares false, so uncovered seconds are never marked.
      marks[j][t] = ps.phi(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) > tau;
    }
  }
  return marks;
}

struct SignalVerdict {
  bool replayed = false;
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t marked = 0;  // marked seconds inside qualifying runs

  std::size_t duration() const { return replayed ? end - start + 1 : 0; }
  bool operator==(const SignalVerdict&) const = default;
};

struct LocalizationReport {
  std::vector<SignalVerdict> signals;  // one per feature, Table 1 order
  bool low_confidence = false;         // occlusion used the training mean

  std::size_t replayed_count() const {
    return static_cast<std::size_t>(
        std::count_if(signals.begin(), signals.end(), [](const auto& s) { return s.replayed; }));
  }

  std::optional<std::size_t> attack_start() const {
    std::optional<std::size_t> v;
    for (const auto& s : signals) {
      if (s.replayed) v = v ? std::min(*v, s.start) : s.start;
    }
    return v;
  }

  std::optional<std::size_t> attack_end() const {
    std::optional<std::size_t> v;
    for (const auto& s : signals) {
      if (s.replayed) v = v ? std::max(*v, s.end) : s.end;
    }
    return v;
  }

  std::vector<SignalId> replayed_signals() const {
    std::vector<SignalId> out;
    for (std::size_t j = 0; j < signals.size() && j < kSignalCount; ++j) {
      if (signals[j].replayed) out.push_back(kAllSignals[j]);
    }
    return out;
  }

  bool operator==(const LocalizationReport&) const = default;
};

inline constexpr std::size_t kDefaultMinRun = 5;

// A signal counts as replayed if it is marked for at least min_run consecutive
// seconds. Start and end span the qualifying runs only, so isolated spikes do
// not stretch the reported interval.
inline LocalizationReport localize(const PerSecondAttribution& ps, double tau,
                                   std::size_t min_run = kDefaultMinRun) {
  if (!(tau > 0.0)) throw ValidationError("localize: tau_shap must be > 0");
  if (min_run == 0) throw ValidationError("localize: min_run must be >= 1");
  const auto marks = marked_seconds(ps, tau);
  LocalizationReport report;
  for (const auto& m : marks) {
    SignalVerdict v;
    std::size_t t = 0;
    while (t < m.size()) {
      if (!m[t]) {
        ++t;
        continue;
      }
      std::size_t stop = t;
      while (stop < m.size() && m[stop]) ++stop;
      if (stop - t >= min_run) {
        if (!v.replayed) v.start = t;
        v.replayed = true;
        v.end = stop - 1;
        v.marked += stop - t;
      }
      t = stop;
    }
    report.signals.push_back(v);
  }
  return report;
}

// Fraction of the truly falsified seconds of one signal that are marked.
inline double identified_fraction(const std::vector<bool>& marked,
                                  const std::vector<std::uint8_t>& truth) {
  if (marked.size() != truth.size()) {
    throw ValidationError("identified_fraction: mark and truth lengths differ");
  }
  std::size_t total = 0;
  std::size_t hit = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!truth[t]) continue;
    ++total;
    if (marked[t]) ++hit;
  }
  if (total == 0) throw InsufficientDataError("identified_fraction: signal was never falsified");
  return static_cast<double>(hit) / static_cast<double>(total);
}

// Lag-T autocorrelation of the attribution plateau, clamped to [0, 1].
// The plateau is the span, inside the region above `floor`, whose ends reach
// within `band` of the peak. A centered moving average of length T is
// subtracted first so that the slow build-up does not dominate; what remains
// of a verbatim replay repeats every T seconds and scores near 1.
inline double replay_signature_score(const PerSecondAttribution& ps, SignalId signal,
                                     std::size_t period,
                                     double floor = -std::numeric_limits<double>::infinity(),
                                     double band = 0.1) {
  if (period == 0) throw ValidationError("replay_signature_score: period must be >= 1");
  if (!(band >= 0.0 && band < 1.0)) {
    throw ValidationError("replay_signature_score: band must lie in [0, 1)");
  }
  const auto j = static_cast<Eigen::Index>(index_of(signal));
  if (j >= ps.phi.cols()) throw ShapeError("replay_signature_score: signal out of range");
  auto value = [&](std::size_t t) { return ps.phi(static_cast<Eigen::Index>(t), j); };
  auto above = [&](std::size_t t, double level) { return ps.defined(t) && value(t) > level; };

  std::optional<std::size_t> first;
  std::size_t last = 0;
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ps.length(); ++t) {
    if (!above(t, floor)) continue;
    if (!first) first = t;
    last = t;
    peak = std::max(peak, value(t));
  }
  if (!first) throw InsufficientDataError("replay_signature_score: no seconds above the floor");
  const double level = peak - band * std::abs(peak);
  std::size_t lo = *first;
  std::size_t hi = last;
  while (lo < hi && !(ps.defined(lo) && value(lo) >= level)) ++lo;
  while (hi > lo && !(ps.defined(hi) && value(hi) >= level)) --hi;
  const std::size_t span = hi - lo + 1;
  if (span < 2 * period) {
    throw InsufficientDataError("replay_signature_score: plateau spans " + std::to_string(span) +
                                " s, need at least " + std::to_string(2 * period));
  }

  // Centered moving average; an even period uses half weights at both ends.
  const std::size_t h = period / 2;
  std::vector<double> resid(span, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t t = lo + h; t + h <= hi; ++t) {
    double sum = 0.0;
    bool ok = true;
    for (std::size_t u = t - h; u <= t + h; ++u) {
      if (!ps.defined(u)) {
        ok = false;
        break;
      }
      const double wgt = (period % 2 == 0 && (u == t - h || u == t + h)) ? 0.5 : 1.0;
      sum += wgt * value(u);
    }
    if (ok) resid[t - lo] = value(t) - sum / static_cast<double>(period);
  }

  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t k = 0; k + period < span; ++k) {
    if (std::isnan(resid[k]) || std::isnan(resid[k + period])) continue;
    a.push_back(resid[k]);
    b.push_back(resid[k + period]);
  }
  if (a.size() < 2) throw InsufficientDataError("replay_signature_score: no lagged pairs");
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k] / n;
    mb += b[k] / n;
  }
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  const double scale = std::max(saa, sbb);
  if (scale <= 1e-24 * std::max(1.0, ma * ma + mb * mb)) return 1.0;
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), 0.0, 1.0);
}

// Occlusion reference: the event-aligned baseline, or the training mean when
// the series has no SCRAM onset.
struct ExplainContext {
  BaselineTrajectory baseline;
  Vector fallback_mean;
};

struct Explanation {
  std::vector<ShapleyAttribution> attributions;
  PerSecondAttribution per_second;
  bool low_confidence = false;
};

// Attributes every flagged window of a scanned series. `scaled` is the
// encoded, scaled series the timeline was computed from.
template <typename T>
Explanation explain(const Autoencoder<T>& model, const Matrix& scaled,
                    const DetectionTimeline& timeline, const ExplainContext& ctx,
                    std::optional<std::size_t> onset, Metric metric) {
  const std::size_t w = model.architecture().window;
  const auto length = static_cast<std::size_t>(scaled.rows());
  if (timeline.records.size() != length) {
    throw ValidationError("explain: timeline covers " + std::to_string(timeline.records.size()) +
                          " seconds, series has " + std::to_string(length));
  }
  Explanation out;
  out.low_confidence = !onset.has_value();
  if (!onset && ctx.fallback_mean.size() != scaled.cols()) {
    throw ValidationError("explain: no onset and no training-mean fallback available");
  }
  for (const auto& r : timeline.records) {
    if (!r.flagged) continue;
    if (r.t + 1 < w) throw AlignmentError("explain: flagged second precedes the first window");
    const Matrix window = scaled.middleRows(static_cast<Eigen::Index>(r.t + 1 - w),
                                            static_cast<Eigen::Index>(w));
    const Matrix reference =
        onset ? ctx.baseline.slice(r.t, w, *onset)
              : Matrix(ctx.fallback_mean.transpose().replicate(static_cast<Eigen::Index>(w), 1));
    out.attributions.push_back(exact_shapley(model, window, reference, metric, r.t));
  }
  out.per_second =
      aggregate_per_second(out.attributions, w, length, static_cast<std::size_t>(scaled.cols()));
  return out;
}

// tau_shap = the q-quantile of per-second |phi| pooled over signals and over
// the explained normal series.
inline double calibrate_tau(std::span<const PerSecondAttribution> normal, double quantile = 0.999) {
  std::vector<double> values;
  for (const auto& ps : normal) {
    for (std::size_t t = 0; t < ps.length(); ++t) {
      if (!ps.defined(t)) continue;
      for (Eigen::Index j = 0; j < ps.phi.cols(); ++j) {
        values.push_back(std::abs(ps.phi(static_cast<Eigen::Index>(t), j)));
      }
    }
  }
  if (values.empty()) {
    throw InsufficientDataError("calibrate_tau: no flagged windows in the normal data");
  }
  return empirical_quantile(std::move(values), quantile);
}

// `t,<signal>,phi` long format, covered seconds only.
inline std::string attribution_to_csv(const PerSecondAttribution& ps, double start_time = 0.0) {
  std::string out = "t,signal,phi\n";
  for (std::size_t t = 0; t < ps.length(); ++t) {
    if (!ps.defined(t)) continue;
    for (Eigen::Index j = 0; j < ps.phi.cols(); ++j) {
      out += csv::format_number(start_time + static_cast<double>(t)) + ',' +
             std::string(kSignalNames[static_cast<std::size_t>(j)]) + ',' +
             csv::format_number(ps.phi(static_cast<Eigen::Index>(t), j)) + '\n';
    }
  }
  return out;
}

// Inverse of attribution_to_csv for a series of `length` seconds. Seconds
// absent from the file are uncovered; their coverage count is unknown and
// present seconds get a count of 1.
inline PerSecondAttribution read_attribution_csv(const std::string& path, std::size_t length,
                                                 double start_time = 0.0) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || csv::trim(lines[0]) != "t,signal,phi") {
    throw IngestionError(path + ": expected header t,signal,phi");
  }
  PerSecondAttribution ps;
  ps.phi = Matrix::Constant(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(kSignalCount),
                            std::numeric_limits<double>::quiet_NaN());
  ps.count.assign(length, 0);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = csv::split(lines[row]);
    if (cells.size() != 3) throw IngestionError(path + ": malformed row " + std::to_string(row));
    const double rel = csv::parse_number(cells[0]) - start_time;
    if (!(rel >= 0.0) || rel != std::floor(rel) || rel >= static_cast<double>(length)) {
      throw IngestionError(path + ": second " + std::string(cells[0]) + " outside the series");
    }
    const auto id = signal_from_name(csv::trim(cells[1]));
    if (!id) throw IngestionError(path + ": unknown signal " + std::string(cells[1]));
    const auto t = static_cast<std::size_t>(rel);
    ps.phi(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(index_of(*id))) =
        csv::parse_number(cells[2]);
    ps.count[t] = 1;
  }
  for (std::size_t t = 0; t < length; ++t) {
    if (ps.count[t] && ps.phi.row(static_cast<Eigen::Index>(t)).hasNaN()) {
      throw IngestionError(path + ": second " + std::to_string(t) + " lacks some signals");
    }
  }
  return ps;
}

// One `signal,replayed,start,end,duration` line per signal, then
// `signals_replayed=<k>,<attack_start>,<attack_end>`. Seconds are absolute.
inline std::string report_to_text(const LocalizationReport& r, double start_time = 0.0) {
  auto when = [&](std::size_t t) { return csv::format_number(start_time + static_cast<double>(t)); };
  std::string out;
  for (std::size_t j = 0; j < r.signals.size(); ++j) {
    const auto& s = r.signals[j];
    out += std::string(kSignalNames[j]) + ',' + (s.replayed ? "1" : "0") + ',';
    if (s.replayed) out += when(s.start) + ',' + when(s.end) + ',' + std::to_string(s.duration());
    else out += ",,0";
    out += '\n';
  }
  out += "signals_replayed=" + std::to_string(r.replayed_count()) + ',';
  if (const auto a = r.attack_start()) out += when(*a);
  out += ',';
  if (const auto e = r.attack_end()) out += when(*e);
  out += '\n';
  if (r.low_confidence) out += "confidence=low\n";
  return out;
}

}  // namespace scram_xai
