#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scram_xai/csv.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/series.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai {

// Verbatim copy of k signals over [t_start, t_start + period).
struct RecordedSegment {
  std::vector<SignalId> signals;
  std::size_t t_start = 0;
  std::size_t period = 0;
  std::vector<std::vector<double>> values;  // values[j] belongs to signals[j]
};

struct AttackSpec {
  RecordedSegment segment;
  std::size_t t_attack = 0;
  std::size_t repeats = 1;  // N; N == 1 is a delay attack

  std::size_t length() const { return repeats * segment.period; }
};

struct AttackGroundTruth {
  std::array<std::vector<std::uint8_t>, kSignalCount> mask;  // 1 = overwritten
  AttackSpec spec;

  bool falsified(SignalId id, std::size_t t) const { return mask[index_of(id)][t] != 0; }

  // A second is anomalous iff any signal is falsified at it.
  std::vector<bool> per_second_labels() const {
    std::vector<bool> labels(mask[0].size(), false);
    for (const auto& m : mask) {
      for (std::size_t t = 0; t < m.size(); ++t) labels[t] = labels[t] || m[t] != 0;
    }
    return labels;
  }
};

inline RecordedSegment record(const MultivariateSeries& series, std::vector<SignalId> signals,
                              std::size_t t_start, std::size_t period) {
  if (signals.empty()) throw ValidationError("record: at least one signal is required");
  if (signals.size() > kSignalCount) throw ValidationError("record: more than nine signals");
  if (period == 0) throw BoundsError("record: period T must be >= 1");
  if (t_start + period > series.length()) {
    throw BoundsError("record: interval [" + std::to_string(t_start) + ", " +
                      std::to_string(t_start + period) + ") exceeds series length " +
                      std::to_string(series.length()));
  }
  RecordedSegment seg{std::move(signals), t_start, period, {}};
  for (auto id : seg.signals) {
    const auto& col = series.column(id);
    seg.values.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(t_start),
                            col.begin() + static_cast<std::ptrdiff_t>(t_start + period));
  }
  return seg;
}

// Overwrites every targeted signal on [t_attack, t_attack + N*T) with the
// recorded values tiled N times. Everything else is copied unchanged.
inline std::pair<MultivariateSeries, AttackGroundTruth> inject(const MultivariateSeries& series,
                                                               const AttackSpec& spec) {
  const auto& seg = spec.segment;
  if (seg.period == 0 || spec.repeats == 0) throw BoundsError("inject: empty attack interval");
  if (seg.values.size() != seg.signals.size()) {
    throw ValidationError("inject: segment values do not match its signal list");
  }
  for (const auto& v : seg.values) {
    if (v.size() != seg.period) throw ValidationError("inject: segment length differs from T");
  }
  if (spec.t_attack + spec.length() > series.length()) {
    throw BoundsError("inject: attack interval [" + std::to_string(spec.t_attack) + ", " +
                      std::to_string(spec.t_attack + spec.length()) +
                      ") overflows series length " + std::to_string(series.length()));
  }

  MultivariateSeries falsified = series;
  AttackGroundTruth truth;
  truth.spec = spec;
  for (auto& m : truth.mask) m.assign(series.length(), 0);

  for (std::size_t k = 0; k < seg.signals.size(); ++k) {
    auto& col = falsified.column(seg.signals[k]);
    auto& m = truth.mask[index_of(seg.signals[k])];
    for (std::size_t j = 0; j < spec.length(); ++j) {
      col[spec.t_attack + j] = seg.values[k][j % seg.period];
      m[spec.t_attack + j] = 1;
    }
  }
  return {std::move(falsified), std::move(truth)};
}

struct ScenarioParams {
  std::size_t t_start = 250;
  std::size_t period = 20;
  std::size_t t_attack = 300;
  std::size_t repeats = 5;
};

inline std::vector<SignalId> scenario_targets(int level) {
  if (level < 1 || level > static_cast<int>(kReplayOrder.size())) {
    throw ValidationError("scenario level must be in 1..6, got " + std::to_string(level));
  }
  return {kReplayOrder.begin(), kReplayOrder.begin() + level};
}

// Replay#<level>: the first `level` signals of the fixed replay ordering are
// recorded in pre-SCRAM steady state and replayed over the SCRAM.
inline std::pair<MultivariateSeries, AttackGroundTruth> build_scenario(
    const MultivariateSeries& base_scram, int level, const ScenarioParams& params = {}) {
  auto targets = scenario_targets(level);
  AttackSpec spec{record(base_scram, std::move(targets), params.t_start, params.period),
                  params.t_attack, params.repeats};
  return inject(base_scram, spec);
}

// Sidecar ground truth: `t,signal,falsified` rows, one per second per signal.
inline std::string truth_to_csv(const AttackGroundTruth& truth, double start_time = 0.0) {
  std::string out = "t,signal,falsified\n";
  const std::size_t n = truth.mask[0].size();
  for (std::size_t t = 0; t < n; ++t) {
    const std::string ts = csv::format_number(start_time + static_cast<double>(t));
    for (std::size_t s = 0; s < kSignalCount; ++s) {
      out += ts;
      out += ',';
      out += kSignalNames[s];
      out += truth.mask[s][t] ? ",1\n" : ",0\n";
    }
  }
  return out;
}

// Reads the mask back; the attack spec is not part of the file.
inline AttackGroundTruth read_truth_csv(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || csv::trim(lines[0]) != "t,signal,falsified") {
    throw IngestionError(path + ": expected header t,signal,falsified");
  }
  if ((lines.size() - 1) % kSignalCount != 0) {
    throw IngestionError(path + ": row count is not a multiple of the signal count");
  }
  const std::size_t n = (lines.size() - 1) / kSignalCount;
  AttackGroundTruth truth;
  for (auto& m : truth.mask) m.assign(n, 0);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = csv::split(lines[row]);
    if (cells.size() != 3) throw IngestionError(path + ": malformed row " + std::to_string(row));
    const auto id = signal_from_name(csv::trim(cells[1]));
    if (!id) throw IngestionError(path + ": unknown signal " + std::string(cells[1]));
    const auto flag = csv::trim(cells[2]);
    if (flag != "0" && flag != "1") throw IngestionError(path + ": falsified must be 0 or 1");
    truth.mask[index_of(*id)][(row - 1) / kSignalCount] = flag == "1" ? 1 : 0;
  }
  return truth;
}

}  // namespace scram_xai
