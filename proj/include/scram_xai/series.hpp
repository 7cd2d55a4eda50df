#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scram_xai/csv.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai {

enum class EventKind { Scram };

struct Event {
  EventKind kind = EventKind::Scram;
  std::size_t onset = 0;  // second index into the series

  bool operator==(const Event&) const = default;
};

// Nine signals sampled at 1 Hz. Continuous columns hold physical values with
// NaN marking a null sample; state columns hold RodState enum values.
struct MultivariateSeries {
  double start_time = 0.0;
  std::array<std::vector<double>, kSignalCount> columns;
  std::vector<Event> events;

  static MultivariateSeries with_length(std::size_t n) {
    MultivariateSeries s;
    for (auto& c : s.columns) c.assign(n, 0.0);
    return s;
  }

  std::size_t length() const { return columns[0].size(); }

  std::vector<double>& column(SignalId id) { return columns[index_of(id)]; }
  const std::vector<double>& column(SignalId id) const { return columns[index_of(id)]; }

  double at(SignalId id, std::size_t t) const { return columns[index_of(id)][t]; }
  double& at(SignalId id, std::size_t t) { return columns[index_of(id)][t]; }

  RodState state(SignalId id, std::size_t t) const {
    return static_cast<RodState>(static_cast<int>(at(id, t)));
  }
  void set_state(SignalId id, std::size_t t, RodState s) {
    at(id, t) = static_cast<double>(static_cast<int>(s));
  }

  std::optional<std::size_t> scram_onset() const {
    for (const auto& e : events) {
      if (e.kind == EventKind::Scram) return e.onset;
    }
    return std::nullopt;
  }

  bool operator==(const MultivariateSeries&) const = default;
};

// Element-wise equality treating NaN == NaN (null markers compare equal).
inline bool same_values(const MultivariateSeries& a, const MultivariateSeries& b) {
  if (a.length() != b.length() || a.start_time != b.start_time || a.events != b.events) {
    return false;
  }
  for (std::size_t s = 0; s < kSignalCount; ++s) {
    for (std::size_t t = 0; t < a.length(); ++t) {
      const double x = a.columns[s][t];
      const double y = b.columns[s][t];
      if (std::isnan(x) && std::isnan(y)) continue;
      if (x != y) return false;
    }
  }
  return true;
}

// Checks the series invariants. max_travel bounds the three position signals.
inline void validate(const MultivariateSeries& series, double max_travel) {
  const std::size_t n = series.length();
  for (std::size_t s = 0; s < kSignalCount; ++s) {
    const SignalId id = kAllSignals[s];
    if (series.columns[s].size() != n) {
      throw ValidationError("column " + std::string(name_of(id)) + " has wrong length");
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double v = series.columns[s][t];
      if (is_categorical(id)) {
        if (v != 0.0 && v != 1.0 && v != 2.0) {
          throw ValidationError(std::string(name_of(id)) + ": invalid rod state at t=" +
                                std::to_string(t));
        }
        continue;
      }
      if (std::isnan(v)) continue;
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(std::string(name_of(id)) + ": value out of range at t=" +
                              std::to_string(t));
      }
      if (is_position(id) && v > max_travel) {
        throw ValidationError(std::string(name_of(id)) + ": exceeds rod travel at t=" +
                              std::to_string(t));
      }
    }
  }
  for (const auto& e : series.events) {
    if (e.onset >= n) throw ValidationError("event onset outside series");
  }
}

// ---------------------------------------------------------------------------
// CSV: header `t,<nine signal names>`, one row per second, rod states as
// insert|withdraw|steady tokens, nulls as empty cells. Events are not part of
// the schema; they travel in the dataset manifest.

inline std::string to_csv(const MultivariateSeries& series) {
  std::string out = "t";
  for (auto name : kSignalNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t t = 0; t < series.length(); ++t) {
    out += csv::format_number(series.start_time + static_cast<double>(t));
    for (std::size_t s = 0; s < kSignalCount; ++s) {
      out += ',';
      const SignalId id = kAllSignals[s];
      if (is_categorical(id)) {
        out += token_of(series.state(id, t));
      } else {
        out += csv::format_number(series.columns[s][t]);
      }
    }
    out += '\n';
  }
  return out;
}

inline MultivariateSeries parse_series_csv(const std::vector<std::string>& lines) {
  if (lines.empty()) throw IngestionError("empty series file");
  const auto header = csv::split(lines.front());
  if (header.size() != kSignalCount + 1 || csv::trim(header[0]) != "t") {
    throw IngestionError("series header must be t followed by the nine signal names");
  }
  for (std::size_t s = 0; s < kSignalCount; ++s) {
    if (csv::trim(header[s + 1]) != kSignalNames[s]) {
      throw IngestionError("unexpected column '" + std::string(header[s + 1]) +
                           "', expected " + std::string(kSignalNames[s]));
    }
  }
  auto series = MultivariateSeries::with_length(lines.size() - 1);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = csv::split(lines[row]);
    if (cells.size() != kSignalCount + 1) {
      throw IngestionError("row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells");
    }
    const double t = csv::parse_number(cells[0]);
    if (std::isnan(t)) throw IngestionError("missing time stamp in row " + std::to_string(row));
    if (row == 1) {
      series.start_time = t;
    } else if (t != series.start_time + static_cast<double>(row - 1)) {
      throw IngestionError("frames must be spaced exactly one second apart (row " +
                           std::to_string(row) + ")");
    }
    for (std::size_t s = 0; s < kSignalCount; ++s) {
      const SignalId id = kAllSignals[s];
      if (is_categorical(id)) {
        const auto state = rod_state_from_token(csv::trim(cells[s + 1]));
        if (!state) {
          throw IngestionError("bad rod state '" + std::string(cells[s + 1]) + "' in row " +
                               std::to_string(row));
        }
        series.set_state(id, row - 1, *state);
      } else {
        series.columns[s][row - 1] = csv::parse_number(cells[s + 1]);
      }
    }
  }
  return series;
}

inline void write_series_csv(const std::string& path, const MultivariateSeries& series) {
  csv::write_text(path, to_csv(series));
}

inline MultivariateSeries read_series_csv(const std::string& path) {
  return parse_series_csv(csv::read_lines(path));
}

// Onset of a SCRAM as seen on the console: the first second at which all three
// rod active states switch to insert together.
inline std::optional<std::size_t> detect_scram_onset(const MultivariateSeries& series) {
  constexpr std::array<SignalId, 3> states = {SignalId::RrActiveState, SignalId::Ss1ActiveState,
                                              SignalId::Ss2ActiveState};
  for (std::size_t t = 1; t < series.length(); ++t) {
    bool switched = true;
    for (auto id : states) {
      if (series.state(id, t) != RodState::Insert || series.state(id, t - 1) == RodState::Insert) {
        switched = false;
      }
    }
    if (switched) return t;
  }
  return std::nullopt;
}

}  // namespace scram_xai
