#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "scram_xai/errors.hpp"
#include "scram_xai/series.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Ordinal code of a rod state after encoding.
constexpr double encode_state(RodState s) {
  switch (s) {
    case RodState::Insert:
      return 0.0;
    case RodState::Steady:
      return 0.5;
    case RodState::Withdraw:
      return 1.0;
  }
  return 0.5;
}

// length x 9 numeric matrix. Nulls are imputed by carrying the last valid
// observation forward; leading nulls take the first valid value.
inline Matrix encode(const MultivariateSeries& series) {
  const auto n = static_cast<Eigen::Index>(series.length());
  Matrix out(n, static_cast<Eigen::Index>(kSignalCount));
  for (std::size_t s = 0; s < kSignalCount; ++s) {
    const SignalId id = kAllSignals[s];
    const auto col = static_cast<Eigen::Index>(s);
    if (is_categorical(id)) {
      for (Eigen::Index t = 0; t < n; ++t) {
        out(t, col) = encode_state(series.state(id, static_cast<std::size_t>(t)));
      }
      continue;
    }
    const auto& values = series.columns[s];
    const auto first_valid = std::find_if(values.begin(), values.end(),
                                          [](double v) { return !std::isnan(v); });
    if (first_valid == values.end()) {
      throw IngestionError("signal " + std::string(name_of(id)) + " contains no valid samples");
    }
    double carried = *first_valid;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = values[static_cast<std::size_t>(t)];
      if (!std::isnan(v)) carried = v;
      out(t, col) = carried;
    }
  }
  return out;
}

// Per-feature Min-Max bounds. A feature with max == min maps to 0.
struct Scaler {
  Vector min;
  Vector max;

  Eigen::Index features() const { return min.size(); }

  bool operator==(const Scaler& o) const { return min == o.min && max == o.max; }
};

inline Scaler fit_scaler(std::span<const Matrix> corpus) {
  if (corpus.empty()) throw ValidationError("fit_scaler: empty corpus");
  const Eigen::Index p = corpus.front().cols();
  Scaler sc{Vector::Constant(p, std::numeric_limits<double>::infinity()),
            Vector::Constant(p, -std::numeric_limits<double>::infinity())};
  bool any_rows = false;
  for (const auto& m : corpus) {
    if (m.cols() != p) throw ShapeError("fit_scaler: matrices disagree on feature count");
    if (m.rows() == 0) continue;
    any_rows = true;
    sc.min = sc.min.cwiseMin(m.colwise().minCoeff().transpose());
    sc.max = sc.max.cwiseMax(m.colwise().maxCoeff().transpose());
  }
  if (!any_rows) throw ValidationError("fit_scaler: corpus contains no rows");
  return sc;
}

inline Matrix transform(const Scaler& sc, const Matrix& m) {
  if (m.cols() != sc.features()) {
    throw ShapeError("transform: expected " + std::to_string(sc.features()) + " features, got " +
                     std::to_string(m.cols()));
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double range = sc.max(j) - sc.min(j);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out(i, j) = range > 0.0 ? std::clamp((m(i, j) - sc.min(j)) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

inline Matrix inverse_transform(const Scaler& sc, const Matrix& m) {
  if (m.cols() != sc.features()) {
    throw ShapeError("inverse_transform: expected " + std::to_string(sc.features()) +
                     " features, got " + std::to_string(m.cols()));
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double range = sc.max(j) - sc.min(j);
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = sc.min(j) + m(i, j) * range;
  }
  return out;
}

// Encoded and scaled, ready for windowing.
inline Matrix prepare(const MultivariateSeries& series, const Scaler& sc) {
  return transform(sc, encode(series));
}

struct WindowTensor {
  Matrix values;            // w x p
  std::size_t series_id = 0;
  std::size_t end = 0;      // index of the window's last second
};

// Windows ending at w-1, w-1+stride, ... <= L-1. Never spans two series.
inline std::vector<WindowTensor> windowize(const Matrix& m, std::size_t w, std::size_t stride = 1,
                                           std::size_t series_id = 0) {
  if (w == 0) throw ValidationError("windowize: window size must be >= 1");
  if (stride == 0) throw ValidationError("windowize: stride must be >= 1");
  const auto length = static_cast<std::size_t>(m.rows());
  if (length < w) {
    throw ValidationError("windowize: series length " + std::to_string(length) +
                          " is shorter than window " + std::to_string(w));
  }
  std::vector<WindowTensor> out;
  out.reserve((length - w) / stride + 1);
  for (std::size_t end = w - 1; end < length; end += stride) {
    out.push_back({m.middleRows(static_cast<Eigen::Index>(end + 1 - w),
                                static_cast<Eigen::Index>(w)),
                   series_id, end});
  }
  return out;
}

}  // namespace scram_xai
