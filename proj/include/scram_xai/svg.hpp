#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "scram_xai/anomaly_detector.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/shap_explainer.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai::svg {

inline constexpr std::array<const char*, kSignalCount> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
};

struct Frame {
  double width = 1000.0;
  double height = 360.0;
  double margin = 40.0;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string open(const Frame& f) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) + "\" height=\"" +
         num(f.height) + "\" viewBox=\"0 0 " + num(f.width) + ' ' + num(f.height) + "\">\n";
}

inline std::string legend(const Frame& f) {
  std::string out;
  for (std::size_t j = 0; j < kSignalCount; ++j) {
    const double x = f.margin + static_cast<double>(j) * (f.width - 2 * f.margin) / 9.0;
    out += "<text x=\"" + num(x) + "\" y=\"" + num(f.margin / 2) +
           "\" font-size=\"10\" fill=\"" + kPalette[j] + "\">" + std::string(kSignalNames[j]) +
           "</text>\n";
  }
  return out;
}

}  // namespace detail

// Scaled signals over time, one polyline each, on a background shaded green
// for scored seconds below the threshold and red for flagged ones.
inline std::string render_timeline(const Matrix& scaled, const DetectionTimeline& tl,
                                   const Frame& f = {}) {
  const auto n = static_cast<std::size_t>(scaled.rows());
  if (tl.records.size() != n) throw ValidationError("render_timeline: timeline length differs");
  if (n < 2) throw ValidationError("render_timeline: need at least two seconds");
  const double plot_w = f.width - 2 * f.margin;
  const double plot_h = f.height - 2 * f.margin;
  auto x_of = [&](double t) { return f.margin + t * plot_w / static_cast<double>(n - 1); };
  auto y_of = [&](double v) { return f.margin + (1.0 - std::clamp(v, 0.0, 1.0)) * plot_h; };

  std::string out = detail::open(f);
  out += "<g class=\"flags\">\n";
  std::size_t t = 0;
  while (t < n) {
    if (!tl.records[t].scored) {
      ++t;
      continue;
    }
    const bool flagged = tl.records[t].flagged;
    std::size_t stop = t;
    while (stop < n && tl.records[stop].scored && tl.records[stop].flagged == flagged) ++stop;
    const double x0 = x_of(static_cast<double>(t) - 0.5);
    const double x1 = x_of(static_cast<double>(stop) - 0.5);
    out += "<rect x=\"" + detail::num(x0) + "\" y=\"" + detail::num(f.margin) + "\" width=\"" +
           detail::num(x1 - x0) + "\" height=\"" + detail::num(plot_h) + "\" fill=\"" +
           (flagged ? "#f4a6a6" : "#b8e0b8") + "\" fill-opacity=\"0.6\"/>\n";
    t = stop;
  }
  out += "</g>\n";
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    out += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" +
           std::string(kPalette[static_cast<std::size_t>(j) % kPalette.size()]) + "\" points=\"";
    for (std::size_t k = 0; k < n; ++k) {
      out += detail::num(x_of(static_cast<double>(k))) + ',' +
             detail::num(y_of(scaled(static_cast<Eigen::Index>(k), j))) + ' ';
    }
    out += "\"/>\n";
  }
  out += detail::legend(f);
  out += "</svg>\n";
  return out;
}

// Per-second attribution curves with the marking threshold as a dashed line.
// Uncovered seconds break a curve, so a signal may own several polylines.
inline std::string render_attribution(const PerSecondAttribution& ps, double tau,
                                      const Frame& f = {}) {
  const std::size_t n = ps.length();
  if (n < 2) throw ValidationError("render_attribution: need at least two seconds");
  double lo = std::min(0.0, tau);
  double hi = std::max(0.0, tau);
  for (std::size_t t = 0; t < n; ++t) {
    if (!ps.defined(t)) continue;
    lo = std::min(lo, ps.phi.row(static_cast<Eigen::Index>(t)).minCoeff());
    hi = std::max(hi, ps.phi.row(static_cast<Eigen::Index>(t)).maxCoeff());
  }
  if (hi == lo) hi = lo + 1.0;
  const double plot_w = f.width - 2 * f.margin;
  const double plot_h = f.height - 2 * f.margin;
  auto x_of = [&](double t) { return f.margin + t * plot_w / static_cast<double>(n - 1); };
  auto y_of = [&](double v) { return f.margin + (hi - v) / (hi - lo) * plot_h; };

  std::string out = detail::open(f);
  out += "<line x1=\"" + detail::num(f.margin) + "\" x2=\"" + detail::num(f.width - f.margin) +
         "\" y1=\"" + detail::num(y_of(0.0)) + "\" y2=\"" + detail::num(y_of(0.0)) +
         "\" stroke=\"#000\" stroke-width=\"0.5\"/>\n";
  out += "<line x1=\"" + detail::num(f.margin) + "\" x2=\"" + detail::num(f.width - f.margin) +
         "\" y1=\"" + detail::num(y_of(tau)) + "\" y2=\"" + detail::num(y_of(tau)) +
         "\" stroke=\"#000\" stroke-dasharray=\"4 3\" stroke-width=\"0.8\"/>\n";
  for (Eigen::Index j = 0; j < ps.phi.cols(); ++j) {
    std::size_t t = 0;
    while (t < n) {
      if (!ps.defined(t)) {
        ++t;
        continue;
      }
      out += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" +
             std::string(kPalette[static_cast<std::size_t>(j) % kPalette.size()]) +
             "\" points=\"";
      for (; t < n && ps.defined(t); ++t) {
        out += detail::num(x_of(static_cast<double>(t))) + ',' +
               detail::num(y_of(ps.phi(static_cast<Eigen::Index>(t), j))) + ' ';
      }
      out += "\"/>\n";
    }
  }
  out += detail::legend(f);
  out += "</svg>\n";
  return out;
}

}  // namespace scram_xai::svg
