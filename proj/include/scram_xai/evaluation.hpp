#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "scram_xai/anomaly_detector.hpp"
#include "scram_xai/csv.hpp"
#include "scram_xai/replay_attack.hpp"
#include "scram_xai/shap_explainer.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai {

// Pass/fail limits for a benchmark run.
struct AcceptanceLimits {
  double attack_accuracy = 0.95;
  double clean_accuracy = 0.93;
  double coverage = 0.90;             // share of each replayed signal's true duration marked
  double untargeted_fraction = 0.10;  // max marked seconds of an untargeted signal / attack length
  std::size_t overshoot = 10;         // max reported end beyond the true end, seconds
};

struct ScenarioScore {
  std::string name;
  int level = 0;  // 0 = clean data
  double accuracy = 0.0;
  std::vector<SignalId> targets;
  std::vector<SignalId> reported;
  std::vector<double> identified;  // per signal; NaN when not targeted
  std::size_t worst_untargeted = 0;  // marked seconds of the worst untargeted signal
  std::optional<std::ptrdiff_t> overshoot;  // reported end minus true end

  bool exact_set() const { return targets == reported; }

  double min_coverage() const {
    double m = std::numeric_limits<double>::infinity();
    for (double f : identified) {
      if (!std::isnan(f)) m = std::min(m, f);
    }
    return m;
  }
};

inline ScenarioScore score_scenario(std::string name, int level, const DetectionTimeline& timeline,
                                    const AttackGroundTruth& truth,
                                    const LocalizationReport& report,
                                    const std::vector<std::vector<bool>>& marks) {
  ScenarioScore s;
  s.name = std::move(name);
  s.level = level;
  s.accuracy = per_second_accuracy(timeline, truth.per_second_labels());
  s.reported = report.replayed_signals();
  s.identified.assign(kSignalCount, std::numeric_limits<double>::quiet_NaN());
  std::optional<std::size_t> true_end;
  for (std::size_t j = 0; j < kSignalCount; ++j) {
    const auto& m = truth.mask[j];
    const bool targeted = std::find(m.begin(), m.end(), 1) != m.end();
    if (targeted) {
      s.targets.push_back(kAllSignals[j]);
      s.identified[j] = identified_fraction(marks[j], m);
      for (std::size_t t = 0; t < m.size(); ++t) {
        if (m[t]) true_end = std::max(true_end.value_or(0), t);
      }
    } else {
      const auto n = static_cast<std::size_t>(std::count(marks[j].begin(), marks[j].end(), true));
      s.worst_untargeted = std::max(s.worst_untargeted, n);
    }
  }
  if (true_end && report.attack_end()) {
    s.overshoot = static_cast<std::ptrdiff_t>(*report.attack_end()) -
                  static_cast<std::ptrdiff_t>(*true_end);
  }
  return s;
}

inline ScenarioScore score_clean(std::string name, const DetectionTimeline& timeline) {
  ScenarioScore s;
  s.name = std::move(name);
  s.accuracy = per_second_accuracy(timeline, std::vector<bool>(timeline.records.size(), false));
  s.identified.assign(kSignalCount, std::numeric_limits<double>::quiet_NaN());
  return s;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Detection and localization checks for one falsified scenario.
inline std::vector<Check> check_scenario(const ScenarioScore& s, std::size_t attack_length,
                                         const AcceptanceLimits& lim) {
  std::vector<Check> out;
  out.push_back({s.name + " accuracy", s.accuracy >= lim.attack_accuracy,
                 fmt(s.accuracy) + " >= " + fmt(lim.attack_accuracy, 2)});
  std::string names;
  for (auto id : s.reported) names += std::string(names.empty() ? "" : " ") + std::string(name_of(id));
  out.push_back({s.name + " signal set", s.exact_set(), "reported {" + names + "}"});
  const double cov = s.min_coverage();
  out.push_back({s.name + " coverage", cov >= lim.coverage,
                 "min " + fmt(cov) + " >= " + fmt(lim.coverage, 2)});
  const double limit = lim.untargeted_fraction * static_cast<double>(attack_length);
  out.push_back({s.name + " untargeted", static_cast<double>(s.worst_untargeted) <= limit,
                 std::to_string(s.worst_untargeted) + " marked s <= " + fmt(limit, 1)});
  const bool over_ok =
      s.overshoot && *s.overshoot <= static_cast<std::ptrdiff_t>(lim.overshoot);
  out.push_back({s.name + " overshoot", over_ok,
                 s.overshoot ? std::to_string(*s.overshoot) + " s <= " + std::to_string(lim.overshoot)
                             : std::string("no attack end reported")});
  return out;
}

// Clean accuracy non-decreasing in the threshold, and some threshold meets
// both accuracy limits at once. Column 0 is the clean dataset.
inline std::vector<Check> check_sweep(const SweepTable& t, const AcceptanceLimits& lim) {
  std::vector<Check> out;
  bool monotone = true;
  for (std::size_t i = 1; i < t.thresholds.size(); ++i) {
    if (t.accuracy[i][0] < t.accuracy[i - 1][0]) monotone = false;
  }
  out.push_back({"clean accuracy non-decreasing in threshold", monotone, ""});
  std::string good;
  for (std::size_t i = 0; i < t.thresholds.size(); ++i) {
    bool ok = t.accuracy[i][0] >= lim.clean_accuracy;
    for (std::size_t d = 1; d < t.accuracy[i].size(); ++d) {
      ok = ok && t.accuracy[i][d] >= lim.attack_accuracy;
    }
    if (ok) good += (good.empty() ? "" : " ") + csv::format_number(t.thresholds[i]);
  }
  out.push_back({"threshold plateau exists", !good.empty(),
                 good.empty() ? std::string("none") : "at {" + good + "}"});
  return out;
}

// Shape of one signal's per-second attribution across a replay.
struct PatternLimits {
  std::size_t rise_max = 25;       // s from attack start to 80 % of the plateau level
  double plateau_band = 0.5;       // relative band around the plateau median
  double plateau_share = 0.9;      // share of plateau seconds inside the band
  std::size_t plateau_lead = 30;   // plateau starts this long after attack start
  std::size_t plateau_trail = 10;  // and ends this long before attack end
  double drop_ratio = 0.5;         // value w s after the attack vs plateau median
  double signature = 0.5;
};

inline std::vector<Check> check_pattern(const PerSecondAttribution& ps, SignalId signal,
                                        std::size_t t_attack, std::size_t attack_length,
                                        std::size_t period, std::size_t w, double tau,
                                        const PatternLimits& lim = {}) {
  const auto j = static_cast<Eigen::Index>(index_of(signal));
  auto value = [&](std::size_t t) {
    return t < ps.length() && ps.defined(t) ? ps.phi(static_cast<Eigen::Index>(t), j)
                                            : std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<double> plateau;
  const std::size_t p0 = t_attack + lim.plateau_lead;
  const std::size_t p1 = t_attack + attack_length - lim.plateau_trail;
  for (std::size_t t = p0; t < p1; ++t) plateau.push_back(value(t));
  std::vector<double> sorted;
  for (double v : plateau) {
    if (!std::isnan(v)) sorted.push_back(v);
  }
  std::vector<Check> out;
  if (sorted.empty()) {
    out.push_back({"pattern plateau", false, "no attributed seconds in the plateau"});
    return out;
  }
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];

  std::optional<std::size_t> rise;
  for (std::size_t t = t_attack; t < t_attack + attack_length; ++t) {
    if (value(t) >= 0.8 * median) {
      rise = t - t_attack;
      break;
    }
  }
  const bool rising = rise && *rise > 0 && *rise <= lim.rise_max;
  out.push_back({"pattern rise", rising,
                 rise ? "80% of plateau after " + std::to_string(*rise) + " s" : "never reached"});

  std::size_t inside = 0;
  for (double v : plateau) {
    if (!std::isnan(v) && std::abs(v - median) <= lim.plateau_band * std::abs(median)) ++inside;
  }
  const double share = static_cast<double>(inside) / static_cast<double>(plateau.size());
  out.push_back({"pattern plateau", median > 0.0 && share >= lim.plateau_share,
                 "median " + fmt(median, 5) + ", " + fmt(share, 3) + " of seconds within band"});

  const std::size_t after = t_attack + attack_length - 1 + w;
  const double tail = value(after);
  bool dropped = std::isnan(tail) || tail < lim.drop_ratio * median;
  for (std::size_t t = after + 1; t < ps.length(); ++t) {
    if (value(t) > tau) dropped = false;
  }
  out.push_back({"pattern drop", dropped,
                 std::isnan(tail) ? std::string("no attribution after the attack")
                                  : "value " + fmt(tail, 5) + " at attack end + w"});

  try {
    const double score = replay_signature_score(ps, signal, period, tau);
    out.push_back({"pattern signature", score > lim.signature,
                   "lag-" + std::to_string(period) + " score " + fmt(score, 3)});
  } catch (const InsufficientDataError& e) {
    out.push_back({"pattern signature", false, e.what()});
  }
  return out;
}

inline bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

inline std::string checks_to_text(const std::vector<Check>& checks) {
  std::string out;
  for (const auto& c : checks) {
    out += (c.pass ? "PASS  " : "FAIL  ") + c.name;
    if (!c.detail.empty()) out += "  (" + c.detail + ")";
    out += '\n';
  }
  return out;
}

// Scenario table: accuracy, reported signals and per-signal identified share.
inline std::string scores_to_csv(const std::vector<ScenarioScore>& scores) {
  std::string out = "dataset,accuracy,signals_replayed";
  for (auto n : kSignalNames) out += ",identified_" + std::string(n);
  out += '\n';
  for (const auto& s : scores) {
    out += s.name + ',' + csv::format_number(s.accuracy) + ',' + std::to_string(s.reported.size());
    for (double f : s.identified) out += ',' + csv::format_number(f);
    out += '\n';
  }
  return out;
}

}  // namespace scram_xai
