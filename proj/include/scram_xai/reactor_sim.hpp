#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scram_xai/errors.hpp"
#include "scram_xai/series.hpp"
#include "scram_xai/signals.hpp"

namespace scram_xai {

// Absolute magnitudes of the simulated plant. None of these are known for the
// real reactor; everything downstream is scale-free after Min-Max scaling.
struct ReactorScale {
  double counts_floor = 5.0;          // source-level counts at shutdown, 1/s
  double counts_per_percent = 200.0;  // counts per % power
  double power_floor = 0.01;          // %
  double flux_floor = 0.02;           // %
  double flux_gain = 0.97;            // flux % per power %
  double max_travel = 60.0;           // cm, all three rods
  double rr_base = 18.0;              // cm, rr withdrawal at criticality
  double rr_gain = 0.22;              // cm per % power
};

// Multiplicative noise standard deviation per continuous signal
// (index = SignalId for the first six signals).
using NoiseAmplitudes = std::array<double, kContinuousCount>;

inline constexpr NoiseAmplitudes kDefaultNoise = {0.02, 0.01, 0.012, 0.002, 0.002, 0.003};

struct Setpoint {
  std::size_t start = 0;  // second at which the operator requests the level
  double level = 0.0;     // % power
};

struct CycleProfile {
  std::size_t duration = 5700;
  std::vector<Setpoint> setpoints = {{60, 80.0}, {4800, 0.0}};
  double ramp_up_rate = 0.12;    // %/s
  double ramp_down_rate = 0.25;  // %/s
  double ss_speed = 0.5;         // cm/s, safety rod drive speed
  double rr_speed = 0.25;        // cm/s, regulating rod drive speed
  NoiseAmplitudes noise = kDefaultNoise;
  double outlier_rate = 0.0;
  double null_rate = 0.0;
  std::uint64_t seed = 1;
  ReactorScale scale{};
};

struct ScramProfile {
  std::size_t duration = 800;
  std::size_t onset = 300;
  double initial_power = 90.0;    // %
  double prompt_fraction = 0.95;  // share of power carried by the fast mode
  double fast_tau = 3.0;          // s, prompt drop
  double slow_tau = 55.0;         // s, precursor-dominated tail
  double residual_fraction = 0.002;  // residual-heat floor as a share of initial power
  double rr_settle = 30.0;        // s, rr readback reaches 0
  double ss_ramp = 300.0;         // s, ss1/ss2 readbacks reach 0
  NoiseAmplitudes noise = kDefaultNoise;
  std::uint64_t seed = 1;
  ReactorScale scale{};
};

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field + ": " + what);
}

inline void validate_noise(const NoiseAmplitudes& noise) {
  for (std::size_t i = 0; i < noise.size(); ++i) {
    require(noise[i] >= 0.0 && std::isfinite(noise[i]),
            "noise." + std::string(kSignalNames[i]), "must be >= 0");
  }
}

inline void validate_scale(const ReactorScale& s) {
  require(s.counts_floor >= 0.0, "scale.counts_floor", "must be >= 0");
  require(s.counts_per_percent > 0.0, "scale.counts_per_percent", "must be > 0");
  require(s.power_floor >= 0.0, "scale.power_floor", "must be >= 0");
  require(s.flux_floor >= 0.0, "scale.flux_floor", "must be >= 0");
  require(s.flux_gain > 0.0, "scale.flux_gain", "must be > 0");
  require(s.max_travel > 0.0, "scale.max_travel", "must be > 0");
  require(s.rr_base >= 0.0 && s.rr_base + 100.0 * s.rr_gain <= s.max_travel, "scale.rr_base",
          "rr travel at full power must fit within max_travel");
  require(s.rr_gain >= 0.0, "scale.rr_gain", "must be >= 0");
}

// Latent power (%) -> the three neutronic readbacks. Scaled copies of one
// trajectory so their correlation exists by construction.
inline void write_neutronics(MultivariateSeries& s, std::size_t t, double power,
                             const ReactorScale& scale) {
  s.at(SignalId::NeutronCounts, t) = scale.counts_floor + scale.counts_per_percent * power;
  s.at(SignalId::LinearPower, t) = scale.power_floor + power;
  s.at(SignalId::NeutronFlux, t) = scale.flux_floor + scale.flux_gain * power;
}

inline RodState motion_state(double previous, double current) {
  if (current < previous) return RodState::Insert;
  if (current > previous) return RodState::Withdraw;
  return RodState::Steady;
}

inline double step_toward(double value, double target, double max_step) {
  if (value < target) return std::min(target, value + max_step);
  return std::max(target, value - max_step);
}

// Multiplicative Gaussian noise, clamped to the physical range.
inline void apply_noise(MultivariateSeries& s, const NoiseAmplitudes& noise, double max_travel,
                        std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < kContinuousCount; ++i) {
    const SignalId id = kAllSignals[i];
    auto& col = s.columns[i];
    for (auto& v : col) {
      const double z = gauss(rng);
      if (noise[i] == 0.0) continue;
      v = std::max(0.0, v * (1.0 + noise[i] * z));
      if (is_position(id)) v = std::min(v, max_travel);
    }
  }
}

}  // namespace detail

inline void validate(const CycleProfile& p) {
  using detail::require;
  require(p.duration > 0, "duration", "must be > 0");
  for (std::size_t k = 0; k < p.setpoints.size(); ++k) {
    const auto& sp = p.setpoints[k];
    require(sp.level >= 0.0 && sp.level <= 100.0, "setpoints[" + std::to_string(k) + "].level",
            "must be within [0, 100] %");
    if (k > 0) {
      require(sp.start > p.setpoints[k - 1].start, "setpoints[" + std::to_string(k) + "].start",
              "setpoint seconds must be strictly increasing");
    }
  }
  require(p.ramp_up_rate >= 0.0, "ramp_up_rate", "must be >= 0");
  require(p.ramp_down_rate >= 0.0, "ramp_down_rate", "must be >= 0");
  require(p.ss_speed >= 0.0, "ss_speed", "must be >= 0");
  require(p.rr_speed >= 0.0, "rr_speed", "must be >= 0");
  require(p.outlier_rate >= 0.0 && p.outlier_rate <= 1.0, "outlier_rate", "must be in [0,1]");
  require(p.null_rate >= 0.0 && p.null_rate <= 1.0, "null_rate", "must be in [0,1]");
  detail::validate_noise(p.noise);
  detail::validate_scale(p.scale);
}

inline void validate(const ScramProfile& p) {
  using detail::require;
  require(p.duration > 0, "duration", "must be > 0");
  require(p.onset > 0 && p.onset < p.duration, "onset", "must satisfy 0 < onset < duration");
  require(p.initial_power >= 0.0 && p.initial_power <= 100.0, "initial_power",
          "must be within [0, 100] %");
  require(p.prompt_fraction >= 0.0 && p.prompt_fraction <= 1.0, "prompt_fraction",
          "must be in [0,1]");
  require(p.fast_tau > 0.0, "fast_tau", "must be > 0");
  require(p.slow_tau > 0.0, "slow_tau", "must be > 0");
  require(p.residual_fraction >= 0.0 && p.residual_fraction < 1.0, "residual_fraction",
          "must be in [0,1)");
  require(p.rr_settle > 0.0, "rr_settle", "must be > 0");
  require(p.ss_ramp > 0.0, "ss_ramp", "must be > 0");
  detail::validate_noise(p.noise);
  detail::validate_scale(p.scale);
}

// Post-SCRAM power as a share of the pre-SCRAM level, `elapsed` seconds after
// onset: a prompt exponential plus a precursor tail, floored at residual heat.
inline double scram_power_fraction(const ScramProfile& p, double elapsed) {
  if (elapsed <= 0.0) return 1.0;
  const double decay = p.prompt_fraction * std::exp(-elapsed / p.fast_tau) +
                       (1.0 - p.prompt_fraction) * std::exp(-elapsed / p.slow_tau);
  return std::max(p.residual_fraction, decay);
}

// Replaces randomly chosen continuous samples by spikes (probability
// outlier_rate) or null markers (probability null_rate). State columns and
// event metadata are left untouched.
inline MultivariateSeries add_artifacts(MultivariateSeries series, double outlier_rate,
                                        double null_rate, std::uint64_t seed,
                                        double max_travel = ReactorScale{}.max_travel) {
  detail::require(outlier_rate >= 0.0 && outlier_rate <= 1.0, "outlier_rate", "must be in [0,1]");
  detail::require(null_rate >= 0.0 && null_rate <= 1.0, "null_rate", "must be in [0,1]");
  detail::require(outlier_rate + null_rate <= 1.0, "outlier_rate + null_rate", "must be <= 1");
  if (outlier_rate == 0.0 && null_rate == 0.0) return series;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < kContinuousCount; ++i) {
    const SignalId id = kAllSignals[i];
    auto& col = series.columns[i];
    double col_max = 0.0;
    for (double v : col) {
      if (std::isfinite(v)) col_max = std::max(col_max, v);
    }
    if (col_max == 0.0) col_max = 1.0;
    for (auto& v : col) {
      const double u = unit(rng);
      const double magnitude = unit(rng);
      if (u < outlier_rate) {
        if (std::isnan(v)) continue;
        if (is_position(id)) {
          const double delta = (0.25 + 0.25 * magnitude) * max_travel;
          v = v + delta <= max_travel ? v + delta : v - delta;
        } else {
          v += (0.5 + magnitude) * col_max;
        }
      } else if (u < outlier_rate + null_rate) {
        v = std::nan("");
      }
    }
  }
  return series;
}

// Start-up, power operation at the scheduled setpoints, and shutdown.
inline MultivariateSeries generate_full_cycle(const CycleProfile& p) {
  validate(p);
  const auto& sc = p.scale;
  auto s = MultivariateSeries::with_length(p.duration);

  double power = 0.0;
  double ss1 = 0.0;
  double ss2 = 0.0;
  double rr = 0.0;
  std::size_t next_setpoint = 0;
  double target = 0.0;

  for (std::size_t t = 0; t < p.duration; ++t) {
    while (next_setpoint < p.setpoints.size() && p.setpoints[next_setpoint].start <= t) {
      target = p.setpoints[next_setpoint].level;
      ++next_setpoint;
    }
    const bool operating = target > 0.0;
    const double prev_ss1 = ss1;
    const double prev_ss2 = ss2;
    const double prev_rr = rr;

    if (t > 0) {
      if (operating) {
        // Safety rods come out one after the other before power is raised.
        ss1 = detail::step_toward(ss1, sc.max_travel, p.ss_speed);
        if (prev_ss1 == sc.max_travel) ss2 = detail::step_toward(ss2, sc.max_travel, p.ss_speed);
        if (ss1 == sc.max_travel && ss2 == sc.max_travel) {
          const double rate = target > power ? p.ramp_up_rate : p.ramp_down_rate;
          power = detail::step_toward(power, target, rate);
        }
        const double rr_target = ss2 == sc.max_travel ? sc.rr_base + sc.rr_gain * power : rr;
        rr = detail::step_toward(rr, rr_target, p.rr_speed);
      } else {
        power = detail::step_toward(power, 0.0, p.ramp_down_rate);
        ss1 = detail::step_toward(ss1, 0.0, p.ss_speed);
        ss2 = detail::step_toward(ss2, 0.0, p.ss_speed);
        rr = detail::step_toward(rr, 0.0, p.rr_speed);
      }
    }

    detail::write_neutronics(s, t, power, sc);
    s.at(SignalId::Ss1Position, t) = ss1;
    s.at(SignalId::Ss2Position, t) = ss2;
    s.at(SignalId::RrPosition, t) = rr;
    s.set_state(SignalId::Ss1ActiveState, t, detail::motion_state(prev_ss1, ss1));
    s.set_state(SignalId::Ss2ActiveState, t, detail::motion_state(prev_ss2, ss2));
    s.set_state(SignalId::RrActiveState, t, detail::motion_state(prev_rr, rr));
  }

  std::mt19937_64 rng(p.seed);
  detail::apply_noise(s, p.noise, sc.max_travel, rng);
  return add_artifacts(std::move(s), p.outlier_rate, p.null_rate,
                       p.seed ^ 0x9e3779b97f4a7c15ULL, sc.max_travel);
}

// Steady operation, then a SCRAM at profile.onset: all rods drop, power decays
// along scram_power_fraction, rr readback reaches 0 after rr_settle seconds and
// the safety rod readbacks fall linearly over ss_ramp seconds.
inline MultivariateSeries generate_scram(const ScramProfile& p) {
  validate(p);
  const auto& sc = p.scale;
  auto s = MultivariateSeries::with_length(p.duration);
  const double rr_initial = sc.rr_base + sc.rr_gain * p.initial_power;

  for (std::size_t t = 0; t < p.duration; ++t) {
    if (t < p.onset) {
      detail::write_neutronics(s, t, p.initial_power, sc);
      s.at(SignalId::Ss1Position, t) = sc.max_travel;
      s.at(SignalId::Ss2Position, t) = sc.max_travel;
      s.at(SignalId::RrPosition, t) = rr_initial;
      for (auto id : {SignalId::RrActiveState, SignalId::Ss1ActiveState, SignalId::Ss2ActiveState}) {
        s.set_state(id, t, RodState::Steady);
      }
      continue;
    }
    const double elapsed = static_cast<double>(t - p.onset);
    detail::write_neutronics(s, t, p.initial_power * scram_power_fraction(p, elapsed), sc);

    const double rr = rr_initial * std::max(0.0, 1.0 - elapsed / p.rr_settle);
    const double ss = sc.max_travel * std::max(0.0, 1.0 - elapsed / p.ss_ramp);
    s.at(SignalId::RrPosition, t) = rr;
    s.at(SignalId::Ss1Position, t) = ss;
    s.at(SignalId::Ss2Position, t) = ss;

    // Insert while the readback is still travelling (including the second it lands on 0).
    const bool rr_moving = elapsed - 1.0 < p.rr_settle;
    const bool ss_moving = elapsed - 1.0 < p.ss_ramp;
    s.set_state(SignalId::RrActiveState, t, rr_moving ? RodState::Insert : RodState::Steady);
    s.set_state(SignalId::Ss1ActiveState, t, ss_moving ? RodState::Insert : RodState::Steady);
    s.set_state(SignalId::Ss2ActiveState, t, ss_moving ? RodState::Insert : RodState::Steady);
  }

  std::mt19937_64 rng(p.seed);
  detail::apply_noise(s, p.noise, sc.max_travel, rng);
  s.events.push_back({EventKind::Scram, p.onset});
  return s;
}

}  // namespace scram_xai
