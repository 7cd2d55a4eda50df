// Acceptance run: one PASS/FAIL line per criterion, details below each line.
// The process exits non-zero only when a criterion could not be evaluated.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scram_xai/scram_xai.hpp"

using namespace scram_xai;

namespace {

// Tolerances.
constexpr double kGradRelTol = 1e-4;
constexpr double kFdStep = 1e-5;
constexpr double kEfficiencyTol = 1e-9;
constexpr double kNullPlayerTol = 1e-12;
constexpr double kSamplingSigmas = 3.0;
constexpr std::size_t kPermutations = 10000;
constexpr std::size_t kShapleyWindows = 100;
constexpr double kRoundTripTol = 1e-12;
constexpr double kErrorOracleTol = 1e-12;
constexpr double kBenchmarkMinutes = 15.0;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. BPTT gradient of the batch MSE against central differences. The same
// parameters in an 80-bit copy of the model give a second, low-noise
// difference that is reported alongside but does not decide the outcome.
Outcome gradient_check() {
  AeModel model(oracle::tiny_arch(2, 4, 3), 5);
  oracle::randomize(model, 17, 0.8);
  std::mt19937_64 rng(23);
  std::vector<Matrix> batch;
  for (int k = 0; k < 3; ++k) batch.push_back(oracle::random_matrix(4, 2, rng));

  ForwardCache<double> cache;
  model.forward_train(batch, cache);
  auto grads = AeParams<double>::zeros(model.architecture());
  model.backward(cache, grads);

  Autoencoder<long double> wide(model.architecture(), 5);
  std::vector<double*> params;
  std::vector<long double*> wide_params;
  std::vector<const double*> analytic;
  model.params().visit([&](Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) params.push_back(m.data() + k);
  });
  wide.params().visit([&](Mat<long double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) wide_params.push_back(m.data() + k);
  });
  grads.visit([&](const Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) analytic.push_back(m.data() + k);
  });
  for (std::size_t k = 0; k < params.size(); ++k) *wide_params[k] = *params[k];

  ForwardCache<double> scratch;
  ForwardCache<long double> wide_scratch;
  const auto loss = [&] { return model.forward_train(batch, scratch); };
  double worst = 0.0, worst_wide = 0.0, largest_failing = 0.0;
  std::size_t failing = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double fd = oracle::central_difference(params[k], loss, kFdStep);
    const double rel = oracle::relative_error(*analytic[k], fd);
    worst = std::max(worst, rel);
    if (rel > kGradRelTol) {
      ++failing;
      largest_failing = std::max(largest_failing, std::abs(*analytic[k]));
    }
    const long double saved = *wide_params[k];
    const long double h = 1e-6L;
    *wide_params[k] = saved + h;
    const long double up = wide.forward_train(batch, wide_scratch);
    *wide_params[k] = saved - h;
    const long double down = wide.forward_train(batch, wide_scratch);
    *wide_params[k] = saved;
    worst_wide = std::max(
        worst_wide, oracle::relative_error(*analytic[k], static_cast<double>((up - down) / (2 * h))));
  }
  Outcome o{worst <= kGradRelTol,
            std::to_string(params.size()) + " parameters, max relative error " + num(worst) +
                " <= " + num(kGradRelTol),
            {}};
  if (failing > 0) {
    o.details.push_back(std::to_string(failing) + " parameters over tolerance, all with |grad| <= " +
                        num(largest_failing));
  }
  o.details.push_back("80-bit central difference (h=1e-6): max relative error " + num(worst_wide));
  return o;
}

// 2. Efficiency, null player and agreement with permutation sampling.
Outcome shapley_axioms() {
  AeModel model(oracle::tiny_arch(kSignalCount, 10, 8), 3);
  oracle::randomize(model, 41, 0.6);
  std::mt19937_64 rng(97);
  std::uniform_int_distribution<int> nulls(0, 3);
  std::uniform_int_distribution<int> pick(0, kSignalCount - 1);

  struct Case {
    Matrix window, reference;
    std::vector<bool> null;
    double error;
  };
  std::vector<Case> pool;
  for (int k = 0; k < 300; ++k) {
    Case c{oracle::random_matrix(10, kSignalCount, rng),
           oracle::random_matrix(10, kSignalCount, rng), std::vector<bool>(kSignalCount, false),
           0.0};
    for (int n = nulls(rng); n > 0; --n) {
      const int j = pick(rng);
      c.window.col(j) = c.reference.col(j);
      c.null[static_cast<std::size_t>(j)] = true;
    }
    c.error = window_error(model, c.window, Metric::Mae);
    pool.push_back(std::move(c));
  }
  std::vector<double> errors;
  for (const auto& c : pool) errors.push_back(c.error);
  const double eps = empirical_quantile(errors, 0.5);

  double worst_eff = 0.0, worst_null = 0.0, worst_sigma = 0.0;
  std::size_t windows = 0, outside = 0, compared = 0;
  for (const auto& c : pool) {
    if (windows == kShapleyWindows) break;
    if (!(c.error > eps)) continue;
    ++windows;
    const auto a = exact_shapley(model, c.window, c.reference, Metric::Mae);
    double total = 0.0;
    for (double v : a.phi) total += v;
    worst_eff = std::max(worst_eff, std::abs(total - (a.v_full - a.v_empty)));
    for (std::size_t j = 0; j < kSignalCount; ++j) {
      if (c.null[j]) worst_null = std::max(worst_null, std::abs(a.phi[j]));
    }
    const auto sampled = oracle::permutation_shapley(
        kSignalCount,
        [&](std::uint32_t s) { return payoff(model, c.window, s, c.reference, Metric::Mae); },
        kPermutations, 1000 + windows);
    for (std::size_t j = 0; j < kSignalCount; ++j) {
      ++compared;
      const double diff = std::abs(a.phi[j] - sampled.mean[j]);
      const double se = sampled.std_error[j];
      if (se == 0.0) {
        if (diff > kNullPlayerTol) ++outside;
        continue;
      }
      worst_sigma = std::max(worst_sigma, diff / se);
      if (diff > kSamplingSigmas * se) ++outside;
    }
  }
  Outcome o;
  o.pass = windows == kShapleyWindows && worst_eff <= kEfficiencyTol &&
           worst_null <= kNullPlayerTol && outside == 0;
  o.summary = std::to_string(windows) + " flagged windows; efficiency gap " + num(worst_eff) +
              ", null-player |phi| " + num(worst_null) + ", sampling: " +
              std::to_string(outside) + " of " + std::to_string(compared) +
              " signals beyond 3 SE (largest " + num(worst_sigma) + " SE)";
  return o;
}

// 3. Windowing count, scaler round trip, error metrics against naive loops.
Outcome pipeline_arithmetic() {
  std::mt19937_64 rng(5);
  const Matrix m = oracle::random_matrix(800, kSignalCount, rng, -3.0, 40.0);
  const auto wins = windowize(m, 10);
  const auto brute = oracle::brute_windows(800, 10, 1);
  bool same = wins.size() == brute.size();
  for (std::size_t k = 0; same && k < wins.size(); ++k) {
    same = wins[k].end == brute[k].second &&
           wins[k].values == m.middleRows(static_cast<Eigen::Index>(brute[k].first), 10);
  }

  const std::vector<Matrix> corpus{m};
  const Scaler sc = fit_scaler(corpus);
  const double round_trip = (inverse_transform(sc, transform(sc, m)) - m).cwiseAbs().maxCoeff();

  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Matrix a = oracle::random_matrix(10, kSignalCount, rng, -1.0, 2.0);
    const Matrix b = oracle::random_matrix(10, kSignalCount, rng, -1.0, 2.0);
    worst = std::max(worst, std::abs(reconstruction_error(a, b, Metric::Mae) - oracle::naive_mae(a, b)));
    worst = std::max(worst, std::abs(reconstruction_error(a, b, Metric::Mse) - oracle::naive_mse(a, b)));
  }
  return {wins.size() == 791 && same && round_trip <= kRoundTripTol && worst <= kErrorOracleTol,
          std::to_string(wins.size()) + " windows (brute force " + std::to_string(brute.size()) +
              (same ? ", identical" : ", DIFFERENT") + "), scaler round trip " + num(round_trip) +
              ", metric gap " + num(worst),
          {}};
}

// Byte-level artifacts compared across reruns.
std::vector<std::pair<std::string, std::string>> artifacts(const BenchmarkResult& r) {
  std::vector<std::pair<std::string, std::string>> out;
  out.push_back({"checkpoint", std::string(r.checkpoint.begin(), r.checkpoint.end())});
  out.push_back({"clean timeline", timeline_to_csv(r.clean_timeline)});
  for (const auto& s : r.scenarios) {
    const std::string n = "replay" + std::to_string(s.level);
    out.push_back({n + " timeline", timeline_to_csv(s.timeline)});
    out.push_back({n + " attribution", attribution_to_csv(s.explanation.per_second)});
    out.push_back({n + " report", report_to_text(s.report)});
  }
  out.push_back({"sweep", sweep_to_csv(r.sweep)});
  out.push_back({"summary", r.summary()});
  return out;
}

void failing_details(const std::vector<Check>& checks, Outcome& o) {
  for (const auto& c : checks) {
    if (!c.pass) o.details.push_back(c.name + ": " + c.detail);
  }
}

}  // namespace

int main() {
  std::ostringstream log;
  auto print = [&](int id, const std::string& name, const Outcome& o) {
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " " << name << "  ("
         << o.summary << ")\n";
    for (const auto& d : o.details) line << "        " << d << '\n';
    std::cout << line.str() << std::flush;
    log << line.str();
  };

  try {
    print(1, "gradient correctness", gradient_check());
    print(2, "Shapley axioms", shapley_axioms());
    print(3, "pipeline arithmetic", pipeline_arithmetic());

    BenchmarkConfig cfg;
    auto t0 = std::chrono::steady_clock::now();
    const auto first = run_benchmark(cfg);
    const double minutes = seconds_since(t0) / 60.0;

    Outcome c4;
    const auto detection = first.detection_checks(cfg.limits);
    failing_details(detection, c4);
    c4.pass = all_pass(detection) && minutes <= kBenchmarkMinutes;
    std::size_t passed = 0;
    for (const auto& c : detection) passed += c.pass ? 1 : 0;
    c4.summary = std::to_string(passed) + "/" + std::to_string(detection.size()) +
                 " checks, epsilon " + num(first.epsilon, 4) + ", tau_shap " +
                 num(first.tau, 4) + ", " + num(minutes, 3) + " min <= " +
                 num(kBenchmarkMinutes, 3);
    print(4, "end-to-end benchmark", c4);

    Outcome c5;
    const auto sweep = check_sweep(first.sweep, cfg.limits);
    failing_details(sweep, c5);
    c5.pass = all_pass(sweep);
    c5.summary = sweep[0].name + "; " + sweep[1].name + " " + sweep[1].detail;
    print(5, "threshold sweep shape", c5);

    t0 = std::chrono::steady_clock::now();
    const auto second = run_benchmark(cfg);
    const auto a = artifacts(first);
    const auto b = artifacts(second);
    Outcome c6;
    c6.pass = a.size() == b.size();
    for (std::size_t k = 0; c6.pass && k < a.size(); ++k) {
      if (a[k].second != b[k].second) {
        c6.pass = false;
        c6.details.push_back(a[k].first + " differs between runs");
      }
    }
    c6.summary = std::to_string(a.size()) + " artifacts compared byte for byte, rerun took " +
                 num(seconds_since(t0) / 60.0, 3) + " min";
    print(6, "determinism", c6);

    Outcome c7;
    const auto& replay1 = first.scenarios.front();
    const auto pattern =
        check_pattern(replay1.explanation.per_second, SignalId::NeutronCounts,
                      cfg.scenario.t_attack, cfg.scenario.period * cfg.scenario.repeats,
                      cfg.scenario.period, first.window, first.tau);
    for (const auto& c : pattern) c7.details.push_back(c.name + ": " + c.detail);
    c7.pass = all_pass(pattern);
    c7.summary = "Replay#1 neutron_counts attribution";
    print(7, "pattern reproduction", c7);

    const std::string detail = "\n" + first.summary() + checks_to_text(detection);
    log << detail;
    std::ofstream("acceptance_report.txt") << log.str();
  } catch (const std::exception& e) {
    std::cout << "acceptance run aborted: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
