#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "scram_xai/scram_xai.hpp"

using namespace scram_xai;

namespace {

AeModel random_model(std::size_t p, std::size_t w, std::uint64_t seed) {
  AeModel m(oracle::tiny_arch(p, w, 6), seed);
  oracle::randomize(m, seed + 100, 0.6);
  return m;
}

}  // namespace

TEST(Shapley, WeightsSumToOnePerPlayer) {
  for (std::size_t p = 1; p <= 12; ++p) {
    const auto w = shapley_weights(p);
    double total = 0.0;
    for (std::size_t s = 0; s < p; ++s) {
      double binom = 1.0;
      for (std::size_t k = 0; k < s; ++k) binom = binom * static_cast<double>(p - 1 - k) / (k + 1);
      total += binom * w[s];
    }
    EXPECT_NEAR(total, 1.0, 1e-13);
  }
}

TEST(Shapley, FromPayoffMatchesSubsetFormula) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t p : {1u, 2u, 5u, 9u}) {
    std::vector<double> v(std::size_t{1} << p);
    for (auto& x : v) x = u(rng);
    const auto phi = shapley_from_payoff(v, p);
    const auto ref = oracle::subset_shapley(p, [&](std::uint32_t s) { return v[s]; });
    for (std::size_t j = 0; j < p; ++j) EXPECT_NEAR(phi[j], ref[j], 1e-12);
  }
  EXPECT_THROW(shapley_from_payoff(std::vector<double>(3), 2), ValidationError);
}

TEST(Shapley, ExactAgreesWithOraclesAndAxioms) {
  const auto model = random_model(9, 10, 5);
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    Matrix x = oracle::random_matrix(10, 9, rng);
    const Matrix ref = oracle::random_matrix(10, 9, rng);
    x.col(4) = ref.col(4);
    const auto a = exact_shapley(model, x, ref, Metric::Mae, 33);
    EXPECT_EQ(a.end, 33u);
    EXPECT_EQ(a.evaluations, 256u);  // one null player halves the distinct coalitions
    double total = 0.0;
    for (double v : a.phi) total += v;
    EXPECT_NEAR(total, a.v_full - a.v_empty, 1e-12);
    EXPECT_EQ(a.phi[4], 0.0);
    EXPECT_NEAR(a.v_full, window_error(model, x, Metric::Mae), 1e-15);
    const auto brute = oracle::subset_shapley(
        9, [&](std::uint32_t s) { return payoff(model, x, s, ref, Metric::Mae); });
    for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(a.phi[j], brute[j], 1e-12);
  }
}

TEST(Shapley, PermutationSamplingConverges) {
  const auto model = random_model(4, 5, 6);
  std::mt19937_64 rng(9);
  const Matrix x = oracle::random_matrix(5, 4, rng);
  const Matrix ref = oracle::random_matrix(5, 4, rng);
  const auto a = exact_shapley(model, x, ref, Metric::Mse);
  const auto s = oracle::permutation_shapley(
      4, [&](std::uint32_t c) { return payoff(model, x, c, ref, Metric::Mse); }, 20000, 1);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_LE(std::abs(a.phi[j] - s.mean[j]), 4 * s.std_error[j] + 1e-15);
}

TEST(Shapley, RefusesTooManyPlayers) {
  AeModel m(oracle::tiny_arch(17, 2, 2), 1);
  EXPECT_THROW(exact_shapley(m, Matrix::Zero(2, 17), Matrix::Zero(2, 17), Metric::Mae),
               ValidationError);
  AeModel n(oracle::tiny_arch(3, 2, 2), 1);
  EXPECT_THROW(exact_shapley(n, Matrix::Zero(2, 3), Matrix::Zero(3, 3), Metric::Mae),
               AlignmentError);
}

TEST(Shapley, AggregateMatchesBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t w = 4, length = 30;
  std::vector<ShapleyAttribution> attrs;
  for (std::size_t end : {5u, 6u, 7u, 12u, 20u, 29u}) {
    ShapleyAttribution a;
    a.end = end;
    a.phi = {u(rng), u(rng), u(rng)};
    attrs.push_back(a);
  }
  const auto ps = aggregate_per_second(attrs, w, length, 3);
  std::vector<std::size_t> ends;
  for (const auto& a : attrs) ends.push_back(a.end);
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> vals;
    for (const auto& a : attrs) vals.push_back(a.phi[j]);
    const auto ref = oracle::brute_per_second(ends, vals, w, length);
    for (std::size_t t = 0; t < length; ++t) {
      if (std::isnan(ref[t])) {
        EXPECT_FALSE(ps.defined(t));
        EXPECT_TRUE(std::isnan(ps.phi(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j))));
      } else {
        EXPECT_NEAR(ps.phi(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)), ref[t], 1e-15);
      }
    }
  }
  attrs.back().end = 30;
  EXPECT_THROW(aggregate_per_second(attrs, w, length, 3), BoundsError);
}

namespace {

PerSecondAttribution curve(const std::vector<double>& v, std::size_t p = kSignalCount) {
  PerSecondAttribution ps;
  ps.phi = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(p));
  ps.count.assign(v.size(), 1);
  for (std::size_t t = 0; t < v.size(); ++t) ps.phi(static_cast<Eigen::Index>(t), 0) = v[t];
  return ps;
}

}  // namespace

TEST(Localize, RunsShorterThanMinRunAreIgnored) {
  std::vector<double> v(60, 0.0);
  for (std::size_t t = 10; t < 13; ++t) v[t] = 1.0;  // 3 s spike
  for (std::size_t t = 20; t < 30; ++t) v[t] = 1.0;
  for (std::size_t t = 40; t < 45; ++t) v[t] = 1.0;
  const auto r = localize(curve(v), 0.5, 5);
  ASSERT_EQ(r.signals.size(), kSignalCount);
  EXPECT_TRUE(r.signals[0].replayed);
  EXPECT_EQ(r.signals[0].start, 20u);
  EXPECT_EQ(r.signals[0].end, 44u);
  EXPECT_EQ(r.signals[0].marked, 15u);
  EXPECT_EQ(r.replayed_count(), 1u);
  EXPECT_EQ(r.attack_start(), std::optional<std::size_t>(20));
  EXPECT_EQ(r.replayed_signals(), std::vector<SignalId>{SignalId::NeutronCounts});
  EXPECT_THROW(localize(curve(v), 0.0), ValidationError);
  EXPECT_THROW(localize(curve(v), 0.5, 0), ValidationError);
}

TEST(Localize, IdentifiedFraction) {
  EXPECT_DOUBLE_EQ(identified_fraction({true, false, true, false}, {1, 1, 1, 0}), 2.0 / 3.0);
  EXPECT_THROW(identified_fraction({true}, {0}), InsufficientDataError);
}

TEST(Signature, PeriodicPlateauScoresNearOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> pattern(20);
  for (auto& x : pattern) x = u(rng);
  std::vector<double> v(400, 0.0);
  for (std::size_t t = 100; t < 200; ++t) v[t] = 1.0 + 0.05 * pattern[(t - 100) % 20];
  EXPECT_GT(replay_signature_score(curve(v), SignalId::NeutronCounts, 20, 0.5), 0.95);
}

TEST(Signature, NoiseScoresLow) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.03);
    std::vector<double> v(400, 0.0);
    for (std::size_t t = 100; t < 200; ++t) v[t] = 1.0 + n(rng);
    EXPECT_LT(replay_signature_score(curve(v), SignalId::NeutronCounts, 20, 0.5), 0.4) << seed;
  }
}

TEST(Signature, ShortPlateauIsInsufficient) {
  std::vector<double> v(100, 0.0);
  for (std::size_t t = 10; t < 40; ++t) v[t] = 1.0;
  EXPECT_THROW(replay_signature_score(curve(v), SignalId::NeutronCounts, 20, 0.5),
               InsufficientDataError);
  EXPECT_THROW(replay_signature_score(curve(v), SignalId::NeutronCounts, 20, 2.0),
               InsufficientDataError);
}

TEST(Attribution, CsvRoundTrip) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  PerSecondAttribution ps;
  ps.phi = Matrix::Constant(12, 9, std::nan(""));
  ps.count.assign(12, 0);
  for (std::size_t t = 3; t < 9; ++t) {
    ps.count[t] = 2;
    for (Eigen::Index j = 0; j < 9; ++j) ps.phi(static_cast<Eigen::Index>(t), j) = u(rng);
  }
  const auto path = (std::filesystem::temp_directory_path() / "scram_xai_attr.csv").string();
  csv::write_text(path, attribution_to_csv(ps, 50.0));
  const auto back = read_attribution_csv(path, 12, 50.0);
  for (std::size_t t = 0; t < 12; ++t) {
    EXPECT_EQ(back.defined(t), ps.defined(t));
    if (!ps.defined(t)) continue;
    for (Eigen::Index j = 0; j < 9; ++j) {
      EXPECT_EQ(back.phi(static_cast<Eigen::Index>(t), j), ps.phi(static_cast<Eigen::Index>(t), j));
    }
  }
  EXPECT_THROW(read_attribution_csv(path, 12, 0.0), IngestionError);
  csv::write_text(path, "t,signal,phi\n0,neutron_counts,0.5\n");
  EXPECT_THROW(read_attribution_csv(path, 12), IngestionError);
  std::filesystem::remove(path);
}

TEST(Baseline, AlignsOnOnsetAndFallsBackToPlateau) {
  std::vector<MultivariateSeries> corpus;
  std::vector<Matrix> enc;
  for (std::size_t onset : {40u, 50u}) {
    ScramProfile p;
    p.duration = 200;
    p.onset = onset;
    p.seed = onset;
    corpus.push_back(generate_scram(p));
    enc.push_back(encode(corpus.back()));
  }
  const auto sc = fit_scaler(enc);
  const auto b = build_baseline(corpus, sc);
  EXPECT_EQ(b.source_count, 2u);
  EXPECT_EQ(b.coverage(), 150u);
  const Matrix a0 = prepare(corpus[0], sc);
  const Matrix a1 = prepare(corpus[1], sc);
  for (Eigen::Index k = 0; k < 9; ++k) {
    EXPECT_NEAR(b.values(7, k), 0.5 * (a0(47, k) + a1(57, k)), 1e-12);
  }
  const Matrix s = b.slice(45, 10, 40);
  EXPECT_EQ(Vector(s.row(0).transpose()), b.plateau);
  EXPECT_EQ(Vector(s.row(9).transpose()), Vector(b.values.row(5).transpose()));
  EXPECT_THROW(b.slice(500, 10, 40), AlignmentError);
}

TEST(Explain, WithoutOnsetUsesTrainingMeanAndIsLowConfidence) {
  const auto model_base = random_model(9, 10, 2);
  AeModel model = model_base;
  ScramProfile p;
  p.duration = 120;
  p.onset = 60;
  const auto s = generate_scram(p);
  const std::vector<Matrix> enc{encode(s)};
  model.set_scaler(fit_scaler(enc));
  const Matrix scaled = prepare(s, *model.scaler());
  const auto errs = series_errors(model, s, Metric::Mae);
  std::vector<double> scored;
  for (double e : errs) {
    if (!std::isnan(e)) scored.push_back(e);
  }
  const auto tl = make_timeline(errs, 10, empirical_quantile(scored, 0.9), Metric::Mae);
  ExplainContext ctx;
  ctx.fallback_mean = Vector::Constant(9, 0.5);
  const auto ex = explain(model, scaled, tl, ctx, std::nullopt, Metric::Mae);
  EXPECT_TRUE(ex.low_confidence);
  EXPECT_EQ(ex.attributions.size(), tl.flagged_seconds().size());
  const Matrix ref = Matrix::Constant(10, 9, 0.5);
  const auto& first = ex.attributions.front();
  const Matrix win = scaled.middleRows(static_cast<Eigen::Index>(first.end - 9), 10);
  const auto direct = exact_shapley(model, win, ref, Metric::Mae, first.end);
  EXPECT_EQ(direct.phi, first.phi);
  ctx.fallback_mean = Vector();
  EXPECT_THROW(explain(model, scaled, tl, ctx, std::nullopt, Metric::Mae), ValidationError);
}

TEST(Explain, TauIsAQuantileOfAbsoluteValues) {
  auto ps = curve({-3.0, 1.0, 2.0}, 1);
  ps.count[1] = 0;
  const std::vector<PerSecondAttribution> normal{ps};
  EXPECT_EQ(calibrate_tau(normal, 0.5), 2.0);
  EXPECT_EQ(calibrate_tau(normal, 1.0), 3.0);
  PerSecondAttribution empty;
  empty.phi = Matrix::Zero(2, 1);
  empty.count.assign(2, 0);
  EXPECT_THROW(calibrate_tau(std::vector<PerSecondAttribution>{empty}), InsufficientDataError);
}
