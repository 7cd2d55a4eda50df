#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "scram_xai/scram_xai.hpp"

using namespace scram_xai;

namespace {

LstmParams<double> random_layer(Eigen::Index in, Eigen::Index units, std::uint64_t seed) {
  auto p = LstmParams<double>::zeros(in, units);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  p.visit([&](Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  });
  return p;
}

}  // namespace

TEST(Lstm, ForwardMatchesScalarOracle) {
  const auto p = random_layer(3, 5, 4);
  const auto ref = oracle::ScalarLstm::from(p);
  std::mt19937_64 rng(8);
  std::vector<Mat<double>> xs;
  std::vector<std::vector<std::vector<double>>> per_sample(2);
  for (int t = 0; t < 7; ++t) {
    xs.push_back(oracle::random_matrix(3, 2, rng, -1.0, 1.0));
    for (int b = 0; b < 2; ++b) {
      per_sample[b].push_back({xs.back()(0, b), xs.back()(1, b), xs.back()(2, b)});
    }
  }
  const auto hs = lstm_forward<double>(p, xs, nullptr);
  for (int b = 0; b < 2; ++b) {
    const auto expected = ref.run(per_sample[b]);
    for (std::size_t t = 0; t < xs.size(); ++t) {
      for (Eigen::Index u = 0; u < 5; ++u) {
        EXPECT_NEAR(hs[t](u, b), expected[t][static_cast<std::size_t>(u)], 1e-14);
      }
    }
  }
}

TEST(Lstm, CellStepMatchesForwardFirstStep) {
  const auto p = random_layer(2, 3, 5);
  std::mt19937_64 rng(1);
  const Mat<double> x = oracle::random_matrix(2, 4, rng);
  const auto out = lstm_cell_step<double>(x, Mat<double>::Zero(3, 4), Mat<double>::Zero(3, 4), p);
  const auto hs = lstm_forward<double>(p, std::vector<Mat<double>>{x}, nullptr);
  EXPECT_LE((out.h - hs[0]).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Lstm, TanhViaExpAgreesWithStd) {
  Eigen::ArrayXd z = Eigen::ArrayXd::LinSpaced(2001, -40.0, 40.0);
  const Eigen::ArrayXd t = tanh_exp(z);
  for (Eigen::Index k = 0; k < z.size(); ++k) EXPECT_NEAR(t(k), std::tanh(z(k)), 1e-15);
}

TEST(Lstm, BackwardMatchesFiniteDifferences) {
  auto p = random_layer(2, 3, 6);
  std::mt19937_64 rng(12);
  std::vector<Mat<double>> xs;
  for (int t = 0; t < 4; ++t) xs.push_back(oracle::random_matrix(2, 2, rng, -1.0, 1.0));
  // Loss = sum of h_t weighted by fixed random coefficients.
  std::vector<Mat<double>> coef;
  for (int t = 0; t < 4; ++t) coef.push_back(oracle::random_matrix(3, 2, rng, -1.0, 1.0));
  auto loss = [&] {
    const auto hs = lstm_forward<double>(p, xs, nullptr);
    double s = 0.0;
    for (std::size_t t = 0; t < hs.size(); ++t) s += hs[t].cwiseProduct(coef[t]).sum();
    return s;
  };
  LstmCache<double> cache;
  lstm_forward<double>(p, xs, &cache);
  auto grads = LstmParams<double>::zeros(2, 3);
  const auto dx = lstm_backward(p, cache, coef, grads);

  std::vector<double*> params;
  std::vector<const double*> g;
  p.visit([&](Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) params.push_back(m.data() + k);
  });
  grads.visit([&](const Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) g.push_back(m.data() + k);
  });
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double fd = oracle::central_difference(params[k], loss);
    EXPECT_LE(oracle::relative_error(*g[k], fd), 1e-6) << "parameter " << k;
  }
  for (std::size_t t = 0; t < xs.size(); ++t) {
    for (Eigen::Index k = 0; k < xs[t].size(); ++k) {
      const double fd = oracle::central_difference(xs[t].data() + k, loss);
      EXPECT_LE(oracle::relative_error(dx[t].data()[k], fd), 1e-6);
    }
  }
}

TEST(Lstm, ShapeErrors) {
  const auto p = random_layer(2, 3, 1);
  EXPECT_THROW(lstm_forward<double>(p, std::vector<Mat<double>>{Mat<double>::Zero(3, 1)}, nullptr),
               ShapeError);
  EXPECT_THROW(lstm_forward<double>(p, std::vector<Mat<double>>{}, nullptr), ShapeError);
}
