#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "scram_xai/scram_xai.hpp"

using namespace scram_xai;

TEST(Autoencoder, ReconstructionMatchesScalarOracle) {
  AeModel model(AeArchitecture::desk_scale(), 3);
  std::mt19937_64 rng(4);
  const Matrix x = oracle::random_matrix(10, 9, rng);
  const Matrix fast = model.reconstruct(x);
  const Matrix slow = oracle::scalar_reconstruct(model, x);
  EXPECT_LE((fast - slow).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Autoencoder, BatchEqualsOneAtATime) {
  AeModel model(oracle::tiny_arch(9, 10, 6), 5);
  oracle::randomize(model, 2);
  std::mt19937_64 rng(6);
  std::vector<Matrix> xs;
  for (int k = 0; k < 13; ++k) xs.push_back(oracle::random_matrix(10, 9, rng));
  const auto batch = model.reconstruct_batch(xs);
  ASSERT_EQ(batch.size(), xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    EXPECT_LE((batch[k] - model.reconstruct(xs[k])).cwiseAbs().maxCoeff(), 1e-14);
  }
}

// Differences are taken on an 80-bit copy of the model so that roundoff does
// not swamp the smallest gradients.
TEST(Autoencoder, GradientMatchesFiniteDifferences) {
  AeModel model(oracle::tiny_arch(3, 5, 4), 1);
  oracle::randomize(model, 9, 0.8);
  std::mt19937_64 rng(10);
  std::vector<Matrix> batch;
  for (int k = 0; k < 4; ++k) batch.push_back(oracle::random_matrix(5, 3, rng));
  ForwardCache<double> cache;
  model.forward_train(batch, cache);
  auto grads = AeParams<double>::zeros(model.architecture());
  model.backward(cache, grads);

  Autoencoder<long double> wide(model.architecture(), 0);
  std::vector<long double*> p;
  std::vector<const double*> g;
  std::vector<double> narrow;
  model.params().visit([&](const Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) narrow.push_back(m.data()[k]);
  });
  wide.params().visit([&](Mat<long double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) p.push_back(m.data() + k);
  });
  grads.visit([&](const Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) g.push_back(m.data() + k);
  });
  ASSERT_EQ(p.size(), model.params().size());
  for (std::size_t k = 0; k < p.size(); ++k) *p[k] = narrow[k];
  ForwardCache<long double> scratch;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const long double saved = *p[k];
    const long double h = 1e-6L;
    *p[k] = saved + h;
    const long double up = wide.forward_train(batch, scratch);
    *p[k] = saved - h;
    const long double down = wide.forward_train(batch, scratch);
    *p[k] = saved;
    const double fd = static_cast<double>((up - down) / (2 * h));
    EXPECT_LE(std::abs(*g[k] - fd), 1e-6 * std::abs(fd) + 1e-13)
        << "parameter " << k << " analytic " << *g[k] << " fd " << fd;
  }
}

TEST(Autoencoder, SixtyFourBitDifferencesAgreeOnLargeGradients) {
  AeModel model(oracle::tiny_arch(2, 4, 3), 2);
  oracle::randomize(model, 3, 0.8);
  std::mt19937_64 rng(4);
  std::vector<Matrix> batch;
  for (int k = 0; k < 3; ++k) batch.push_back(oracle::random_matrix(4, 2, rng));
  ForwardCache<double> cache;
  model.forward_train(batch, cache);
  auto grads = AeParams<double>::zeros(model.architecture());
  model.backward(cache, grads);
  std::vector<double*> p;
  std::vector<const double*> g;
  model.params().visit([&](Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) p.push_back(m.data() + k);
  });
  grads.visit([&](const Mat<double>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) g.push_back(m.data() + k);
  });
  ForwardCache<double> scratch;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double fd =
        oracle::central_difference(p[k], [&] { return model.forward_train(batch, scratch); });
    EXPECT_LE(std::abs(*g[k] - fd), 1e-4 * std::abs(fd) + 1e-10) << "parameter " << k;
  }
}

TEST(Autoencoder, DropoutOnlyInTrainingMode) {
  AeModel model(AeArchitecture::desk_scale(), 7);
  std::mt19937_64 rng(1);
  const Matrix x = oracle::random_matrix(10, 9, rng);
  const Matrix a = model.forward(x);
  EXPECT_EQ(a, model.reconstruct(x));
  model.set_training(true);
  EXPECT_NE(model.forward(x), a);
  model.set_training(false);
  EXPECT_EQ(model.forward(x), a);
}

TEST(Autoencoder, RejectsWrongShapes) {
  AeModel model(AeArchitecture::desk_scale(), 7);
  EXPECT_THROW(model.reconstruct(Matrix::Zero(9, 9)), ShapeError);
  EXPECT_THROW(model.reconstruct(Matrix::Zero(10, 8)), ShapeError);
  Scaler sc{Vector::Zero(3), Vector::Ones(3)};
  EXPECT_THROW(model.set_scaler(sc), ShapeError);
  AeArchitecture bad;
  bad.decoder.clear();
  EXPECT_THROW(AeModel(bad, 1), ValidationError);
}

TEST(Autoencoder, LossMse) {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 1, 0, 3, 5;
  EXPECT_DOUBLE_EQ(loss_mse(a, b), 5.0 / 4.0);
}
