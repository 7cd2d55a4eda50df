#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scram_xai/scram_xai.hpp"

using namespace scram_xai;

namespace {

std::vector<WindowTensor> smooth_windows(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  Matrix m(static_cast<Eigen::Index>(n + 5), 3);
  const double a = phase(rng);
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    m(t, 0) = 0.5 + 0.4 * std::sin(0.2 * t + a);
    m(t, 1) = 0.5 + 0.4 * std::cos(0.2 * t + a);
    m(t, 2) = 0.3;
  }
  return windowize(m, 6);
}

}  // namespace

TEST(Training, ProportionalSplitUsesLargestRemainders) {
  EXPECT_EQ(proportional_split(47, {34, 10, 3}), (std::vector<std::size_t>{34, 10, 3}));
  EXPECT_EQ(proportional_split(24, {20, 4}), (std::vector<std::size_t>{20, 4}));
  EXPECT_EQ(proportional_split(40, {34, 10, 3}), (std::vector<std::size_t>{29, 8, 3}));
  EXPECT_EQ(proportional_split(20, {20, 4}), (std::vector<std::size_t>{17, 3}));
  EXPECT_EQ(proportional_split(0, {1, 1}), (std::vector<std::size_t>{0, 0}));
  EXPECT_THROW(proportional_split(5, {}), ValidationError);
  EXPECT_THROW(proportional_split(5, {1, -1}), ValidationError);
}

TEST(Training, LossDecreasesAndRunsAreReproducible) {
  const auto tr = smooth_windows(200, 1);
  const auto va = smooth_windows(60, 2);
  auto arch = oracle::tiny_arch(3, 6, 8);
  arch.encoder[0].dropout = 0.1;
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 16;

  AeModel a(arch, 4), b(arch, 4);
  std::vector<EpochRecord> seen;
  const auto ha = train(a, std::span<const WindowTensor>(tr), std::span<const WindowTensor>(va), cfg,
                        [&](const EpochRecord& r) { seen.push_back(r); });
  const auto hb = train(b, std::span<const WindowTensor>(tr), std::span<const WindowTensor>(va), cfg);
  ASSERT_EQ(ha.epochs.size(), 15u);
  EXPECT_EQ(seen, ha.epochs);
  EXPECT_EQ(ha.epochs, hb.epochs);
  EXPECT_EQ(serialize(a), serialize(b));
  EXPECT_LT(ha.epochs.back().val_loss, 0.5 * ha.initial_val_loss);
  EXPECT_FALSE(a.training());

  cfg.seed = 8;
  AeModel c(arch, 4);
  train(c, std::span<const WindowTensor>(tr), std::span<const WindowTensor>(va), cfg);
  EXPECT_NE(serialize(a), serialize(c));
}

TEST(Training, EarlyStoppingAndValidation) {
  const auto tr = smooth_windows(50, 3);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.0;
  cfg.patience = 2;
  AeModel m(oracle::tiny_arch(3, 6, 4), 1);
  const auto h = train(m, std::span<const WindowTensor>(tr), std::span<const WindowTensor>(tr), cfg);
  EXPECT_EQ(h.epochs.size(), 3u);
  cfg.batch_size = 0;
  EXPECT_THROW(train(m, std::span<const WindowTensor>(tr), std::span<const WindowTensor>{}, cfg),
               ValidationError);
  cfg.batch_size = 4;
  EXPECT_THROW(train(m, std::span<const WindowTensor>{}, std::span<const WindowTensor>{}, cfg),
               ValidationError);
}

TEST(Training, HistoryCsv) {
  TrainHistory h;
  h.epochs = {{1, 0.5, 0.25}, {2, 0.125, std::nan("")}};
  EXPECT_EQ(history_to_csv(h), "epoch,train_loss,val_loss\n1,0.5,0.25\n2,0.125,\n");
}
