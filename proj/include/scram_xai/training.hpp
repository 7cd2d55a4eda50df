#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "scram_xai/adam.hpp"
#include "scram_xai/autoencoder.hpp"
#include "scram_xai/csv.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"

namespace scram_xai {

struct TrainConfig {
  double learning_rate = 0.000352;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 7;
  std::size_t patience = 0;  // 0 disables early stopping
  double clip_norm = 5.0;    // 0 disables gradient clipping

  AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_epsilon}; }

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw ValidationError("learning_rate must be >= 0");
    }
    if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
    if (clip_norm < 0.0) throw ValidationError("clip_norm must be >= 0");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when no validation windows were given

  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  double initial_val_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<EpochRecord> epochs;
};

inline std::string history_to_csv(const TrainHistory& h) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const auto& e : h.epochs) {
    out += std::to_string(e.epoch) + ',' + csv::format_number(e.train_loss) + ',' +
           csv::format_number(e.val_loss) + '\n';
  }
  return out;
}

// Mean per-window MSE in inference mode.
template <typename T>
double evaluate_loss(const Autoencoder<T>& model, std::span<const WindowTensor> windows,
                     std::size_t chunk = 256) {
  if (windows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  std::vector<Matrix> batch;
  for (std::size_t start = 0; start < windows.size(); start += chunk) {
    const std::size_t stop = std::min(windows.size(), start + chunk);
    batch.clear();
    for (std::size_t k = start; k < stop; ++k) batch.push_back(windows[k].values);
    const auto recon = model.reconstruct_batch(batch);
    for (std::size_t k = 0; k < batch.size(); ++k) total += loss_mse(recon[k], batch[k]);
  }
  return total / static_cast<double>(windows.size());
}

using EpochCallback = std::function<void(const EpochRecord&)>;

// Seeded mini-batch Adam on the window MSE, with BPTT gradients and global
// norm clipping. The model is left in inference mode.
template <typename T>
TrainHistory train(Autoencoder<T>& model, std::span<const WindowTensor> train_windows,
                   std::span<const WindowTensor> val_windows, const TrainConfig& cfg,
                   const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (train_windows.empty()) throw ValidationError("train: empty training corpus");

  TrainHistory history;
  history.initial_val_loss = evaluate_loss(model, val_windows);

  std::mt19937_64 rng(cfg.seed);
  model.reseed_dropout(cfg.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<std::size_t> order(train_windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto grads = AeParams<T>::zeros(model.architecture());
  AdamState<T> adam;
  ForwardCache<T> cache;
  std::vector<Matrix> batch;
  batch.reserve(cfg.batch_size);

  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    model.set_training(true);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(train_windows[order[k]].values);
      const double loss = static_cast<double>(model.forward_train(batch, cache));
      grads.set_zero();
      model.backward(cache, grads);
      clip_global_norm(grads, cfg.clip_norm);
      adam_step(model.params(), grads, adam, cfg.adam());
      loss_sum += loss * static_cast<double>(batch.size());
    }
    model.set_training(false);

    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()),
                    evaluate_loss(model, val_windows)};
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (cfg.patience > 0 && !std::isnan(rec.val_loss)) {
      if (rec.val_loss < best_val) {
        best_val = rec.val_loss;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  }
  model.set_training(false);
  return history;
}

// Continues training an already fitted model on SCRAM windows with the same
// architecture and hyperparameters.
template <typename T>
TrainHistory finetune(Autoencoder<T>& model, std::span<const WindowTensor> scram_train,
                      std::span<const WindowTensor> scram_val, const TrainConfig& cfg,
                      const EpochCallback& on_epoch = {}) {
  return train(model, scram_train, scram_val, cfg, on_epoch);
}

// Splits n items proportionally to `weights` using largest remainders, so
// 47 cycles with weights {34, 10, 3} gives exactly 34/10/3 and 24 SCRAMs
// with {20, 4} gives 20/4.
inline std::vector<std::size_t> proportional_split(std::size_t n,
                                                   const std::vector<double>& weights) {
  if (weights.empty()) throw ValidationError("proportional_split: no weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("proportional_split: weights must sum to > 0");
  std::vector<std::size_t> sizes(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0.0) throw ValidationError("proportional_split: negative weight");
    const double exact = static_cast<double>(n) * weights[k] / total;
    sizes[k] = static_cast<std::size_t>(std::floor(exact));
    assigned += sizes[k];
    remainders.push_back({exact - std::floor(exact), k});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[remainders[k].second];
  return sizes;
}

}  // namespace scram_xai
