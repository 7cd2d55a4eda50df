#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/lstm.hpp"

namespace scram_xai {

struct LayerSpec {
  std::size_t units = 1;
  double dropout = 0.0;  // applied to this layer's output in training mode

  bool operator==(const LayerSpec&) const = default;
};

// Encoder LSTMs (sequence output, the last one keeps only its final state),
// a dense bottleneck, the bottleneck repeated `window` times, decoder LSTMs
// (sequence output) and a per-timestep dense projection to `features`.
struct AeArchitecture {
  std::size_t window = 10;
  std::size_t features = 9;
  std::vector<LayerSpec> encoder = {{256, 0.1}, {128, 0.0}};
  std::size_t bottleneck = 32;
  std::vector<LayerSpec> decoder = {{128, 0.2}, {128, 0.0}};

  // Same wiring with smaller layers, for desk-scale benchmark runs.
  static AeArchitecture desk_scale() {
    AeArchitecture a;
    a.encoder = {{64, 0.1}, {32, 0.0}};
    a.bottleneck = 16;
    a.decoder = {{32, 0.2}, {32, 0.0}};
    return a;
  }

  void validate() const {
    if (window == 0) throw ValidationError("architecture.window must be >= 1");
    if (features == 0) throw ValidationError("architecture.features must be >= 1");
    if (bottleneck == 0) throw ValidationError("architecture.bottleneck must be >= 1");
    if (encoder.empty() || decoder.empty()) {
      throw ValidationError("architecture needs at least one encoder and one decoder layer");
    }
    for (const auto* layers : {&encoder, &decoder}) {
      for (const auto& l : *layers) {
        if (l.units == 0) throw ValidationError("architecture: layer units must be >= 1");
        if (!(l.dropout >= 0.0 && l.dropout < 1.0)) {
          throw ValidationError("architecture: dropout must be in [0,1)");
        }
      }
    }
  }

  bool operator==(const AeArchitecture&) const = default;
};

// Every trainable tensor. visit() order is the checkpoint order: encoder
// layers (W, U, b), bottleneck (W, b), decoder layers (W, U, b), output (W, b).
template <typename T>
struct AeParams {
  std::vector<LstmParams<T>> encoder;
  DenseParams<T> bottleneck;
  std::vector<LstmParams<T>> decoder;
  DenseParams<T> output;

  static AeParams zeros(const AeArchitecture& arch) {
    AeParams p;
    auto in = static_cast<Eigen::Index>(arch.features);
    for (const auto& l : arch.encoder) {
      p.encoder.push_back(LstmParams<T>::zeros(in, static_cast<Eigen::Index>(l.units)));
      in = static_cast<Eigen::Index>(l.units);
    }
    p.bottleneck = DenseParams<T>::zeros(in, static_cast<Eigen::Index>(arch.bottleneck));
    in = static_cast<Eigen::Index>(arch.bottleneck);
    for (const auto& l : arch.decoder) {
      p.decoder.push_back(LstmParams<T>::zeros(in, static_cast<Eigen::Index>(l.units)));
      in = static_cast<Eigen::Index>(l.units);
    }
    p.output = DenseParams<T>::zeros(in, static_cast<Eigen::Index>(arch.features));
    return p;
  }

  template <typename F>
  void visit(F&& f) {
    for (auto& l : encoder) l.visit(f);
    bottleneck.visit(f);
    for (auto& l : decoder) l.visit(f);
    output.visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    for (const auto& l : encoder) l.visit(f);
    bottleneck.visit(f);
    for (const auto& l : decoder) l.visit(f);
    output.visit(f);
  }

  std::size_t size() const {
    std::size_t n = 0;
    visit([&](const Mat<T>& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
  }

  void set_zero() {
    visit([](Mat<T>& m) { m.setZero(); });
  }
};

// Everything a backward pass needs from the matching forward pass.
template <typename T>
struct ForwardCache {
  std::vector<Mat<T>> inputs;                   // x_t, features x B
  std::vector<LstmCache<T>> encoder;
  std::vector<std::vector<Mat<T>>> encoder_masks;  // per layer, per step (empty = none)
  Mat<T> encoder_state;                         // final encoder output after dropout
  std::vector<LstmCache<T>> decoder;
  std::vector<std::vector<Mat<T>>> decoder_masks;
  std::vector<Mat<T>> decoder_out;              // last decoder layer output per step
  std::vector<Mat<T>> outputs;                  // reconstruction per step
  bool valid = false;
};

template <typename T>
class Autoencoder {
 public:
  using Params = AeParams<T>;

  Autoencoder() : Autoencoder(AeArchitecture{}, 0) {}

  // Uniform init in ±1/sqrt(fan_in) per matrix, zero biases, forget-gate bias +1.
  Autoencoder(AeArchitecture arch, std::uint64_t seed)
      : arch_(std::move(arch)), dropout_rng_(seed ^ 0xd1b54a32d192ed03ULL) {
    arch_.validate();
    params_ = Params::zeros(arch_);
    std::mt19937_64 rng(seed);
    auto init = [&](Mat<T>& m) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<T>(u(rng));
      }
    };
    for (auto* layers : {&params_.encoder, &params_.decoder}) {
      for (auto& l : *layers) {
        init(l.W);
        init(l.U);
        l.b.middleRows(0, l.units()).setOnes();
      }
    }
    init(params_.bottleneck.W);
    init(params_.output.W);
  }

  const AeArchitecture& architecture() const { return arch_; }
  Params& params() { return params_; }
  const Params& params() const { return params_; }

  const std::optional<Scaler>& scaler() const { return scaler_; }
  void set_scaler(Scaler s) {
    if (s.features() != static_cast<Eigen::Index>(arch_.features)) {
      throw ShapeError("scaler feature count does not match the model");
    }
    scaler_ = std::move(s);
  }

  bool training() const { return training_; }
  void set_training(bool on) { training_ = on; }
  void reseed_dropout(std::uint64_t seed) { dropout_rng_.seed(seed); }

  // Reconstruction of one w x p window. Uses dropout only in training mode.
  Mat<T> forward(const Matrix& window) {
    check_window(window);
    auto ys = run(to_sequence(std::span(&window, 1)), dropout_source(), nullptr);
    return from_sequence(ys, 0);
  }

  // Inference-mode reconstruction; safe to call concurrently.
  Mat<T> reconstruct(const Matrix& window) const {
    check_window(window);
    auto ys = run(to_sequence(std::span(&window, 1)), nullptr, nullptr);
    return from_sequence(ys, 0);
  }

  // Inference-mode reconstruction of many windows, one batched pass.
  std::vector<Mat<T>> reconstruct_batch(std::span<const Matrix> windows) const {
    if (windows.empty()) return {};
    for (const auto& w : windows) check_window(w);
    auto ys = run(to_sequence(windows), nullptr, nullptr);
    std::vector<Mat<T>> out;
    out.reserve(windows.size());
    for (std::size_t b = 0; b < windows.size(); ++b) out.push_back(from_sequence(ys, b));
    return out;
  }

  // Same as reconstruct_batch but takes an already batched sequence
  // (xs[t] is features x B) and returns it in the same layout.
  std::vector<Mat<T>> reconstruct_sequence(const std::vector<Mat<T>>& xs) const {
    return run(xs, nullptr, nullptr);
  }

  // Training-path forward: fills cache, returns batch mean squared error.
  T forward_train(std::span<const Matrix> windows, ForwardCache<T>& cache) {
    for (const auto& w : windows) check_window(w);
    auto xs = to_sequence(windows);
    run(xs, dropout_source(), &cache);
    T loss = 0;
    for (std::size_t t = 0; t < xs.size(); ++t) loss += (cache.outputs[t] - xs[t]).squaredNorm();
    return loss / static_cast<T>(xs.size() * arch_.features * windows.size());
  }

  // Exact gradient of the batch MSE w.r.t. every parameter, accumulated into
  // grads (which must be shaped like params()). Dropout masks from the cached
  // forward pass are reused.
  void backward(const ForwardCache<T>& cache, Params& grads) const {
    if (!cache.valid) throw StateError("backward: no cached forward pass");
    const std::size_t w = cache.inputs.size();
    const auto B = cache.inputs.front().cols();
    const T scale = T(2) / static_cast<T>(w * arch_.features * static_cast<std::size_t>(B));

    std::vector<Mat<T>> upstream(w);
    for (std::size_t t = 0; t < w; ++t) {
      const Mat<T> dy = scale * (cache.outputs[t] - cache.inputs[t]);
      grads.output.W.noalias() += dy * cache.decoder_out[t].transpose();
      grads.output.b.col(0) += dy.rowwise().sum();
      upstream[t].noalias() = params_.output.W.transpose() * dy;
    }

    for (std::size_t k = params_.decoder.size(); k-- > 0;) {
      apply_masks(upstream, cache.decoder_masks[k]);
      upstream = lstm_backward(params_.decoder[k], cache.decoder[k], upstream, grads.decoder[k]);
    }

    // The bottleneck vector fed every decoder step.
    Mat<T> dz = upstream.front();
    for (std::size_t t = 1; t < w; ++t) dz += upstream[t];
    grads.bottleneck.W.noalias() += dz * cache.encoder_state.transpose();
    grads.bottleneck.b.col(0) += dz.rowwise().sum();
    Mat<T> dstate = params_.bottleneck.W.transpose() * dz;

    const std::size_t last = params_.encoder.size() - 1;
    if (!cache.encoder_masks[last].empty()) {
      dstate = (dstate.array() * cache.encoder_masks[last].back().array()).matrix();
    }
    upstream.assign(w, Mat<T>());
    upstream[w - 1] = std::move(dstate);
    for (std::size_t k = params_.encoder.size(); k-- > 0;) {
      if (k != last) apply_masks(upstream, cache.encoder_masks[k]);
      upstream = lstm_backward(params_.encoder[k], cache.encoder[k], upstream, grads.encoder[k]);
    }
  }

  // Batch layout helpers: xs[t] is features x B with column b = window b, row t.
  std::vector<Mat<T>> to_sequence(std::span<const Matrix> windows) const {
    const auto B = static_cast<Eigen::Index>(windows.size());
    const auto p = static_cast<Eigen::Index>(arch_.features);
    std::vector<Mat<T>> xs(arch_.window, Mat<T>(p, B));
    for (Eigen::Index b = 0; b < B; ++b) {
      const Matrix& win = windows[static_cast<std::size_t>(b)];
      for (std::size_t t = 0; t < arch_.window; ++t) {
        xs[t].col(b) = win.row(static_cast<Eigen::Index>(t)).transpose().template cast<T>();
      }
    }
    return xs;
  }

  Mat<T> from_sequence(const std::vector<Mat<T>>& ys, std::size_t b) const {
    Mat<T> out(static_cast<Eigen::Index>(arch_.window), static_cast<Eigen::Index>(arch_.features));
    for (std::size_t t = 0; t < ys.size(); ++t) {
      out.row(static_cast<Eigen::Index>(t)) = ys[t].col(static_cast<Eigen::Index>(b)).transpose();
    }
    return out;
  }

 private:
  void check_window(const Matrix& window) const {
    if (window.rows() != static_cast<Eigen::Index>(arch_.window) ||
        window.cols() != static_cast<Eigen::Index>(arch_.features)) {
      throw ShapeError("window is " + std::to_string(window.rows()) + "x" +
                       std::to_string(window.cols()) + ", model expects " +
                       std::to_string(arch_.window) + "x" + std::to_string(arch_.features));
    }
  }

  std::mt19937_64* dropout_source() { return training_ ? &dropout_rng_ : nullptr; }

  static Mat<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                             std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    Mat<T> m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng) < rate ? T(0) : keep_scale;
    }
    return m;
  }

  static void apply_masks(std::vector<Mat<T>>& seq, const std::vector<Mat<T>>& masks) {
    if (masks.empty()) return;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (seq[t].size() != 0) seq[t] = (seq[t].array() * masks[t].array()).matrix();
    }
  }

  // Dropout is active iff rng is non-null.
  std::vector<Mat<T>> run(const std::vector<Mat<T>>& xs, std::mt19937_64* rng,
                          ForwardCache<T>* cache) const {
    const std::size_t w = xs.size();
    const auto B = xs.front().cols();
    if (cache) {
      *cache = {};
      cache->inputs = xs;
      cache->encoder.resize(params_.encoder.size());
      cache->encoder_masks.resize(params_.encoder.size());
      cache->decoder.resize(params_.decoder.size());
      cache->decoder_masks.resize(params_.decoder.size());
    }

    std::vector<Mat<T>> seq = xs;
    Mat<T> state;
    for (std::size_t k = 0; k < params_.encoder.size(); ++k) {
      seq = lstm_forward(params_.encoder[k], seq, cache ? &cache->encoder[k] : nullptr);
      const double rate = arch_.encoder[k].dropout;
      const bool last = k + 1 == params_.encoder.size();
      if (last) seq = {seq.back()};
      if (rng && rate > 0.0) {
        std::vector<Mat<T>> masks;
        for (auto& h : seq) {
          masks.push_back(dropout_mask(h.rows(), B, rate, *rng));
          h = (h.array() * masks.back().array()).matrix();
        }
        if (cache) cache->encoder_masks[k] = std::move(masks);
      }
      if (last) state = seq.front();
    }

    const Mat<T> z = params_.bottleneck.apply(state);
    if (cache) cache->encoder_state = state;

    seq.assign(w, z);
    for (std::size_t k = 0; k < params_.decoder.size(); ++k) {
      seq = lstm_forward(params_.decoder[k], seq, cache ? &cache->decoder[k] : nullptr);
      const double rate = arch_.decoder[k].dropout;
      if (rng && rate > 0.0) {
        std::vector<Mat<T>> masks;
        for (auto& h : seq) {
          masks.push_back(dropout_mask(h.rows(), B, rate, *rng));
          h = (h.array() * masks.back().array()).matrix();
        }
        if (cache) cache->decoder_masks[k] = std::move(masks);
      }
    }

    std::vector<Mat<T>> ys;
    ys.reserve(w);
    for (const auto& h : seq) ys.push_back(params_.output.apply(h));
    if (cache) {
      cache->decoder_out = std::move(seq);
      cache->outputs = ys;
      cache->valid = true;
    }
    return ys;
  }

  AeArchitecture arch_;
  Params params_;
  std::optional<Scaler> scaler_;
  bool training_ = false;
  std::mt19937_64 dropout_rng_;
};

using AeModel = Autoencoder<double>;

// Mean of squared element-wise differences.
template <typename A, typename B>
double loss_mse(const Eigen::MatrixBase<A>& recon, const Eigen::MatrixBase<B>& target) {
  if (recon.rows() != target.rows() || recon.cols() != target.cols()) {
    throw ShapeError("loss_mse: shapes differ");
  }
  if (recon.size() == 0) throw ShapeError("loss_mse: empty input");
  return static_cast<double>((recon.template cast<double>() - target.template cast<double>())
                                 .squaredNorm()) /
         static_cast<double>(recon.size());
}

}  // namespace scram_xai
