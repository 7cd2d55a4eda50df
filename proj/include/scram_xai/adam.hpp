#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "scram_xai/autoencoder.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/lstm.hpp"

namespace scram_xai {

struct AdamConfig {
  double learning_rate = 0.000352;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  std::vector<Mat<T>> m;  // first moments, one per parameter tensor
  std::vector<Mat<T>> v;  // second moments
  std::size_t step = 0;
};

// One bias-corrected Adam update of a single tensor. `step` is the 1-based
// count of updates including this one.
template <typename T>
void adam_update(Mat<T>& param, const Mat<T>& grad, Mat<T>& m, Mat<T>& v, std::size_t step,
                 const AdamConfig& cfg) {
  if (grad.rows() != param.rows() || grad.cols() != param.cols() || m.rows() != param.rows() ||
      m.cols() != param.cols() || v.rows() != param.rows() || v.cols() != param.cols()) {
    throw ShapeError("adam: parameter, gradient and moment shapes differ");
  }
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  m = b1 * m + (T(1) - b1) * grad;
  v = b2 * v + (T(1) - b2) * grad.cwiseProduct(grad);
  const T c1 = T(1) - static_cast<T>(std::pow(cfg.beta1, static_cast<double>(step)));
  const T c2 = T(1) - static_cast<T>(std::pow(cfg.beta2, static_cast<double>(step)));
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.epsilon);
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

template <typename T>
void adam_step(AeParams<T>& params, const AeParams<T>& grads, AdamState<T>& state,
               const AdamConfig& cfg) {
  std::vector<Mat<T>*> p;
  std::vector<const Mat<T>*> g;
  params.visit([&](Mat<T>& m) { p.push_back(&m); });
  grads.visit([&](const Mat<T>& m) { g.push_back(&m); });
  if (p.size() != g.size()) throw ShapeError("adam: gradient set does not match parameters");
  if (state.m.empty()) {
    for (auto* m : p) {
      state.m.push_back(Mat<T>::Zero(m->rows(), m->cols()));
      state.v.push_back(Mat<T>::Zero(m->rows(), m->cols()));
    }
  }
  if (state.m.size() != p.size()) throw ShapeError("adam: state does not match parameters");
  ++state.step;
  for (std::size_t k = 0; k < p.size(); ++k) {
    adam_update(*p[k], *g[k], state.m[k], state.v[k], state.step, cfg);
  }
}

// Rescales grads so their global L2 norm is at most max_norm. Returns the norm
// before clipping.
template <typename T>
double clip_global_norm(AeParams<T>& grads, double max_norm) {
  double sq = 0.0;
  grads.visit([&](const Mat<T>& m) { sq += static_cast<double>(m.squaredNorm()); });
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const T s = static_cast<T>(max_norm / norm);
    grads.visit([&](Mat<T>& m) { m *= s; });
  }
  return norm;
}

}  // namespace scram_xai
