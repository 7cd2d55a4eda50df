#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "scram_xai/errors.hpp"

namespace scram_xai {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Gate blocks are stacked in this order inside W, U and b.
enum class Gate : int { Forget = 0, Input = 1, Candidate = 2, Output = 3 };

template <typename T>
Mat<T> sigmoid(const Mat<T>& z) {
  return (T(1) + (-z.array()).exp()).inverse().matrix();
}

// tanh through the vectorized exp; Eigen's double tanh is scalar. Saturates
// cleanly to ±1 when exp overflows or underflows.
template <typename Derived>
auto tanh_exp(const Eigen::ArrayBase<Derived>& z) {
  using T = typename Derived::Scalar;
  return T(1) - T(2) / ((T(2) * z).exp() + T(1));
}

// One LSTM layer: W is 4H x inputs, U is 4H x H, b is 4H x 1.
template <typename T>
struct LstmParams {
  Mat<T> W;
  Mat<T> U;
  Mat<T> b;

  static LstmParams zeros(Eigen::Index inputs, Eigen::Index units) {
    return {Mat<T>::Zero(4 * units, inputs), Mat<T>::Zero(4 * units, units),
            Mat<T>::Zero(4 * units, 1)};
  }

  Eigen::Index units() const { return U.cols(); }
  Eigen::Index inputs() const { return W.cols(); }

  auto gate(const Mat<T>& m, Gate g) const {
    return m.middleRows(static_cast<int>(g) * units(), units());
  }

  template <typename F>
  void visit(F&& f) {
    f(W);
    f(U);
    f(b);
  }
  template <typename F>
  void visit(F&& f) const {
    f(W);
    f(U);
    f(b);
  }
};

// Affine map y = W x + b, applied column-wise.
template <typename T>
struct DenseParams {
  Mat<T> W;
  Mat<T> b;

  static DenseParams zeros(Eigen::Index inputs, Eigen::Index outputs) {
    return {Mat<T>::Zero(outputs, inputs), Mat<T>::Zero(outputs, 1)};
  }

  Mat<T> apply(const Mat<T>& x) const { return (W * x).colwise() + b.col(0); }

  template <typename F>
  void visit(F&& f) {
    f(W);
    f(b);
  }
  template <typename F>
  void visit(F&& f) const {
    f(W);
    f(b);
  }
};

template <typename T>
struct CellOutput {
  Mat<T> h;
  Mat<T> c;
};

namespace detail {

template <typename T>
void check_cell_shapes(const Mat<T>& x, const Mat<T>& h_prev, const Mat<T>& c_prev,
                       const LstmParams<T>& p) {
  const auto H = p.units();
  if (p.U.rows() != 4 * H || p.W.rows() != 4 * H || p.b.rows() != 4 * H || p.b.cols() != 1) {
    throw ShapeError("lstm: parameter blocks disagree with declared units");
  }
  if (x.rows() != p.inputs()) {
    throw ShapeError("lstm: input has " + std::to_string(x.rows()) + " rows, layer expects " +
                     std::to_string(p.inputs()));
  }
  if (h_prev.rows() != H || c_prev.rows() != H || h_prev.cols() != x.cols() ||
      c_prev.cols() != x.cols()) {
    throw ShapeError("lstm: state shape does not match layer units / batch");
  }
}

// Gate activations for one step, stacked f, i, c~, o.
template <typename T>
Mat<T> gate_activations(const Mat<T>& x, const Mat<T>& h_prev, const LstmParams<T>& p) {
  const auto H = p.units();
  Mat<T> z = p.W * x + p.U * h_prev;
  z.colwise() += p.b.col(0);
  Mat<T> a(z.rows(), z.cols());
  a.topRows(2 * H) = sigmoid<T>(z.topRows(2 * H));
  a.middleRows(2 * H, H) = tanh_exp(z.middleRows(2 * H, H).array()).matrix();
  a.bottomRows(H) = sigmoid<T>(z.bottomRows(H));
  return a;
}

}  // namespace detail

// f = σ(W_f x + U_f h + b_f), i = σ(...), c~ = tanh(...), o = σ(...),
// c = f ⊙ c_prev + i ⊙ c~, h = o ⊙ tanh(c). Columns of x are batch entries.
template <typename T>
CellOutput<T> lstm_cell_step(const Mat<T>& x, const Mat<T>& h_prev, const Mat<T>& c_prev,
                             const LstmParams<T>& p) {
  detail::check_cell_shapes(x, h_prev, c_prev, p);
  const auto H = p.units();
  const Mat<T> a = detail::gate_activations(x, h_prev, p);
  CellOutput<T> out;
  out.c = (a.topRows(H).array() * c_prev.array() +
           a.middleRows(H, H).array() * a.middleRows(2 * H, H).array())
              .matrix();
  out.h = (a.bottomRows(H).array() * tanh_exp(out.c.array())).matrix();
  return out;
}

// Activations kept from a forward pass over one sequence, needed by BPTT.
template <typename T>
struct LstmCache {
  std::vector<Mat<T>> x;       // inputs, length w
  std::vector<Mat<T>> gates;   // activated gates, length w
  std::vector<Mat<T>> c;       // c[0] is the zero initial state, length w + 1
  std::vector<Mat<T>> tanh_c;  // tanh(c[t + 1]), length w
  std::vector<Mat<T>> h;       // h[0] is the zero initial state, length w + 1
};

// Runs the layer over xs (each inputs x B) from zero state. Returns h_1..h_w.
template <typename T>
std::vector<Mat<T>> lstm_forward(const LstmParams<T>& p, const std::vector<Mat<T>>& xs,
                                 LstmCache<T>* cache) {
  if (xs.empty()) throw ShapeError("lstm: empty input sequence");
  const auto H = p.units();
  const auto B = xs.front().cols();
  Mat<T> h = Mat<T>::Zero(H, B);
  Mat<T> c = Mat<T>::Zero(H, B);
  std::vector<Mat<T>> hs;
  hs.reserve(xs.size());
  if (cache) {
    *cache = {};
    cache->c.push_back(c);
    cache->h.push_back(h);
  }
  for (const auto& x : xs) {
    detail::check_cell_shapes(x, h, c, p);
    Mat<T> a = detail::gate_activations(x, h, p);
    c = (a.topRows(H).array() * c.array() +
         a.middleRows(H, H).array() * a.middleRows(2 * H, H).array())
            .matrix();
    Mat<T> tc = tanh_exp(c.array()).matrix();
    h = (a.bottomRows(H).array() * tc.array()).matrix();
    hs.push_back(h);
    if (cache) {
      cache->x.push_back(x);
      cache->gates.push_back(std::move(a));
      cache->c.push_back(c);
      cache->tanh_c.push_back(std::move(tc));
      cache->h.push_back(h);
    }
  }
  return hs;
}

// Backpropagation through time. dhs[t] is dLoss/dh_{t+1} coming from above
// (an empty matrix means zero). Accumulates into grads and returns dLoss/dx_t.
template <typename T>
std::vector<Mat<T>> lstm_backward(const LstmParams<T>& p, const LstmCache<T>& cache,
                                  const std::vector<Mat<T>>& dhs, LstmParams<T>& grads) {
  const std::size_t steps = cache.x.size();
  if (steps == 0 || cache.h.size() != steps + 1) {
    throw StateError("lstm_backward: no cached forward pass");
  }
  if (dhs.size() != steps) throw ShapeError("lstm_backward: gradient sequence length mismatch");
  const auto H = p.units();
  const auto B = cache.x.front().cols();
  Mat<T> dh_next = Mat<T>::Zero(H, B);
  Mat<T> dc_next = Mat<T>::Zero(H, B);
  Mat<T> dz(4 * H, B);
  std::vector<Mat<T>> dxs(steps);

  for (std::size_t k = steps; k-- > 0;) {
    const Mat<T>& a = cache.gates[k];
    const auto f = a.topRows(H).array();
    const auto i = a.middleRows(H, H).array();
    const auto g = a.middleRows(2 * H, H).array();
    const auto o = a.bottomRows(H).array();
    const auto tc = cache.tanh_c[k].array();

    Mat<T> dh = dh_next;
    if (dhs[k].size() != 0) dh += dhs[k];
    const auto dha = dh.array();

    const Mat<T> dc = (dha * o * (T(1) - tc.square()) + dc_next.array()).matrix();
    const auto dca = dc.array();
    dz.topRows(H) = (dca * cache.c[k].array() * f * (T(1) - f)).matrix();
    dz.middleRows(H, H) = (dca * g * i * (T(1) - i)).matrix();
    dz.middleRows(2 * H, H) = (dca * i * (T(1) - g.square())).matrix();
    dz.bottomRows(H) = (dha * tc * o * (T(1) - o)).matrix();

    grads.W.noalias() += dz * cache.x[k].transpose();
    grads.U.noalias() += dz * cache.h[k].transpose();
    grads.b.col(0) += dz.rowwise().sum();

    dxs[k].noalias() = p.W.transpose() * dz;
    dh_next.noalias() = p.U.transpose() * dz;
    dc_next = (dca * f).matrix();
  }
  return dxs;
}

}  // namespace scram_xai
