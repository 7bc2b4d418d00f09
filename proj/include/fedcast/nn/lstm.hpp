/*
 * Copyright 2026 The fedcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <vector>

#include "fedcast/nn/params.hpp"

namespace fedcast::nn {

// Activation record of one batched forward pass. Column t*B + b of every
// per-step matrix belongs to window b at step t.
template <typename S>
struct ForwardCache {
  struct Layer {
    Mat<S> gates;  // 4w x (lookback*B), post-activation z, s, f, o
    Mat<S> cell;   // c_t
    Mat<S> tanh_cell;
    Mat<S> hidden;  // h_t
  };

  std::uint64_t stamp = 0;
  std::size_t batch = 0;
  Mat<S> input;  // d x (lookback*B)
  std::vector<Layer> layers;
  std::vector<Mat<S>> ffn;  // ffn[0] = last top-layer hidden state, ffn[l] = ReLU output of layer l
  Mat<S> output;            // (T*d') x B
};

namespace detail {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return S(1) / (S(1) + (-x).exp());
}

}  // namespace detail

// Batched forward pass over `batch` windows stored window-major as
// [window][step][feature] in `inputs`.
template <typename S>
ForwardCache<S> forward(const ModelParams<S>& params, std::span<const double> inputs,
                        std::size_t batch) {
  const LstmConfig& cfg = params.config;
  const auto L = Eigen::Index(cfg.lookback);
  const auto d = Eigen::Index(cfg.input_dim);
  const auto w = Eigen::Index(cfg.hidden_width);
  const auto B = Eigen::Index(batch);
  require(batch >= 1, Errc::kShapeMismatch, "forward needs at least one window");
  require(inputs.size() == batch * cfg.lookback * cfg.input_dim, Errc::kShapeMismatch,
          "forward: expected " + std::to_string(batch * cfg.lookback * cfg.input_dim) +
              " input values, got " + std::to_string(inputs.size()));
  require(params.weights.size() == learnable_count(cfg), Errc::kShapeMismatch,
          "forward: parameter vector does not match config");

  const ParamLayout lay(cfg);
  ForwardCache<S> cache;
  cache.stamp = params.stamp();
  cache.batch = batch;
  cache.input.resize(d, L * B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const double* win = inputs.data() + b * L * d;
    for (Eigen::Index t = 0; t < L; ++t)
      for (Eigen::Index f = 0; f < d; ++f) cache.input(f, t * B + b) = S(win[t * d + f]);
  }

  cache.layers.resize(cfg.lstm_layers);
  for (std::size_t m = 0; m < cfg.lstm_layers; ++m) {
    const auto& blk = lay.lstm[m];
    const Mat<S> W = load(params.weights, blk.w_offset, 4 * w, blk.in_dim);
    const Mat<S> V = load(params.weights, blk.v_offset, 4 * w, w);
    const Mat<S> bias = load(params.weights, blk.b_offset, 4 * w, 1);
    const Vec<S> h0 = Eigen::Map<const Vec<S>>(params.h0.data() + m * w, w);
    const Mat<S>& x = m == 0 ? cache.input : cache.layers[m - 1].hidden;

    auto& layer = cache.layers[m];
    Mat<S> pre(4 * w, L * B);
    pre.noalias() = W * x;
    pre.colwise() += bias.col(0);
    layer.cell.resize(w, L * B);
    layer.tanh_cell.resize(w, L * B);
    layer.hidden.resize(w, L * B);

    const Vec<S> rec0 = V * h0;
    for (Eigen::Index t = 0; t < L; ++t) {
      auto a = pre.middleCols(t * B, B);
      if (t == 0) {
        a.colwise() += rec0;
      } else {
        a.noalias() += V * layer.hidden.middleCols((t - 1) * B, B);
      }
      a.topRows(w).array() = a.topRows(w).array().tanh();
      a.bottomRows(3 * w).array() = detail::sigmoid(a.bottomRows(3 * w).array());

      const auto z = a.middleRows(0, w).array();
      const auto s = a.middleRows(w, w).array();
      const auto f = a.middleRows(2 * w, w).array();
      const auto o = a.middleRows(3 * w, w).array();
      auto c = layer.cell.middleCols(t * B, B).array();
      if (t == 0) {
        c = s * z;
      } else {
        c = s * z + f * layer.cell.middleCols((t - 1) * B, B).array();
      }
      layer.tanh_cell.middleCols(t * B, B).array() = c.tanh();
      layer.hidden.middleCols(t * B, B).array() = o * layer.tanh_cell.middleCols(t * B, B).array();
    }
    layer.gates = std::move(pre);
  }

  cache.ffn.resize(cfg.ffn_layers + 1);
  cache.ffn[0] = cache.layers.back().hidden.middleCols((L - 1) * B, B);
  for (std::size_t l = 0; l < cfg.ffn_layers; ++l) {
    const auto& blk = lay.ffn[l];
    const Mat<S> Wl = load(params.weights, blk.offset, blk.rows, blk.cols);
    cache.ffn[l + 1].noalias() = Wl * cache.ffn[l];
    cache.ffn[l + 1] = cache.ffn[l + 1].cwiseMax(S(0));
  }
  const Mat<S> Wp = load(params.weights, lay.proj_offset, cfg.output_dim(), cfg.head_width());
  cache.output.noalias() = Wp * cache.ffn.back();
  return cache;
}

// Single-window forward: `window` is lookback x d, the prediction T x d'.
template <typename S>
std::pair<Eigen::MatrixXd, ForwardCache<S>> forward(const ModelParams<S>& params,
                                                    const Eigen::MatrixXd& window) {
  const LstmConfig& cfg = params.config;
  require(std::size_t(window.rows()) == cfg.lookback && std::size_t(window.cols()) == cfg.input_dim,
          Errc::kShapeMismatch, "window must be lookback x input_dim");
  std::vector<double> flat(cfg.lookback * cfg.input_dim);
  for (std::size_t t = 0; t < cfg.lookback; ++t)
    for (std::size_t f = 0; f < cfg.input_dim; ++f) flat[t * cfg.input_dim + f] = window(t, f);
  auto cache = forward(params, std::span<const double>(flat), 1);
  Eigen::MatrixXd pred(cfg.horizon, cfg.target_dim);
  for (std::size_t t = 0; t < cfg.horizon; ++t)
    for (std::size_t i = 0; i < cfg.target_dim; ++i)
      pred(t, i) = double(cache.output(t * cfg.target_dim + i, 0));
  return {std::move(pred), std::move(cache)};
}

inline double mse_loss(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target) {
  require(prediction.rows() == target.rows() && prediction.cols() == target.cols(),
          Errc::kShapeMismatch, "mse_loss: prediction and target shapes differ");
  require(prediction.size() > 0, Errc::kEmpty, "mse_loss: empty matrices");
  return (prediction - target).squaredNorm() / double(prediction.size());
}

// Mean over windows of the per-window MSE; `targets` is [window][step][feature].
template <typename S>
double batch_loss(const ForwardCache<S>& cache, std::span<const double> targets) {
  const auto out = cache.output.rows();
  const auto B = cache.output.cols();
  require(targets.size() == std::size_t(out * B), Errc::kShapeMismatch,
          "batch_loss: target size mismatch");
  double sum = 0.0;
  for (Eigen::Index b = 0; b < B; ++b)
    for (Eigen::Index i = 0; i < out; ++i) {
      const double r = double(cache.output(i, b)) - targets[b * out + i];
      sum += r * r;
    }
  return sum / double(out * B);
}

// Exact gradient of batch_loss via backpropagation through time.
template <typename S>
Gradients<S> backward(const ModelParams<S>& params, const ForwardCache<S>& cache,
                      std::span<const double> targets) {
  const LstmConfig& cfg = params.config;
  require(cache.stamp == params.stamp(), Errc::kStaleCache,
          "backward: parameters changed since the forward pass");
  const auto L = Eigen::Index(cfg.lookback);
  const auto w = Eigen::Index(cfg.hidden_width);
  const auto B = Eigen::Index(cache.batch);
  const auto out = Eigen::Index(cfg.output_dim());
  require(targets.size() == std::size_t(out * B), Errc::kShapeMismatch,
          "backward: target size mismatch");

  const ParamLayout lay(cfg);
  Gradients<S> grads(cfg);

  Mat<S> dy(out, B);
  const S scale = S(2.0 / double(out * B));
  for (Eigen::Index b = 0; b < B; ++b)
    for (Eigen::Index i = 0; i < out; ++i)
      dy(i, b) = scale * (cache.output(i, b) - S(targets[b * out + i]));

  const Mat<S> Wp = load(params.weights, lay.proj_offset, out, cfg.head_width());
  store(grads.values, lay.proj_offset, Mat<S>(dy * cache.ffn.back().transpose()));
  Mat<S> dv = Wp.transpose() * dy;

  for (std::size_t l = cfg.ffn_layers; l-- > 0;) {
    const auto& blk = lay.ffn[l];
    dv.array() *= (cache.ffn[l + 1].array() > S(0)).template cast<S>();
    store(grads.values, blk.offset, Mat<S>(dv * cache.ffn[l].transpose()));
    const Mat<S> Wl = load(params.weights, blk.offset, blk.rows, blk.cols);
    Mat<S> next = Wl.transpose() * dv;
    dv = std::move(next);
  }

  // Gradient flowing into the hidden states of the current layer from above.
  Mat<S> dh_ext = Mat<S>::Zero(w, L * B);
  dh_ext.middleCols((L - 1) * B, B) = dv;

  for (std::size_t m = cfg.lstm_layers; m-- > 0;) {
    const auto& blk = lay.lstm[m];
    const auto& layer = cache.layers[m];
    const Mat<S> W = load(params.weights, blk.w_offset, 4 * w, blk.in_dim);
    const Mat<S> V = load(params.weights, blk.v_offset, 4 * w, w);
    const Vec<S> h0 = Eigen::Map<const Vec<S>>(params.h0.data() + m * w, w);
    const Mat<S>& x = m == 0 ? cache.input : cache.layers[m - 1].hidden;

    Mat<S> da(4 * w, L * B);
    Mat<S> dh_rec = Mat<S>::Zero(w, B);
    Mat<S> dc_next = Mat<S>::Zero(w, B);
    for (Eigen::Index t = L; t-- > 0;) {
      const auto g = layer.gates.middleCols(t * B, B);
      const auto z = g.middleRows(0, w).array();
      const auto s = g.middleRows(w, w).array();
      const auto f = g.middleRows(2 * w, w).array();
      const auto o = g.middleRows(3 * w, w).array();
      const auto tc = layer.tanh_cell.middleCols(t * B, B).array();

      const auto dh = (dh_ext.middleCols(t * B, B) + dh_rec).array();
      const Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic> dc =
          dc_next.array() + dh * o * (S(1) - tc.square());
      auto dat = da.middleCols(t * B, B);
      dat.middleRows(0, w).array() = dc * s * (S(1) - z.square());
      dat.middleRows(w, w).array() = dc * z * s * (S(1) - s);
      if (t > 0) {
        dat.middleRows(2 * w, w).array() =
            dc * layer.cell.middleCols((t - 1) * B, B).array() * f * (S(1) - f);
      } else {
        dat.middleRows(2 * w, w).setZero();
      }
      dat.middleRows(3 * w, w).array() = dh * tc * o * (S(1) - o);
      dc_next = (dc * f).matrix();
      if (t > 0) dh_rec.noalias() = V.transpose() * dat;
    }

    store(grads.values, blk.w_offset, Mat<S>(da * x.transpose()));
    store(grads.values, blk.b_offset, Mat<S>(da.rowwise().sum()));
    Mat<S> dV = da.middleCols(0, B).rowwise().sum() * h0.transpose();
    if (L > 1)
      dV.noalias() += da.middleCols(B, (L - 1) * B) * layer.hidden.middleCols(0, (L - 1) * B).transpose();
    store(grads.values, blk.v_offset, dV);

    if (m > 0) {
      Mat<S> below = W.transpose() * da;
      dh_ext = std::move(below);
    }
  }
  return grads;
}

}  // namespace fedcast::nn
