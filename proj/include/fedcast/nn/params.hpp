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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fedcast/nn/lstm_config.hpp"

namespace fedcast::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Offsets of every tensor inside the flat learnable vector. Matrices are
// column-major. LSTM gate blocks are stacked in the order z, s, f, o.
struct ParamLayout {
  struct LstmBlock {
    std::size_t w_offset, v_offset, b_offset, in_dim;
  };
  struct FfnBlock {
    std::size_t offset, rows, cols;
  };

  std::vector<LstmBlock> lstm;
  std::vector<FfnBlock> ffn;
  std::size_t proj_offset = 0;
  std::size_t total = 0;

  explicit ParamLayout(const LstmConfig& cfg) {
    const std::size_t w = cfg.hidden_width;
    std::size_t off = 0;
    for (std::size_t m = 0; m < cfg.lstm_layers; ++m) {
      const std::size_t in = cfg.lstm_input_dim(m);
      LstmBlock blk{off, off + 4 * w * in, off + 4 * w * in + 4 * w * w, in};
      off = blk.b_offset + 4 * w;
      lstm.push_back(blk);
    }
    for (std::size_t l = 0; l < cfg.ffn_layers; ++l) {
      FfnBlock blk{off, cfg.ffn_width, cfg.ffn_input_dim(l)};
      off += blk.rows * blk.cols;
      ffn.push_back(blk);
    }
    proj_offset = off;
    total = off + cfg.output_dim() * cfg.head_width();
  }
};

inline std::size_t learnable_count(const LstmConfig& cfg) { return ParamLayout(cfg).total; }

// Learnable tensors plus the constant initial hidden states h0 (one per layer).
template <typename S>
struct ModelParams {
  LstmConfig config;
  std::vector<S> weights;
  std::vector<S> h0;

  ModelParams() = default;
  explicit ModelParams(const LstmConfig& cfg)
      : config(cfg), weights(learnable_count(cfg), S(0)), h0(cfg.lstm_layers * cfg.hidden_width, S(0)) {}

  ParamLayout layout() const { return ParamLayout(config); }

  std::size_t size() const { return weights.size(); }

  template <typename T>
  ModelParams<T> cast() const {
    ModelParams<T> out;
    out.config = config;
    out.weights.assign(weights.begin(), weights.end());
    out.h0.assign(h0.begin(), h0.end());
    return out;
  }

  // Stamp used to detect activation caches that outlive a parameter change.
  std::uint64_t stamp() const {
    std::uint64_t h = fnv1a(weights.data(), weights.size() * sizeof(S));
    return fnv1a(h0.data(), h0.size() * sizeof(S), h);
  }

  bool operator==(const ModelParams&) const = default;
};

// Same layout as ModelParams::weights; h0 has no gradient.
template <typename S>
struct Gradients {
  LstmConfig config;
  std::vector<S> values;

  Gradients() = default;
  explicit Gradients(const LstmConfig& cfg) : config(cfg), values(learnable_count(cfg), S(0)) {}
};

template <typename S>
using MatMap = Eigen::Map<Mat<S>>;
template <typename S>
using ConstMatMap = Eigen::Map<const Mat<S>>;

template <typename S>
ConstMatMap<S> view(const std::vector<S>& flat, std::size_t offset, std::size_t rows,
                    std::size_t cols) {
  return ConstMatMap<S>(flat.data() + offset, Eigen::Index(rows), Eigen::Index(cols));
}

template <typename S>
MatMap<S> view(std::vector<S>& flat, std::size_t offset, std::size_t rows, std::size_t cols) {
  return MatMap<S>(flat.data() + offset, Eigen::Index(rows), Eigen::Index(cols));
}

// Owned (aligned) copy of a block. Eigen's vectorized kernels pick their code
// path from the base alignment of the operands, so products over maps into a
// std::vector could round differently from one allocation to the next; the
// compute paths always work on copies to keep results bit-reproducible.
template <typename S>
Mat<S> load(const std::vector<S>& flat, std::size_t offset, std::size_t rows, std::size_t cols) {
  return view(flat, offset, rows, cols);
}

template <typename S, typename Derived>
void store(std::vector<S>& flat, std::size_t offset, const Eigen::MatrixBase<Derived>& block) {
  const Mat<S> owned = block;
  view(flat, offset, std::size_t(owned.rows()), std::size_t(owned.cols())) = owned;
}

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) matrices, zero biases, h0 ~ N(0, 0.01)
// with 0.01 read as the variance.
template <typename S = float>
ModelParams<S> init_params(const LstmConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams<S> p(cfg);
  const ParamLayout lay(cfg);
  std::mt19937_64 rng(seed);
  auto fill_uniform = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
    const double k = 1.0 / std::sqrt(double(fan_in));
    std::uniform_real_distribution<double> u(-k, k);
    for (std::size_t i = 0; i < count; ++i) p.weights[offset + i] = S(u(rng));
  };
  const std::size_t w = cfg.hidden_width;
  for (const auto& blk : lay.lstm) {
    fill_uniform(blk.w_offset, 4 * w * blk.in_dim, blk.in_dim);
    fill_uniform(blk.v_offset, 4 * w * w, w);
  }
  for (const auto& blk : lay.ffn) fill_uniform(blk.offset, blk.rows * blk.cols, blk.cols);
  fill_uniform(lay.proj_offset, cfg.output_dim() * cfg.head_width(), cfg.head_width());
  std::normal_distribution<double> n01(0.0, 0.1);
  for (auto& h : p.h0) h = S(n01(rng));
  return p;
}

}  // namespace fedcast::nn
