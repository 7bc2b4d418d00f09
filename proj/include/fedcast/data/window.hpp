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

#include "fedcast/data/series.hpp"
#include "fedcast/nn/lstm_config.hpp"

namespace fedcast::data {

// Supervised window pairs. Inputs are stored [window][step][feature],
// targets [window][step][target feature].
struct WindowedDataset {
  std::size_t lookback = 0;
  std::size_t input_dim = 0;
  std::size_t horizon = 0;
  std::size_t target_dim = 0;
  std::size_t n_windows = 0;
  Split split = Split::kUnsplit;
  std::vector<double> inputs;
  std::vector<double> targets;

  std::size_t input_stride() const { return lookback * input_dim; }
  std::size_t target_stride() const { return horizon * target_dim; }

  std::span<const double> input_span(std::size_t first, std::size_t count) const {
    return {inputs.data() + first * input_stride(), count * input_stride()};
  }
  std::span<const double> target_span(std::size_t first, std::size_t count) const {
    return {targets.data() + first * target_stride(), count * target_stride()};
  }

  bool empty() const { return n_windows == 0; }

  bool compatible(const nn::LstmConfig& cfg) const {
    return lookback == cfg.lookback && input_dim == cfg.input_dim && horizon == cfg.horizon &&
           target_dim == cfg.target_dim;
  }

  // Subset of windows in the given order.
  WindowedDataset gather(std::span<const std::size_t> order) const {
    WindowedDataset out = shape_only();
    out.n_windows = order.size();
    out.inputs.reserve(order.size() * input_stride());
    out.targets.reserve(order.size() * target_stride());
    for (std::size_t i : order) {
      auto in = input_span(i, 1);
      auto tg = target_span(i, 1);
      out.inputs.insert(out.inputs.end(), in.begin(), in.end());
      out.targets.insert(out.targets.end(), tg.begin(), tg.end());
    }
    return out;
  }

  WindowedDataset shape_only() const {
    WindowedDataset out;
    out.lookback = lookback;
    out.input_dim = input_dim;
    out.horizon = horizon;
    out.target_dim = target_dim;
    out.split = split;
    return out;
  }
};

// Window pairs carved from `series` with stride 1: input rows [t - lookback, t),
// target rows [t, t + horizon) restricted to `target_features`.
inline WindowedDataset make_windows(const RawSeries& series, const nn::LstmConfig& cfg,
                                    std::span<const std::size_t> target_features) {
  require(target_features.size() == cfg.target_dim, Errc::kShapeMismatch,
          "target feature list length must equal target_dim");
  require(series.dim() == cfg.input_dim, Errc::kShapeMismatch,
          "series has " + std::to_string(series.dim()) + " features, config expects " +
              std::to_string(cfg.input_dim));
  for (std::size_t f : target_features)
    require(f < series.dim(), Errc::kOutOfRange,
            "target feature index " + std::to_string(f) + " out of range");
  const std::size_t n = series.rows();
  require(n >= cfg.lookback + cfg.horizon, Errc::kTooShort,
          "series of " + std::to_string(n) + " rows cannot hold a window of " +
              std::to_string(cfg.lookback + cfg.horizon));

  WindowedDataset ds;
  ds.lookback = cfg.lookback;
  ds.input_dim = cfg.input_dim;
  ds.horizon = cfg.horizon;
  ds.target_dim = cfg.target_dim;
  ds.split = series.split;
  ds.n_windows = n - cfg.lookback - cfg.horizon + 1;
  ds.inputs.resize(ds.n_windows * ds.input_stride());
  ds.targets.resize(ds.n_windows * ds.target_stride());
  for (std::size_t w = 0; w < ds.n_windows; ++w) {
    double* in = ds.inputs.data() + w * ds.input_stride();
    for (std::size_t t = 0; t < cfg.lookback; ++t)
      for (std::size_t f = 0; f < cfg.input_dim; ++f)
        in[t * cfg.input_dim + f] = series.values(Eigen::Index(w + t), Eigen::Index(f));
    double* tg = ds.targets.data() + w * ds.target_stride();
    for (std::size_t t = 0; t < cfg.horizon; ++t)
      for (std::size_t i = 0; i < cfg.target_dim; ++i)
        tg[t * cfg.target_dim + i] =
            series.values(Eigen::Index(w + cfg.lookback + t), Eigen::Index(target_features[i]));
  }
  return ds;
}

// Concatenation in argument order; all parts must share one shape.
inline WindowedDataset concat(std::span<const WindowedDataset> parts) {
  require(!parts.empty(), Errc::kEmpty, "concat of zero datasets");
  WindowedDataset out = parts.front().shape_only();
  for (const auto& p : parts) {
    require(p.lookback == out.lookback && p.input_dim == out.input_dim &&
                p.horizon == out.horizon && p.target_dim == out.target_dim,
            Errc::kShapeMismatch, "concat: datasets have different window shapes");
    out.inputs.insert(out.inputs.end(), p.inputs.begin(), p.inputs.end());
    out.targets.insert(out.targets.end(), p.targets.begin(), p.targets.end());
    out.n_windows += p.n_windows;
  }
  return out;
}

}  // namespace fedcast::data
