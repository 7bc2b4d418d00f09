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

#include <algorithm>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "fedcast/data/window.hpp"
#include "fedcast/nn/flops.hpp"
#include "fedcast/nn/lstm.hpp"
#include "fedcast/nn/optimizer.hpp"

namespace fedcast::nn {

struct TrainOptions {
  std::size_t batch_size = 128;
  bool shuffle = false;
  std::uint64_t shuffle_seed = 0;
  // Index of the first epoch; keeps shuffles distinct across resumed calls.
  std::uint64_t epoch_offset = 0;
  // Optional per-window visit counter (size n_windows).
  std::span<std::uint32_t> visits = {};
};

struct TrainResult {
  double mean_train_loss = 0.0;  // mean window loss over the final epoch
  std::uint64_t flops = 0;
  std::uint64_t steps = 0;
  std::uint64_t windows_seen = 0;
};

// Window order of one epoch.
inline std::vector<std::size_t> epoch_order(std::size_t n, const TrainOptions& opt,
                                            std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t(0));
  if (opt.shuffle) {
    std::mt19937_64 rng(mix_seed(opt.shuffle_seed, opt.epoch_offset + epoch));
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

template <typename S>
TrainResult train_epochs(ModelParams<S>& params, const data::WindowedDataset& dataset,
                         std::size_t epochs, OptimizerState& state, const TrainOptions& opt = {}) {
  require(!dataset.empty(), Errc::kEmpty, "train_epochs: empty dataset");
  require(dataset.compatible(params.config), Errc::kShapeMismatch,
          "train_epochs: dataset windows do not match the model config");
  require(opt.batch_size >= 1, Errc::kInvalidArgument, "batch_size must be >= 1");
  require(opt.visits.empty() || opt.visits.size() == dataset.n_windows, Errc::kShapeMismatch,
          "visit counter size mismatch");

  TrainResult res;
  const std::size_t n = dataset.n_windows;
  const std::uint64_t per_window = train_flops_per_window(params.config);
  std::vector<double> in_buf, tg_buf;
  for (std::size_t e = 0; e < epochs; ++e) {
    const auto order = epoch_order(n, opt, e);
    double epoch_loss = 0.0;
    for (std::size_t first = 0; first < n; first += opt.batch_size) {
      const std::size_t count = std::min(opt.batch_size, n - first);
      std::span<const double> in, tg;
      if (opt.shuffle) {
        in_buf.clear();
        tg_buf.clear();
        for (std::size_t k = first; k < first + count; ++k) {
          auto a = dataset.input_span(order[k], 1);
          auto b = dataset.target_span(order[k], 1);
          in_buf.insert(in_buf.end(), a.begin(), a.end());
          tg_buf.insert(tg_buf.end(), b.begin(), b.end());
        }
        in = in_buf;
        tg = tg_buf;
      } else {
        in = dataset.input_span(first, count);
        tg = dataset.target_span(first, count);
      }
      const auto cache = forward(params, in, count);
      epoch_loss += batch_loss(cache, tg) * double(count);
      const auto grads = backward(params, cache, tg);
      optimizer_step(params, grads, state);
      if (!opt.visits.empty())
        for (std::size_t k = first; k < first + count; ++k) ++opt.visits[order[k]];
      res.flops += per_window * count;
      res.windows_seen += count;
      ++res.steps;
    }
    res.mean_train_loss = epoch_loss / double(n);
  }
  return res;
}

// Predictions for every window, [window][step][target feature].
template <typename S>
std::vector<double> predict(const ModelParams<S>& params, const data::WindowedDataset& dataset,
                            std::size_t batch_size = 256) {
  require(dataset.compatible(params.config), Errc::kShapeMismatch,
          "predict: dataset windows do not match the model config");
  std::vector<double> out;
  out.reserve(dataset.n_windows * dataset.target_stride());
  for (std::size_t first = 0; first < dataset.n_windows; first += batch_size) {
    const std::size_t count = std::min(batch_size, dataset.n_windows - first);
    const auto cache = forward(params, dataset.input_span(first, count), count);
    for (Eigen::Index b = 0; b < Eigen::Index(count); ++b)
      for (Eigen::Index i = 0; i < cache.output.rows(); ++i) out.push_back(double(cache.output(i, b)));
  }
  return out;
}

}  // namespace fedcast::nn
