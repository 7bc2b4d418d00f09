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

#include <vector>

#include "fedcast/data/preprocess.hpp"
#include "fedcast/data/window.hpp"
#include "fedcast/metrics/metrics.hpp"
#include "fedcast/nn/train.hpp"

namespace fedcast::metrics {

struct EvalResult {
  double mae = 0.0;
  double nrmse = 0.0;
  std::vector<double> step_mae;  // one entry per horizon step
  std::uint64_t inference_flops = 0;
};

// Scores predictions in original units. `target_scaler` holds the statistics
// of the target features (Scaler::subset); an empty scaler means the windows
// are already unscaled.
inline EvalResult score_predictions(std::span<const double> pred, const data::WindowedDataset& ds,
                                    const data::Scaler& target_scaler) {
  require(pred.size() == ds.targets.size(), Errc::kShapeMismatch, "prediction count mismatch");
  const std::size_t dp = ds.target_dim, T = ds.horizon;
  std::vector<double> p(pred.begin(), pred.end()), y(ds.targets);
  if (target_scaler.dim() > 0) {
    require(target_scaler.dim() == dp, Errc::kShapeMismatch, "target scaler dimension mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto f = Eigen::Index(i % dp);
      p[i] = p[i] * target_scaler.std(f) + target_scaler.mean(f);
      y[i] = y[i] * target_scaler.std(f) + target_scaler.mean(f);
    }
  }
  EvalResult r;
  r.mae = mae(p, y);
  r.nrmse = nrmse(p, y);
  r.step_mae.assign(T, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r.step_mae[(i / dp) % T] += std::abs(p[i] - y[i]);
  for (auto& v : r.step_mae) v /= double(ds.n_windows * dp);
  return r;
}

template <typename S>
EvalResult evaluate(const nn::ModelParams<S>& params, const data::WindowedDataset& ds,
                    const data::Scaler& target_scaler) {
  require(!ds.empty(), Errc::kEmpty, "evaluate: empty dataset");
  const auto pred = nn::predict(params, ds);
  auto r = score_predictions(pred, ds, target_scaler);
  r.inference_flops = nn::flops_per_window(params.config) * ds.n_windows;
  return r;
}

}  // namespace fedcast::metrics
