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

#include "fedcast/metrics/evaluate.hpp"

namespace fedcast::data {

// NRMSE increase when input feature `feature` is shuffled across windows
// (each window keeps its other features, the permuted column is taken whole
// from another window).
template <typename S>
double permutation_importance(const nn::ModelParams<S>& params, const WindowedDataset& ds,
                              std::size_t feature, std::uint64_t seed,
                              const Scaler& target_scaler = {}) {
  require(feature < ds.input_dim, Errc::kOutOfRange,
          "feature index " + std::to_string(feature) + " out of range");
  require(!ds.empty(), Errc::kEmpty, "permutation_importance: empty dataset");
  const double intact = metrics::evaluate(params, ds, target_scaler).nrmse;

  std::vector<std::size_t> perm(ds.n_windows);
  std::iota(perm.begin(), perm.end(), std::size_t(0));
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  WindowedDataset shuffled = ds;
  for (std::size_t w = 0; w < ds.n_windows; ++w)
    for (std::size_t t = 0; t < ds.lookback; ++t)
      shuffled.inputs[w * ds.input_stride() + t * ds.input_dim + feature] =
          ds.inputs[perm[w] * ds.input_stride() + t * ds.input_dim + feature];
  return metrics::evaluate(params, shuffled, target_scaler).nrmse - intact;
}

}  // namespace fedcast::data
