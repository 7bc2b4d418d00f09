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
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "fedcast/common.hpp"

namespace fedcast::metrics {

// Mean absolute error over all T x d' entries.
inline double mae(std::span<const double> pred, std::span<const double> truth) {
  require(pred.size() == truth.size(), Errc::kShapeMismatch, "mae: size mismatch");
  require(!pred.empty(), Errc::kEmpty, "mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / double(pred.size());
}

inline double mae(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  require(pred.rows() == truth.rows() && pred.cols() == truth.cols(), Errc::kShapeMismatch,
          "mae: shape mismatch");
  return mae(std::span<const double>(pred.data(), std::size_t(pred.size())),
             std::span<const double>(truth.data(), std::size_t(truth.size())));
}

// RMSE divided by the mean of the true values.
inline double nrmse(std::span<const double> pred, std::span<const double> truth) {
  require(pred.size() == truth.size(), Errc::kShapeMismatch, "nrmse: size mismatch");
  require(!pred.empty(), Errc::kEmpty, "nrmse: empty input");
  double sq = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - truth[i];
    sq += r * r;
    mean += truth[i];
  }
  mean /= double(truth.size());
  require(mean != 0.0, Errc::kDegenerate, "nrmse: mean of the true values is zero");
  return std::sqrt(sq / double(pred.size())) / mean;
}

inline double nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  require(pred.rows() == truth.rows() && pred.cols() == truth.cols(), Errc::kShapeMismatch,
          "nrmse: shape mismatch");
  return nrmse(std::span<const double>(pred.data(), std::size_t(pred.size())),
               std::span<const double>(truth.data(), std::size_t(truth.size())));
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Arithmetic mean and population standard deviation.
inline MeanStd seed_aggregate(std::span<const double> values) {
  require(!values.empty(), Errc::kEmpty, "seed_aggregate: no values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / double(values.size()))};
}

}  // namespace fedcast::metrics
