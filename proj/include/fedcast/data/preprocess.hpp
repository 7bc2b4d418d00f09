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
#include <array>
#include <cmath>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "fedcast/data/series.hpp"

namespace fedcast::data {

// Cleansing: non-finite cells, and negative cells of schema features (all of
// which are counts, sizes, indices or variances), are replaced by zero.
inline std::pair<RawSeries, std::size_t> zero_corrupted(RawSeries series) {
  const auto& schema = pdcch_features();
  std::vector<bool> nonneg(series.dim());
  for (std::size_t c = 0; c < series.dim(); ++c)
    nonneg[c] = std::find(schema.begin(), schema.end(), series.feature_names[c]) != schema.end();
  std::size_t zeroed = 0;
  for (Eigen::Index c = 0; c < series.values.cols(); ++c)
    for (Eigen::Index r = 0; r < series.values.rows(); ++r) {
      double& v = series.values(r, c);
      if (!std::isfinite(v) || (nonneg[std::size_t(c)] && v < 0.0)) {
        v = 0.0;
        ++zeroed;
      }
    }
  return {std::move(series), zeroed};
}

// Means of consecutive non-overlapping blocks; a trailing partial block is
// dropped. Each output row takes the first timestamp of its block.
inline RawSeries downsample(const RawSeries& series, std::size_t block = 120) {
  require(block >= 1, Errc::kInvalidArgument, "downsample block must be >= 1");
  require(series.rows() >= block, Errc::kTooShort,
          "series of " + std::to_string(series.rows()) + " rows is shorter than one block of " +
              std::to_string(block));
  const std::size_t n_out = series.rows() / block;
  RawSeries out;
  out.client_id = series.client_id;
  out.feature_names = series.feature_names;
  out.split = series.split;
  out.values.resize(Eigen::Index(n_out), series.values.cols());
  out.timestamps.reserve(n_out);
  for (std::size_t b = 0; b < n_out; ++b) {
    out.timestamps.push_back(series.timestamps[b * block]);
    out.values.row(Eigen::Index(b)) =
        series.values.middleRows(Eigen::Index(b * block), Eigen::Index(block)).colwise().mean();
  }
  return out;
}

// Per-feature standardization statistics.
struct Scaler {
  static constexpr double kStdFloor = 1e-8;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  std::size_t dim() const { return std::size_t(mean.size()); }

  // Statistics of a subset of features, in the given order.
  Scaler subset(std::span<const std::size_t> features) const {
    Scaler s;
    s.mean.resize(Eigen::Index(features.size()));
    s.std.resize(Eigen::Index(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
      require(features[i] < dim(), Errc::kOutOfRange, "scaler subset index out of range");
      s.mean(Eigen::Index(i)) = mean(Eigen::Index(features[i]));
      s.std(Eigen::Index(i)) = std(Eigen::Index(features[i]));
    }
    return s;
  }
};

inline Scaler fit_scaler(const RawSeries& train) {
  require(train.split != Split::kVal && train.split != Split::kTest, Errc::kWrongSplit,
          "scaler must be fitted on the training split");
  require(train.rows() > 0, Errc::kEmpty, "cannot fit a scaler on an empty training split");
  Scaler s;
  s.mean = train.values.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train.values.rowwise() - s.mean.transpose();
  s.std = (centered.array().square().colwise().sum() / double(train.rows())).sqrt().transpose();
  s.std = s.std.cwiseMax(Scaler::kStdFloor);
  return s;
}

inline RawSeries transform(const Scaler& scaler, RawSeries series) {
  require(scaler.dim() == series.dim(), Errc::kShapeMismatch, "scaler dimension mismatch");
  series.values = ((series.values.rowwise() - scaler.mean.transpose()).array().rowwise() /
                   scaler.std.transpose().array())
                      .matrix();
  return series;
}

inline RawSeries inverse_transform(const Scaler& scaler, RawSeries series) {
  require(scaler.dim() == series.dim(), Errc::kShapeMismatch, "scaler dimension mismatch");
  series.values = ((series.values.array().rowwise() * scaler.std.transpose().array()).matrix().rowwise() +
                   scaler.mean.transpose());
  return series;
}

struct SplitSeries {
  RawSeries train, val, test;
};

// Contiguous chronological split with boundaries floor(f1*n) and floor((f1+f2)*n).
inline SplitSeries chrono_split(const RawSeries& series,
                                std::array<double, 3> fractions = {0.6, 0.2, 0.2}) {
  for (double f : fractions) require(f >= 0.0, Errc::kInvalidArgument, "negative split fraction");
  require(std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) <= 1e-9, Errc::kInvalidArgument,
          "split fractions must sum to 1");
  const std::size_t n = series.rows();
  // The epsilon guards products such as 0.6 * 10 landing just below an integer.
  const auto b1 = std::size_t(std::floor(fractions[0] * double(n) + 1e-9));
  const auto b2 = std::size_t(std::floor((fractions[0] + fractions[1]) * double(n) + 1e-9));
  require(b1 > 0 && b2 > b1 && n > b2, Errc::kEmpty,
          "split of " + std::to_string(n) + " rows leaves an empty segment");
  return {series.slice(0, b1, Split::kTrain), series.slice(b1, b2, Split::kVal),
          series.slice(b2, n, Split::kTest)};
}

}  // namespace fedcast::data
