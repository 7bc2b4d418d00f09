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
#include <cmath>
#include <span>
#include <vector>

#include "fedcast/data/series.hpp"

namespace fedcast::data {

inline constexpr double kHistogramSmoothing = 1e-9;
inline constexpr std::size_t kDefaultBins = 50;

// Equal-width bins over [lo, hi]; values outside are clipped into the edge
// bins. Every bin receives `smoothing` before normalization.
inline std::vector<double> histogram(std::span<const double> values, std::size_t bins, double lo,
                                     double hi, double smoothing = kHistogramSmoothing) {
  require(bins >= 1, Errc::kInvalidArgument, "histogram needs at least one bin");
  require(hi > lo, Errc::kDegenerate, "histogram range is degenerate (lo >= hi)");
  std::vector<double> p(bins, smoothing);
  const double width = (hi - lo) / double(bins);
  for (double v : values) {
    auto b = std::ptrdiff_t(std::floor((v - lo) / width));
    b = std::clamp<std::ptrdiff_t>(b, 0, std::ptrdiff_t(bins) - 1);
    p[std::size_t(b)] += 1.0;
  }
  const double total = double(values.size()) + smoothing * double(bins);
  for (auto& x : p) x /= total;
  return p;
}

// KL(P || Q) in nats.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), Errc::kShapeMismatch, "KL: distributions differ in length");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0 && q[i] >= 0.0, Errc::kInvalidArgument, "KL: negative probability");
    sp += p[i];
    sq += q[i];
  }
  require(std::abs(sp - 1.0) <= 1e-9 && std::abs(sq - 1.0) <= 1e-9, Errc::kInvalidArgument,
          "KL: distributions must sum to 1");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    require(q[i] > 0.0, Errc::kDegenerate, "KL: Q has zero mass where P does not");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

// Entry (i, j) averages KL(hist_i || hist_j) over `features`, each histogram
// pair sharing the union of the two clients' value ranges. A feature that is
// the same constant in both clients contributes zero.
inline Eigen::MatrixXd kl_matrix(std::span<const RawSeries> clients,
                                 std::span<const std::size_t> features,
                                 std::size_t bins = kDefaultBins) {
  require(!features.empty(), Errc::kEmpty, "kl_matrix needs at least one feature");
  const auto K = Eigen::Index(clients.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, K);
  std::vector<std::vector<double>> columns(clients.size() * features.size());
  for (std::size_t k = 0; k < clients.size(); ++k)
    for (std::size_t f = 0; f < features.size(); ++f) {
      require(features[f] < clients[k].dim(), Errc::kOutOfRange, "kl feature index out of range");
      require(clients[k].rows() > 0, Errc::kEmpty, "kl_matrix: client without rows");
      const auto col = clients[k].values.col(Eigen::Index(features[f]));
      columns[k * features.size() + f].assign(col.data(), col.data() + col.size());
    }
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < K; ++j) {
      double sum = 0.0;
      for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& a = columns[std::size_t(i) * features.size() + f];
        const auto& b = columns[std::size_t(j) * features.size() + f];
        const double lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
        const double hi = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
        if (!(hi > lo)) continue;
        sum += kl_divergence(histogram(a, bins, lo, hi), histogram(b, bins, lo, hi));
      }
      out(i, j) = sum / double(features.size());
    }
  return out;
}

}  // namespace fedcast::data
