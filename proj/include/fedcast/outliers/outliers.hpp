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
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "fedcast/data/series.hpp"
#include "fedcast/outliers/isolation_forest.hpp"

namespace fedcast::outliers {

struct NoOutliers {};
struct ZScore {
  double threshold = 3.0;
};
struct Iqr {
  double k = 1.5;
};
struct Forest {
  std::size_t n_trees = 100;
  std::size_t subsample = 256;
  double contamination = 0.05;
  std::uint64_t seed = 0;
};
struct FloorCap {
  double lower_q = 0.01;
  double upper_q = 0.99;
};

using OutlierMethod = std::variant<NoOutliers, ZScore, Iqr, Forest, FloorCap>;

inline std::string method_name(const OutlierMethod& m) {
  static const char* names[] = {"none", "zscore", "iqr", "forest", "floorcap"};
  return names[m.index()];
}

inline void validate(const OutlierMethod& m) {
  if (const auto* z = std::get_if<ZScore>(&m))
    require(z->threshold > 0.0, Errc::kInvariant, "zscore threshold must be > 0");
  if (const auto* q = std::get_if<Iqr>(&m)) require(q->k > 0.0, Errc::kInvariant, "iqr k must be > 0");
  if (const auto* f = std::get_if<Forest>(&m))
    require(f->contamination > 0.0 && f->contamination < 0.5 && f->n_trees >= 1 && f->subsample >= 2,
            Errc::kInvariant, "forest needs 0 < contamination < 0.5, n_trees >= 1, subsample >= 2");
  if (const auto* fc = std::get_if<FloorCap>(&m))
    require(fc->lower_q >= 0.0 && fc->lower_q < fc->upper_q && fc->upper_q <= 1.0, Errc::kInvariant,
            "floorcap needs 0 <= lower_q < upper_q <= 1");
}

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Linear-interpolation (type 7) quantile.
inline double quantile(std::vector<double> v, double q) {
  require(!v.empty(), Errc::kEmpty, "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = double(v.size() - 1) * q;
  const auto lo = std::size_t(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct Detection {
  Mask mask;  // rows x features
  Bounds bounds;
  bool row_level = false;
  std::vector<double> scores;  // forest anomaly scores per row, empty otherwise
};

struct OutlierReport {
  std::string method;
  bool row_level = false;
  std::vector<std::size_t> flagged;    // per feature
  std::vector<std::size_t> corrected;  // per feature, cells actually moved
  Bounds bounds;
};

namespace detail {

inline std::vector<double> column(const data::RawSeries& s, std::size_t f) {
  const auto c = s.values.col(Eigen::Index(f));
  return {c.data(), c.data() + c.size()};
}

inline Bounds quantile_bounds(const data::RawSeries& s, double lq, double uq) {
  Bounds b{Eigen::VectorXd(s.dim()), Eigen::VectorXd(s.dim())};
  for (std::size_t f = 0; f < s.dim(); ++f) {
    const auto col = column(s, f);
    b.lower(Eigen::Index(f)) = quantile(col, lq);
    b.upper(Eigen::Index(f)) = quantile(col, uq);
  }
  return b;
}

}  // namespace detail

// Per-feature correction bounds of a method: the detector's own fences for
// zscore and iqr, quantiles for floorcap and for the forest.
inline Bounds fences(const data::RawSeries& s, const OutlierMethod& method) {
  const auto d = Eigen::Index(s.dim());
  const double inf = std::numeric_limits<double>::infinity();
  if (std::holds_alternative<NoOutliers>(method))
    return {Eigen::VectorXd::Constant(d, -inf), Eigen::VectorXd::Constant(d, inf)};
  if (const auto* z = std::get_if<ZScore>(&method)) {
    Bounds b{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (Eigen::Index f = 0; f < d; ++f) {
      const auto c = s.values.col(f);
      const double mu = c.mean();
      const double sigma = std::sqrt((c.array() - mu).square().mean());
      b.lower(f) = mu - z->threshold * sigma;
      b.upper(f) = mu + z->threshold * sigma;
    }
    return b;
  }
  if (const auto* q = std::get_if<Iqr>(&method)) {
    Bounds b{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (std::size_t f = 0; f < s.dim(); ++f) {
      const auto col = detail::column(s, f);
      const double q1 = quantile(col, 0.25), q3 = quantile(col, 0.75);
      b.lower(Eigen::Index(f)) = q1 - q->k * (q3 - q1);
      b.upper(Eigen::Index(f)) = q3 + q->k * (q3 - q1);
    }
    return b;
  }
  if (const auto* fc = std::get_if<FloorCap>(&method)) return detail::quantile_bounds(s, fc->lower_q, fc->upper_q);
  return detail::quantile_bounds(s, FloorCap{}.lower_q, FloorCap{}.upper_q);
}

// Flags outliers of a training split. Zscore, iqr and floorcap flag single
// cells strictly outside their fences; the forest flags whole rows.
inline Detection detect(const data::RawSeries& train, const OutlierMethod& method) {
  require(train.split == data::Split::kTrain, Errc::kWrongSplit,
          std::string("outlier detection runs on the training split only, got ") +
              data::split_name(train.split));
  validate(method);
  const auto n = Eigen::Index(train.rows());
  const auto d = Eigen::Index(train.dim());
  Detection det;
  det.mask = Mask::Constant(n, d, false);
  if (n == 0) {
    det.bounds = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
    return det;
  }
  det.bounds = fences(train, method);
  if (std::holds_alternative<NoOutliers>(method)) return det;

  if (const auto* f = std::get_if<Forest>(&method)) {
    det.row_level = true;
    if (n < 2) return det;
    IsolationForest forest(f->n_trees, f->subsample, f->seed);
    forest.fit(train.values);
    det.scores = forest.score_all(train.values);
    // Flag the top `contamination` fraction; rows tied with the first unflagged
    // score stay unflagged, so identical rows are never flagged.
    const auto k = std::size_t(std::floor(f->contamination * double(n)));
    if (k == 0) return det;
    std::vector<double> sorted = det.scores;
    std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(k), sorted.end(), std::greater<>());
    const double cutoff = sorted[k];
    for (Eigen::Index r = 0; r < n; ++r)
      if (det.scores[std::size_t(r)] > cutoff) det.mask.row(r).setConstant(true);
    return det;
  }

  if (const auto* z = std::get_if<ZScore>(&method)) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto col = train.values.col(c);
      const double mu = col.mean();
      const double sigma = std::sqrt((col.array() - mu).square().mean());
      if (sigma == 0.0) continue;
      det.mask.col(c) = ((col.array() - mu).abs() / sigma) > z->threshold;
    }
    return det;
  }
  for (Eigen::Index c = 0; c < d; ++c) {
    const auto col = train.values.col(c).array();
    det.mask.col(c) = (col < det.bounds.lower(c)) || (col > det.bounds.upper(c));
  }
  return det;
}

// Clamps flagged cells into [lower, upper] per feature; unflagged cells are
// untouched.
inline std::pair<data::RawSeries, OutlierReport> floor_cap(data::RawSeries series, const Mask& mask,
                                                           const Bounds& bounds) {
  require(mask.rows() == series.values.rows() && mask.cols() == series.values.cols(),
          Errc::kShapeMismatch, "outlier mask shape does not match the series");
  require(std::size_t(bounds.lower.size()) == series.dim() && std::size_t(bounds.upper.size()) == series.dim(),
          Errc::kShapeMismatch, "outlier bounds do not match the series");
  OutlierReport rep;
  rep.flagged.assign(series.dim(), 0);
  rep.corrected.assign(series.dim(), 0);
  rep.bounds = bounds;
  for (Eigen::Index c = 0; c < mask.cols(); ++c)
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
      if (!mask(r, c)) continue;
      ++rep.flagged[std::size_t(c)];
      double& v = series.values(r, c);
      const double clamped = std::clamp(v, bounds.lower(c), bounds.upper(c));
      if (clamped != v) {
        v = clamped;
        ++rep.corrected[std::size_t(c)];
      }
    }
  return {std::move(series), std::move(rep)};
}

// detect + floor_cap on a training split.
inline std::pair<data::RawSeries, OutlierReport> correct_outliers(const data::RawSeries& train,
                                                                  const OutlierMethod& method) {
  const auto det = detect(train, method);
  auto [out, rep] = floor_cap(train, det.mask, det.bounds);
  rep.method = method_name(method);
  rep.row_level = det.row_level;
  return {std::move(out), std::move(rep)};
}

}  // namespace fedcast::outliers
