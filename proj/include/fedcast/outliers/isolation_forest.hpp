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
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fedcast/common.hpp"

namespace fedcast::outliers {

// Average unsuccessful-search path length of a binary search tree over n points.
inline double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  constexpr double kEulerGamma = 0.5772156649015329;
  const double harmonic = std::log(double(n - 1)) + kEulerGamma;
  return 2.0 * harmonic - 2.0 * double(n - 1) / double(n);
}

// Isolation forest over the rows of a matrix. Tree t is grown from its own
// stream seeded with seed + t, so trees are independent of build order.
class IsolationForest {
 public:
  IsolationForest(std::size_t n_trees, std::size_t subsample, std::uint64_t seed)
      : n_trees_(n_trees), subsample_(subsample), seed_(seed) {
    require(n_trees >= 1 && subsample >= 2, Errc::kInvalidArgument,
            "isolation forest needs >= 1 tree and subsample >= 2");
  }

  void fit(const Eigen::MatrixXd& x) {
    require(x.rows() >= 2, Errc::kTooShort, "isolation forest needs at least two rows");
    psi_ = std::min<std::size_t>(subsample_, std::size_t(x.rows()));
    const auto height_limit = std::size_t(std::ceil(std::log2(double(psi_))));
    trees_.assign(n_trees_, {});
    for (std::size_t t = 0; t < n_trees_; ++t) {
      std::mt19937_64 rng(seed_ + t);
      std::vector<std::size_t> rows(std::size_t(x.rows()));
      std::iota(rows.begin(), rows.end(), std::size_t(0));
      // Partial Fisher-Yates: the first psi entries are a sample without replacement.
      for (std::size_t i = 0; i < psi_; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
        std::swap(rows[i], rows[pick(rng)]);
      }
      rows.resize(psi_);
      build(trees_[t], x, rows, 0, height_limit, rng);
    }
  }

  // Anomaly score 2^(-E[h(x)] / c(psi)) in (0, 1); higher is more anomalous.
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    require(!trees_.empty(), Errc::kInvalidArgument, "isolation forest is not fitted");
    double total = 0.0;
    for (const auto& tree : trees_) total += path_length(tree, row);
    const double mean = total / double(trees_.size());
    return std::pow(2.0, -mean / average_path_length(psi_));
  }

  std::vector<double> score_all(const Eigen::MatrixXd& x) const {
    std::vector<double> s(std::size_t(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) s[std::size_t(r)] = score(x.row(r));
    return s;
  }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0, right = 0;
    std::size_t size = 0;
  };
  using Tree = std::vector<Node>;

  static std::size_t build(Tree& tree, const Eigen::MatrixXd& x, std::vector<std::size_t> rows,
                           std::size_t depth, std::size_t limit, std::mt19937_64& rng) {
    const std::size_t id = tree.size();
    tree.push_back({});
    tree[id].size = rows.size();
    if (depth >= limit || rows.size() <= 1) return id;

    // Only features that still vary inside the node can split it.
    std::vector<std::pair<int, std::pair<double, double>>> candidates;
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      double lo = x(Eigen::Index(rows[0]), f), hi = lo;
      for (std::size_t r : rows) {
        lo = std::min(lo, x(Eigen::Index(r), f));
        hi = std::max(hi, x(Eigen::Index(r), f));
      }
      if (hi > lo) candidates.push_back({int(f), {lo, hi}});
    }
    if (candidates.empty()) return id;

    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const auto& [feature, range] = candidates[pick(rng)];
    std::uniform_real_distribution<double> cut(range.first, range.second);
    const double split = cut(rng);
    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x(Eigen::Index(r), feature) < split ? left : right).push_back(r);

    tree[id].feature = feature;
    tree[id].split = split;
    const std::size_t l = build(tree, x, std::move(left), depth + 1, limit, rng);
    const std::size_t rt = build(tree, x, std::move(right), depth + 1, limit, rng);
    tree[id].left = l;
    tree[id].right = rt;
    return id;
  }

  static double path_length(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    std::size_t id = 0;
    double depth = 0.0;
    while (tree[id].feature >= 0) {
      id = row(tree[id].feature) < tree[id].split ? tree[id].left : tree[id].right;
      depth += 1.0;
    }
    return depth + average_path_length(tree[id].size);
  }

  std::size_t n_trees_, subsample_;
  std::uint64_t seed_;
  std::size_t psi_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace fedcast::outliers
