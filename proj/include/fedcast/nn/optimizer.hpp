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
#include <variant>
#include <vector>

#include "fedcast/nn/params.hpp"

namespace fedcast::nn {

struct Sgd {
  double lr = 1e-2;
};

// Moment buffers are sized lazily on the first step.
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
};

using OptimizerState = std::variant<Sgd, Adam>;

inline const char* optimizer_name(const OptimizerState& s) {
  return std::holds_alternative<Sgd>(s) ? "sgd" : "adam";
}

// Fresh state with the same hyperparameters (moments cleared).
inline OptimizerState reset_state(const OptimizerState& s) {
  if (const auto* a = std::get_if<Adam>(&s)) {
    Adam fresh;
    fresh.lr = a->lr;
    fresh.beta1 = a->beta1;
    fresh.beta2 = a->beta2;
    fresh.eps = a->eps;
    return fresh;
  }
  return s;
}

template <typename S>
void optimizer_step(ModelParams<S>& params, const Gradients<S>& grads, OptimizerState& state) {
  const std::size_t n = params.weights.size();
  require(grads.values.size() == n, Errc::kShapeMismatch, "optimizer_step: gradient size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    require(std::isfinite(double(grads.values[i])), Errc::kNonFinite,
            "optimizer_step: gradient component " + std::to_string(i) + " is not finite");

  if (auto* sgd = std::get_if<Sgd>(&state)) {
    const S lr = S(sgd->lr);
    for (std::size_t i = 0; i < n; ++i) params.weights[i] -= lr * grads.values[i];
    return;
  }
  auto& adam = std::get<Adam>(state);
  if (adam.m.size() != n) {
    require(adam.m.empty() && adam.t == 0, Errc::kShapeMismatch,
            "optimizer_step: Adam moments do not match the parameters");
    adam.m.assign(n, 0.0);
    adam.v.assign(n, 0.0);
  }
  ++adam.t;
  const double c1 = 1.0 - std::pow(adam.beta1, double(adam.t));
  const double c2 = 1.0 - std::pow(adam.beta2, double(adam.t));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = double(grads.values[i]);
    adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * g;
    adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * g * g;
    const double mhat = adam.m[i] / c1;
    const double vhat = adam.v[i] / c2;
    params.weights[i] = S(double(params.weights[i]) - adam.lr * mhat / (std::sqrt(vhat) + adam.eps));
  }
}

}  // namespace fedcast::nn
