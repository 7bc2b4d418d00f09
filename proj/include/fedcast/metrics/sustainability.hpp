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
#include <cstdint>

#include "fedcast/common.hpp"

namespace fedcast::metrics {

inline constexpr double kDefaultJoulesPerFlop = 1e-9;

inline double energy_wh(double flops, double joules_per_flop = kDefaultJoulesPerFlop) {
  require(flops >= 0.0 && joules_per_flop >= 0.0, Errc::kInvalidArgument,
          "energy_wh: negative input");
  return flops * joules_per_flop / 3600.0;
}

// Per-phase FLOP counts and the transmitted data size of one run.
struct EnergyLedger {
  std::uint64_t train_flops = 0;
  std::uint64_t inference_flops = 0;
  double joules_per_flop = kDefaultJoulesPerFlop;
  double ds_kb = 0.0;

  double train_wh() const { return energy_wh(double(train_flops), joules_per_flop); }
  double inference_wh() const { return energy_wh(double(inference_flops), joules_per_flop); }
  double total_wh() const { return train_wh() + inference_wh(); }

  EnergyLedger& operator+=(const EnergyLedger& o) {
    train_flops += o.train_flops;
    inference_flops += o.inference_flops;
    return *this;
  }
};

// Exponents of the training (alpha, beta, gamma) and inference (alpha', beta')
// terms. Aggregate-initialized values are not checked; make() enforces the
// unit-sum invariant.
struct SustainabilityWeights {
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;
  double alpha_inf = 0.5;
  double beta_inf = 0.5;

  void validate() const {
    for (double w : {alpha, beta, gamma, alpha_inf, beta_inf})
      require(w >= 0.0, Errc::kInvariant, "sustainability weights must be >= 0");
    require(std::abs(alpha + beta + gamma - 1.0) <= 1e-9, Errc::kInvariant,
            "alpha + beta + gamma must equal 1");
    require(std::abs(alpha_inf + beta_inf - 1.0) <= 1e-9, Errc::kInvariant,
            "alpha' + beta' must equal 1");
  }

  static SustainabilityWeights make(double a, double b, double g, double ai, double bi) {
    SustainabilityWeights w{a, b, g, ai, bi};
    w.validate();
    return w;
  }
};

enum class InferenceMode {
  kShifted,  // (1 + E)^a' (1 + C)^b'
  kStrict,   // E^a' C^b'
};

inline double s_train(double e_val, double c_train_wh, double ds_kb, const SustainabilityWeights& w) {
  require(e_val >= 0.0 && c_train_wh >= 0.0 && ds_kb >= 0.0, Errc::kInvalidArgument,
          "s_train: inputs must be >= 0");
  return std::pow(1.0 + e_val, w.alpha) * std::pow(1.0 + c_train_wh, w.beta) *
         std::pow(1.0 + ds_kb, w.gamma);
}

inline double s_inference(double e_test, double c_inf_wh, const SustainabilityWeights& w,
                          InferenceMode mode = InferenceMode::kShifted) {
  require(e_test >= 0.0 && c_inf_wh >= 0.0, Errc::kInvalidArgument,
          "s_inference: inputs must be >= 0");
  if (mode == InferenceMode::kStrict)
    return std::pow(e_test, w.alpha_inf) * std::pow(c_inf_wh, w.beta_inf);
  return std::pow(1.0 + e_test, w.alpha_inf) * std::pow(1.0 + c_inf_wh, w.beta_inf);
}

inline double sustainability(double s_tr, double s_inf) {
  require(s_tr >= 0.0 && s_inf >= 0.0, Errc::kInvalidArgument, "sustainability: negative factor");
  return s_tr * s_inf;
}

struct SustainabilityScore {
  double s_train = 0.0;
  double s_inference = 0.0;
  double s = 0.0;
};

inline SustainabilityScore score(double e_val, double e_test, const EnergyLedger& ledger,
                                 const SustainabilityWeights& w,
                                 InferenceMode mode = InferenceMode::kShifted) {
  SustainabilityScore out;
  out.s_train = s_train(e_val, ledger.train_wh(), ledger.ds_kb, w);
  out.s_inference = s_inference(e_test, ledger.inference_wh(), w, mode);
  out.s = sustainability(out.s_train, out.s_inference);
  return out;
}

}  // namespace fedcast::metrics
