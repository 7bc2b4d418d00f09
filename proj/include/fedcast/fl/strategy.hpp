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
#include <string>
#include <variant>
#include <vector>

#include "fedcast/nn/params.hpp"

namespace fedcast::fl {

struct FedAvg {};
struct FedAvgM {
  double beta = 0.9;
};
struct FedNova {};
// FedAdagrad keeps no first-moment decay (beta1 = 0): the update uses the
// current pseudo-gradient directly.
struct FedAdagrad {
  double eta_s = 0.01;
  double tau = 1e-3;
};
struct FedYogi {
  double eta_s = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double tau = 1e-3;
};
struct FedAdam {
  double eta_s = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double tau = 1e-3;
};

using AggregationStrategy = std::variant<FedAvg, FedAvgM, FedNova, FedAdagrad, FedYogi, FedAdam>;

inline const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {"fedavg",     "fedavgm", "fednova",
                                                 "fedadagrad", "fedyogi", "fedadam"};
  return names;
}

inline std::string strategy_name(const AggregationStrategy& s) { return strategy_names()[s.index()]; }

// Default-parameterized strategy by name.
inline AggregationStrategy make_strategy(const std::string& name) {
  if (name == "fedavg") return FedAvg{};
  if (name == "fedavgm") return FedAvgM{};
  if (name == "fednova") return FedNova{};
  if (name == "fedadagrad") return FedAdagrad{};
  if (name == "fedyogi") return FedYogi{};
  if (name == "fedadam") return FedAdam{};
  fail(Errc::kInvalidArgument, "unknown aggregation strategy '" + name + "'");
}

inline void validate(const AggregationStrategy& s) {
  auto unit = [](double b, const char* what) {
    require(b >= 0.0 && b < 1.0, Errc::kInvariant, std::string(what) + " must lie in [0, 1)");
  };
  auto positive = [](double x, const char* what) {
    require(x > 0.0, Errc::kInvariant, std::string(what) + " must be > 0");
  };
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, FedAvgM>) unit(st.beta, "beta");
        if constexpr (std::is_same_v<T, FedAdagrad>) {
          positive(st.eta_s, "eta_s");
          positive(st.tau, "tau");
        }
        if constexpr (std::is_same_v<T, FedYogi> || std::is_same_v<T, FedAdam>) {
          positive(st.eta_s, "eta_s");
          positive(st.tau, "tau");
          unit(st.beta1, "beta1");
          unit(st.beta2, "beta2");
        }
      },
      s);
}

struct ClientUpdate {
  std::string client_id;
  std::vector<double> delta;  // w_local - w_global
  double contribution = 0.0;  // local train-window count
  std::uint64_t steps = 0;    // local optimizer steps (tau)
  double train_loss = 0.0;
  std::uint64_t flops = 0;
};

struct ServerState {
  nn::ModelParams<float> global;
  std::size_t round = 0;
  std::vector<double> momentum;  // FedAvgM
  std::vector<double> m, v;      // FedOpt moments
  std::uint64_t step = 0;

  static ServerState start(nn::ModelParams<float> w) {
    ServerState s;
    s.global = std::move(w);
    return s;
  }
};

// Pseudo-gradient g = sum_k c_k (w + r_k delta_k) / sum_k c_k - w, accumulated
// in ascending client_id order. r_k = 1 except under FedNova, where
// r_k = tau_eff / tau_k. Summing local models rather than deltas makes the
// identities exact: identical client models give g = 0 bit for bit, and a
// single client reproduces its local model.
inline std::vector<double> pseudo_gradient(const std::vector<float>& w,
                                           std::vector<const ClientUpdate*> updates, bool normalize_steps) {
  std::sort(updates.begin(), updates.end(),
            [](const ClientUpdate* a, const ClientUpdate* b) { return a->client_id < b->client_id; });
  double total_c = 0.0, tau_eff = 0.0;
  for (const auto* u : updates) {
    total_c += u->contribution;
    tau_eff += u->contribution * double(u->steps);
  }
  tau_eff /= total_c;
  std::vector<double> acc(w.size(), 0.0);
  for (const auto* u : updates) {
    const double r = normalize_steps ? tau_eff / double(u->steps) : 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc[i] += u->contribution * (double(w[i]) + r * u->delta[i]);
  }
  for (std::size_t i = 0; i < w.size(); ++i) acc[i] = acc[i] / total_c - double(w[i]);
  return acc;
}

// One server step. Strategy state persists in `server` across rounds.
inline void aggregate(ServerState& server, const std::vector<ClientUpdate>& updates,
                      const AggregationStrategy& strategy) {
  require(!updates.empty(), Errc::kEmpty, "aggregate: no client updates");
  validate(strategy);
  auto& w = server.global.weights;
  std::vector<const ClientUpdate*> ptrs;
  for (const auto& u : updates) {
    require(u.delta.size() == w.size(), Errc::kShapeMismatch,
            "aggregate: update from " + u.client_id + " has " + std::to_string(u.delta.size()) +
                " entries, global model has " + std::to_string(w.size()));
    require(u.contribution > 0.0, Errc::kInvariant, "aggregate: contribution must be > 0");
    require(u.steps >= 1 || !std::holds_alternative<FedNova>(strategy), Errc::kInvariant,
            "aggregate: FedNova needs at least one local step");
    ptrs.push_back(&u);
  }
  const auto g = pseudo_gradient(w, ptrs, std::holds_alternative<FedNova>(strategy));
  const std::size_t n = w.size();

  if (std::holds_alternative<FedAvg>(strategy) || std::holds_alternative<FedNova>(strategy)) {
    for (std::size_t i = 0; i < n; ++i) w[i] = float(double(w[i]) + g[i]);
  } else if (const auto* am = std::get_if<FedAvgM>(&strategy)) {
    if (server.momentum.size() != n) server.momentum.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      server.momentum[i] = am->beta * server.momentum[i] + g[i];
      w[i] = float(double(w[i]) + server.momentum[i]);
    }
  } else {
    if (server.m.size() != n) {
      server.m.assign(n, 0.0);
      server.v.assign(n, 0.0);
    }
    double eta = 0.0, tau = 0.0, b1 = 0.0, b2 = 0.0;
    int kind = 0;  // 0 adagrad, 1 yogi, 2 adam
    if (const auto* a = std::get_if<FedAdagrad>(&strategy)) {
      eta = a->eta_s, tau = a->tau;
    } else if (const auto* y = std::get_if<FedYogi>(&strategy)) {
      eta = y->eta_s, tau = y->tau, b1 = y->beta1, b2 = y->beta2, kind = 1;
    } else {
      const auto& d = std::get<FedAdam>(strategy);
      eta = d.eta_s, tau = d.tau, b1 = d.beta1, b2 = d.beta2, kind = 2;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = g[i], g2 = gi * gi;
      server.m[i] = b1 * server.m[i] + (1.0 - b1) * gi;
      double& v = server.v[i];
      if (kind == 0) {
        v += g2;
      } else if (kind == 1) {
        const double diff = v - g2;
        v -= (1.0 - b2) * g2 * double((diff > 0.0) - (diff < 0.0));
      } else {
        v = b2 * v + (1.0 - b2) * g2;
      }
      w[i] = float(double(w[i]) + eta * server.m[i] / (std::sqrt(v) + tau));
    }
  }
  ++server.step;
  ++server.round;
}

}  // namespace fedcast::fl
