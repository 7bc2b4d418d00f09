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

#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "fedcast/data/preprocess.hpp"
#include "fedcast/data/window.hpp"
#include "fedcast/fl/selection.hpp"
#include "fedcast/fl/strategy.hpp"
#include "fedcast/metrics/evaluate.hpp"
#include "fedcast/metrics/sustainability.hpp"
#include "fedcast/nn/serialize.hpp"
#include "fedcast/nn/train.hpp"

namespace fedcast::fl {

// One base station after preprocessing.
struct ClientData {
  std::string id;
  data::WindowedDataset train, val, test;
  data::Scaler target_scaler;   // statistics of the target features, for original-unit metrics
  std::size_t train_rows = 0;   // rows of the scaled training split
  std::size_t feature_dim = 0;

  double contribution() const { return double(train.n_windows); }
  // float32 bytes of the raw training split, the payload a central server would receive.
  double train_kb() const { return double(train_rows * feature_dim * 4) / 1000.0; }
};

struct FlOptions {
  nn::LstmConfig model;
  std::size_t rounds = 10;
  std::size_t epochs = 3;
  nn::OptimizerState local_optimizer = nn::Adam{};
  std::size_t batch_size = 128;
  bool shuffle = true;
  AggregationStrategy strategy = FedAvg{};
  SelectionPolicy selection = SelectAll{};
  std::uint64_t seed = 0;
  std::size_t parallel = 1;     // client threads per round
  bool eval_each_round = true;  // per-round validation NRMSE in the reports
};

// Local state a client keeps between rounds. The optimizer state and epoch
// counter persist, so E epochs per round for R rounds equal R*E uninterrupted
// epochs of local training.
struct ClientState {
  const ClientData* data = nullptr;
  nn::OptimizerState optimizer;
  std::uint64_t epochs_done = 0;
  std::uint64_t shuffle_seed = 0;
  std::vector<std::uint32_t> visits;  // per train window

  ClientState(const ClientData& d, const FlOptions& opt)
      : data(&d),
        optimizer(nn::reset_state(opt.local_optimizer)),
        shuffle_seed(mix_seed(opt.seed, fnv1a(d.id))),
        visits(d.train.n_windows, 0) {}
};

struct RoundReport {
  std::size_t round = 0;
  std::vector<std::string> selected;
  double mean_train_loss = 0.0;       // contribution-weighted over the trained clients
  std::vector<double> val_nrmse;      // per client, model deployed after this round
  std::uint64_t cumulative_flops = 0;
  std::uint64_t bytes_transmitted = 0;  // this round, download plus upload
};

struct RunResult {
  // One global model (federated, centralized) or one model per client (individual).
  std::vector<nn::ModelParams<float>> models;
  std::vector<RoundReport> rounds;
  metrics::EnergyLedger ledger;                 // training FLOPs and DS
  std::vector<std::vector<std::uint32_t>> visits;  // per client, per train window

  const nn::ModelParams<float>& model_for(std::size_t client) const {
    return models.size() == 1 ? models.front() : models.at(client);
  }
};

namespace detail {

inline nn::TrainOptions train_options(const FlOptions& opt, ClientState& st) {
  nn::TrainOptions t;
  t.batch_size = opt.batch_size;
  t.shuffle = opt.shuffle;
  t.shuffle_seed = st.shuffle_seed;
  t.epoch_offset = st.epochs_done;
  t.visits = st.visits;
  return t;
}

inline void validate(const std::vector<ClientData>& clients, const FlOptions& opt) {
  require(!clients.empty(), Errc::kEmpty, "no clients");
  opt.model.validate();
  validate(opt.strategy);
  require(opt.epochs >= 1, Errc::kInvariant, "epochs must be >= 1");
  require(opt.parallel >= 1, Errc::kInvariant, "parallel must be >= 1");
  for (const auto& c : clients) {
    require(!c.train.empty(), Errc::kEmpty, "client " + c.id + " has no training windows");
    require(c.train.compatible(opt.model), Errc::kShapeMismatch,
            "client " + c.id + " windows do not match the model config");
  }
}

inline std::vector<double> val_errors(const std::vector<ClientData>& clients,
                                      const std::function<const nn::ModelParams<float>&(std::size_t)>& model) {
  std::vector<double> out;
  for (std::size_t k = 0; k < clients.size(); ++k)
    out.push_back(clients[k].val.empty() ? 0.0
                                          : metrics::evaluate(model(k), clients[k].val, clients[k].target_scaler).nrmse);
  return out;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure in index order.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t t, std::size_t stride) {
    for (std::size_t i = t; i < n; i += stride) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t p = std::min(threads, n);
  if (p <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < p; ++t) pool.emplace_back(work, t, p);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::string where(const std::string& client, std::size_t round) {
  return "client " + client + ", round " + std::to_string(round);
}

}  // namespace detail

// Trains a copy of `global` for `epochs` on the client's training split.
inline ClientUpdate client_update(const nn::ModelParams<float>& global, ClientState& state, std::size_t epochs,
                                  const FlOptions& opt) {
  require(epochs >= 1, Errc::kInvariant, "client_update needs epochs >= 1");
  auto local = global;
  const auto res = nn::train_epochs(local, state.data->train, epochs, state.optimizer, detail::train_options(opt, state));
  state.epochs_done += epochs;
  ClientUpdate u;
  u.client_id = state.data->id;
  u.contribution = state.data->contribution();
  u.steps = res.steps;
  u.train_loss = res.mean_train_loss;
  u.flops = res.flops;
  u.delta.resize(global.weights.size());
  for (std::size_t i = 0; i < u.delta.size(); ++i) u.delta[i] = double(local.weights[i]) - double(global.weights[i]);
  return u;
}

inline RunResult run_federated(const std::vector<ClientData>& clients, const FlOptions& opt,
                               const nn::ModelParams<float>* initial = nullptr) {
  detail::validate(clients, opt);
  std::vector<std::string> ids;
  std::vector<ClientState> states;
  for (const auto& c : clients) {
    ids.push_back(c.id);
    states.emplace_back(c, opt);
  }
  ServerState server = ServerState::start(initial ? *initial : nn::init_params(opt.model, opt.seed));
  const double model_kb = nn::param_size_kb(server.global);
  const auto model_bytes = std::uint64_t(nn::serialize_params(server.global).size());

  RunResult out;
  std::uint64_t flops = 0;
  for (std::size_t r = 0; r < opt.rounds; ++r) {
    const auto picked = select_clients(ids, opt.selection, r, opt.seed);
    std::vector<ClientUpdate> updates(picked.size());
    detail::parallel_for(picked.size(), opt.parallel, [&](std::size_t i) {
      try {
        updates[i] = client_update(server.global, states[picked[i]], opt.epochs, opt);
      } catch (const Error& e) {
        throw e.with_context(detail::where(ids[picked[i]], r));
      }
    });
    aggregate(server, updates, opt.strategy);

    RoundReport rep;
    rep.round = r;
    double loss = 0.0, total_c = 0.0;
    for (const auto& u : updates) {
      rep.selected.push_back(u.client_id);
      loss += u.contribution * u.train_loss;
      total_c += u.contribution;
      flops += u.flops;
    }
    rep.mean_train_loss = loss / total_c;
    rep.cumulative_flops = flops;
    rep.bytes_transmitted = 2 * model_bytes * picked.size();
    if (opt.eval_each_round)
      rep.val_nrmse = detail::val_errors(clients, [&](std::size_t) -> const nn::ModelParams<float>& { return server.global; });
    out.rounds.push_back(std::move(rep));
  }
  out.models.push_back(std::move(server.global));
  out.ledger.train_flops = flops;
  out.ledger.ds_kb = model_kb;
  for (auto& s : states) out.visits.push_back(std::move(s.visits));
  return out;
}

// Each client trains its own model on local data for R*E epochs, reported per round.
inline RunResult run_individual(const std::vector<ClientData>& clients, const FlOptions& opt) {
  detail::validate(clients, opt);
  std::vector<ClientState> states;
  for (const auto& c : clients) states.emplace_back(c, opt);
  RunResult out;
  const auto init = nn::init_params(opt.model, opt.seed);
  out.models.assign(clients.size(), init);
  std::vector<nn::TrainResult> last(clients.size());
  std::uint64_t flops = 0;
  for (std::size_t r = 0; r < opt.rounds; ++r) {
    detail::parallel_for(clients.size(), opt.parallel, [&](std::size_t k) {
      try {
        last[k] = nn::train_epochs(out.models[k], clients[k].train, opt.epochs, states[k].optimizer,
                                   detail::train_options(opt, states[k]));
        states[k].epochs_done += opt.epochs;
      } catch (const Error& e) {
        throw e.with_context(detail::where(clients[k].id, r));
      }
    });
    RoundReport rep;
    rep.round = r;
    double loss = 0.0, total_c = 0.0;
    for (std::size_t k = 0; k < clients.size(); ++k) {
      rep.selected.push_back(clients[k].id);
      loss += clients[k].contribution() * last[k].mean_train_loss;
      total_c += clients[k].contribution();
      flops += last[k].flops;
    }
    rep.mean_train_loss = loss / total_c;
    rep.cumulative_flops = flops;
    if (opt.eval_each_round)
      rep.val_nrmse = detail::val_errors(clients, [&](std::size_t k) -> const nn::ModelParams<float>& { return out.models[k]; });
    out.rounds.push_back(std::move(rep));
  }
  out.ledger.train_flops = flops;
  out.ledger.ds_kb = 0.0;
  for (auto& s : states) out.visits.push_back(std::move(s.visits));
  return out;
}

// One model trained for R*E epochs on the concatenated training windows of
// every client (each client keeps its own scaling).
inline RunResult run_centralized(const std::vector<ClientData>& clients, const FlOptions& opt) {
  detail::validate(clients, opt);
  std::vector<data::WindowedDataset> parts;
  double ds_kb = 0.0;
  for (const auto& c : clients) {
    parts.push_back(c.train);
    ds_kb += c.train_kb();
  }
  ClientData pooled;
  pooled.id = clients.size() == 1 ? clients.front().id : "centralized";
  pooled.train = data::concat(parts);
  ClientState st(pooled, opt);

  RunResult out;
  out.models.push_back(nn::init_params(opt.model, opt.seed));
  std::uint64_t flops = 0;
  for (std::size_t r = 0; r < opt.rounds; ++r) {
    nn::TrainResult res;
    try {
      res = nn::train_epochs(out.models.front(), pooled.train, opt.epochs, st.optimizer, detail::train_options(opt, st));
    } catch (const Error& e) {
      throw e.with_context(detail::where(pooled.id, r));
    }
    st.epochs_done += opt.epochs;
    flops += res.flops;
    RoundReport rep;
    rep.round = r;
    rep.selected.push_back(pooled.id);
    rep.mean_train_loss = res.mean_train_loss;
    rep.cumulative_flops = flops;
    if (opt.eval_each_round)
      rep.val_nrmse = detail::val_errors(clients, [&](std::size_t) -> const nn::ModelParams<float>& { return out.models.front(); });
    out.rounds.push_back(std::move(rep));
  }
  out.ledger.train_flops = flops;
  out.ledger.ds_kb = ds_kb;
  std::size_t off = 0;
  for (const auto& c : clients) {
    out.visits.emplace_back(st.visits.begin() + std::ptrdiff_t(off),
                            st.visits.begin() + std::ptrdiff_t(off + c.train.n_windows));
    off += c.train.n_windows;
  }
  return out;
}

// Personal copy of the global model trained further on the client's own
// training split with a fresh optimizer state.
inline nn::ModelParams<float> local_finetune(const nn::ModelParams<float>& global, const ClientData& client,
                                             std::size_t epochs, const FlOptions& opt,
                                             std::uint64_t* flops = nullptr) {
  auto personal = global;
  if (epochs == 0) return personal;
  auto state = nn::reset_state(opt.local_optimizer);
  nn::TrainOptions t;
  t.batch_size = opt.batch_size;
  t.shuffle = opt.shuffle;
  t.shuffle_seed = mix_seed(opt.seed, fnv1a("finetune:" + client.id));
  const auto res = nn::train_epochs(personal, client.train, epochs, state, t);
  if (flops) *flops += res.flops;
  return personal;
}

// Test NRMSE of every client under the full federation and under each
// single-client exclusion. Row 0 is "all", row k+1 excludes client k; the last
// column is the row mean. Excluded clients are still scored.
struct DeletionTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> client_ids;
  Eigen::MatrixXd nrmse;
};

inline DeletionTable deletion_study(const std::vector<ClientData>& clients, FlOptions opt) {
  require(clients.size() >= 2, Errc::kInvariant, "deletion study needs at least two clients");
  const std::size_t K = clients.size();
  DeletionTable t;
  t.nrmse = Eigen::MatrixXd::Zero(Eigen::Index(K + 1), Eigen::Index(K + 1));
  for (const auto& c : clients) t.client_ids.push_back(c.id);
  opt.eval_each_round = false;
  for (std::size_t row = 0; row <= K; ++row) {
    opt.selection = row == 0 ? SelectionPolicy{SelectAll{}} : SelectionPolicy{SelectExclude{clients[row - 1].id}};
    t.row_labels.push_back(row == 0 ? "all" : "all\\{" + clients[row - 1].id + "}");
    const auto run = run_federated(clients, opt);
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double e = metrics::evaluate(run.models.front(), clients[k].test, clients[k].target_scaler).nrmse;
      t.nrmse(Eigen::Index(row), Eigen::Index(k)) = e;
      sum += e;
    }
    t.nrmse(Eigen::Index(row), Eigen::Index(K)) = sum / double(K);
  }
  return t;
}

}  // namespace fedcast::fl
