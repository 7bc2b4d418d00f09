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
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fedcast/cli/config.hpp"
#include "fedcast/cli/report.hpp"
#include "fedcast/data/csv.hpp"
#include "fedcast/data/exogenous.hpp"
#include "fedcast/data/kl.hpp"
#include "fedcast/data/preprocess.hpp"
#include "fedcast/data/synthetic.hpp"
#include "fedcast/data/window.hpp"
#include "fedcast/fl/federated.hpp"
#include "fedcast/outliers/outliers.hpp"

namespace fedcast::cli {

// One client after cleaning, downsampling, splitting, outlier handling and
// scaling. `raw` holds the same splits in original units: the corrected
// training split and the untouched validation and test splits.
struct ClientSeries {
  std::string id;
  data::SplitSeries scaled;
  data::SplitSeries raw;
  data::Scaler scaler;
  data::Scaler target_scaler;
  std::vector<std::size_t> targets;
  outliers::OutlierReport outliers;
  std::size_t zeroed = 0;
  std::size_t dropped_rows = 0;  // trailing partial downsample block
};

inline std::size_t client_count(const ExperimentConfig& c) {
  return c.source == DataSource::kCsv ? c.csv_paths.size() : c.synthetic.n_clients;
}

inline data::SyntheticSpec synthetic_spec(const ExperimentConfig& c, std::uint64_t seed) {
  auto spec = c.synthetic;
  if (c.reseed_data) spec.seed = mix_seed(spec.seed, seed);
  return spec;
}

// Raw series of client k, before any preprocessing.
inline data::RawSeries load_client(const ExperimentConfig& c, std::size_t k, std::uint64_t seed) {
  if (c.source == DataSource::kCsv) return data::load_csv(c.csv_paths.at(k));
  return data::generate_synthetic_client(synthetic_spec(c, seed), k);
}

// A client after clean -> downsample -> split, still in original units.
struct StagedClient {
  std::string id;
  data::SplitSeries parts;
  std::size_t zeroed = 0;
  std::size_t dropped_rows = 0;
};

inline StagedClient stage_client(const ExperimentConfig& c, data::RawSeries raw,
                                 const data::ExogenousTable* exogenous = nullptr) {
  StagedClient out;
  out.id = raw.client_id;
  if (exogenous) raw = data::merge_exogenous(raw, *exogenous);
  auto [clean, zeroed] = data::zero_corrupted(std::move(raw));
  out.zeroed = zeroed;
  out.dropped_rows = clean.rows() % c.downsample_block;
  const auto coarse = data::downsample(clean, c.downsample_block);
  clean = {};
  out.parts = data::chrono_split(coarse, c.split);
  return out;
}

// outliers on train -> scale. The scaler sees the corrected training split only.
inline ClientSeries finish_client(const ExperimentConfig& c, StagedClient staged, std::uint64_t seed) {
  ClientSeries out;
  out.id = staged.id;
  out.zeroed = staged.zeroed;
  out.dropped_rows = staged.dropped_rows;
  auto method = c.outlier();
  if (auto* f = std::get_if<outliers::Forest>(&method)) f->seed = mix_seed(seed, fnv1a("forest:" + out.id));
  auto [train, rep] = outliers::correct_outliers(staged.parts.train, method);
  out.outliers = std::move(rep);
  out.raw = {std::move(train), std::move(staged.parts.val), std::move(staged.parts.test)};

  out.scaler = data::fit_scaler(out.raw.train);
  for (const auto& name : c.target_features) out.targets.push_back(out.raw.train.feature_index(name));
  out.target_scaler = out.scaler.subset(out.targets);
  out.scaled.train = data::transform(out.scaler, out.raw.train);
  out.scaled.val = data::transform(out.scaler, out.raw.val);
  out.scaled.test = data::transform(out.scaler, out.raw.test);
  return out;
}

// clean -> downsample -> split -> outliers on train -> scale.
inline ClientSeries prepare_client(const ExperimentConfig& c, data::RawSeries raw, std::uint64_t seed,
                                   const data::ExogenousTable* exogenous = nullptr) {
  return finish_client(c, stage_client(c, std::move(raw), exogenous), seed);
}

inline std::vector<ClientSeries> prepare_clients(const ExperimentConfig& c, std::uint64_t seed) {
  validate(c);
  std::optional<data::ExogenousTable> exo;
  if (!c.exogenous_csv.empty()) exo = data::load_csv(c.exogenous_csv, c.exogenous_columns);
  std::vector<ClientSeries> out;
  for (std::size_t k = 0; k < client_count(c); ++k) {
    try {
      // Raw series are released before the next client is loaded.
      out.push_back(prepare_client(c, load_client(c, k, seed), seed, exo ? &*exo : nullptr));
    } catch (const Error& e) {
      throw e.with_context("client " + std::to_string(k));
    }
    for (std::size_t j = 0; j + 1 < out.size(); ++j)
      require(out[j].id != out.back().id, Errc::kInvalidArgument, "duplicate client id '" + out.back().id + "'");
  }
  return out;
}

inline nn::LstmConfig model_config(const ExperimentConfig& c, std::size_t horizon) {
  auto m = c.model;
  m.input_dim = data::pdcch_features().size() + c.exogenous_columns.size();
  m.target_dim = c.target_features.size();
  m.horizon = horizon;
  return m;
}

inline std::vector<fl::ClientData> client_data(const std::vector<ClientSeries>& series, const nn::LstmConfig& m) {
  std::vector<fl::ClientData> out;
  for (const auto& s : series) {
    fl::ClientData d;
    d.id = s.id;
    try {
      d.train = data::make_windows(s.scaled.train, m, s.targets);
      d.val = data::make_windows(s.scaled.val, m, s.targets);
      d.test = data::make_windows(s.scaled.test, m, s.targets);
    } catch (const Error& e) {
      throw e.with_context("client " + s.id);
    }
    d.target_scaler = s.target_scaler;
    d.train_rows = s.scaled.train.rows();
    d.feature_dim = s.scaled.train.dim();
    out.push_back(std::move(d));
  }
  return out;
}

inline fl::FlOptions fl_options(const ExperimentConfig& c, std::uint64_t seed, std::size_t horizon) {
  fl::FlOptions o;
  o.model = model_config(c, horizon);
  o.rounds = c.rounds;
  o.epochs = c.epochs;
  o.local_optimizer = c.local_optimizer();
  o.batch_size = c.batch_size;
  o.shuffle = c.shuffle;
  o.strategy = c.aggregation();
  o.selection = c.selection_policy();
  o.seed = seed;
  o.parallel = c.parallel;
  return o;
}

inline fl::RunResult train_setting(Setting s, const std::vector<fl::ClientData>& clients, const fl::FlOptions& o) {
  switch (s) {
    case Setting::kIndividual: return fl::run_individual(clients, o);
    case Setting::kCentralized: return fl::run_centralized(clients, o);
    case Setting::kFederated: return fl::run_federated(clients, o);
  }
  fail(Errc::kInvalidArgument, "unknown setting");
}

// Scores in original units: all steps, plus each requested step (1-based).
struct Scored {
  Metrics all;
  std::vector<Metrics> steps;
  std::uint64_t flops = 0;
};

inline Scored score_model(const nn::ModelParams<float>& m, const data::WindowedDataset& ds,
                          const data::Scaler& target_scaler, const std::vector<std::size_t>& steps) {
  const auto pred = nn::predict(m, ds);
  const auto full = metrics::score_predictions(pred, ds, target_scaler);
  Scored out;
  out.all = {full.mae, full.nrmse};
  out.flops = nn::flops_per_window(m.config) * ds.n_windows;
  const std::size_t dp = ds.target_dim, T = ds.horizon;
  for (std::size_t step : steps) {
    require(step >= 1 && step <= T, Errc::kOutOfRange, "scored step outside the model horizon");
    std::vector<double> p, y;
    for (std::size_t w = 0; w < ds.n_windows; ++w)
      for (std::size_t f = 0; f < dp; ++f) {
        const std::size_t i = (w * T + step - 1) * dp + f;
        const double sd = target_scaler.std(Eigen::Index(f)), mu = target_scaler.mean(Eigen::Index(f));
        p.push_back(pred[i] * sd + mu);
        y.push_back(ds.targets[i] * sd + mu);
      }
    out.steps.push_back({metrics::mae(p, y), metrics::nrmse(p, y)});
  }
  return out;
}

namespace detail {

// Trained models of one setting: shared or per-client, plus fine-tuned
// personal copies when requested.
struct Trained {
  fl::RunResult run;
  std::vector<nn::ModelParams<float>> personal;
  std::uint64_t finetune_flops = 0;
};

inline Trained train_models(const ExperimentConfig& c, Setting s, const std::vector<fl::ClientData>& clients,
                            const fl::FlOptions& o, bool finetune) {
  Trained t;
  t.run = train_setting(s, clients, o);
  if (finetune) {
    std::vector<std::uint64_t> flops(clients.size(), 0);
    t.personal.resize(clients.size());
    fl::detail::parallel_for(clients.size(), o.parallel, [&](std::size_t k) {
      t.personal[k] = fl::local_finetune(t.run.model_for(k), clients[k], c.resolved_finetune_epochs(), o, &flops[k]);
    });
    for (auto f : flops) t.finetune_flops += f;
  }
  return t;
}

}  // namespace detail

// Trains and scores one setting on prepared clients.
inline SettingRun run_setting(const ExperimentConfig& c, Setting setting, const std::vector<ClientSeries>& series,
                              std::uint64_t seed) {
  SettingRun out;
  out.seed = seed;
  out.setting = setting;
  const std::size_t K = series.size();
  const std::size_t T_max = c.max_horizon();
  const auto main_data = client_data(series, model_config(c, T_max));
  const auto main_opt = fl_options(c, seed, T_max);
  const auto main = detail::train_models(c, setting, main_data, main_opt, c.finetune);

  out.rounds = main.run.rounds;
  out.ledger = main.run.ledger;
  out.ledger.train_flops += main.finetune_flops;
  out.ledger.joules_per_flop = c.joules_per_flop;
  out.min_visits = std::numeric_limits<std::uint32_t>::max();
  for (const auto& v : main.run.visits)
    for (auto x : v) {
      out.min_visits = std::min(out.min_visits, x);
      out.max_visits = std::max(out.max_visits, x);
    }

  out.clients.resize(K);
  double e_val = 0.0, e_test = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    auto& cr = out.clients[k];
    cr.id = series[k].id;
    cr.train_windows = main_data[k].train.n_windows;
    cr.zeroed = series[k].zeroed;
    cr.outliers = series[k].outliers;
    const auto& d = main_data[k];
    // Whole-horizon scores; per_step mode also scores every requested step of
    // this model, per_model mode fills the horizon entries below.
    auto eval = [&](const nn::ModelParams<float>& m, ClientEval& dst) {
      const std::vector<std::size_t> steps =
          c.horizon_mode == HorizonMode::kPerStep ? c.horizons : std::vector<std::size_t>{};
      const auto v = score_model(m, d.val, d.target_scaler, steps);
      const auto t = score_model(m, d.test, d.target_scaler, steps);
      dst.val = v.all;
      dst.test = t.all;
      for (std::size_t i = 0; i < steps.size(); ++i) dst.horizons.push_back({steps[i], v.steps[i], t.steps[i]});
    };
    eval(main.run.model_for(k), cr.base);
    if (main.personal.size() == K) eval(main.personal[k], cr.finetuned.emplace());
    const auto& deployed_model = main.personal.size() == K ? main.personal[k] : main.run.model_for(k);
    out.ledger.inference_flops += nn::flops_per_window(deployed_model.config) * main_data[k].test.n_windows;
    e_val += cr.deployed().val.nrmse;
    e_test += cr.deployed().test.nrmse;
  }

  if (c.horizon_mode == HorizonMode::kPerModel) {
    for (std::size_t T : c.horizons) {
      const bool reuse = T == T_max;
      std::optional<detail::Trained> extra;
      std::vector<fl::ClientData> extra_data;
      if (!reuse) {
        extra_data = client_data(series, model_config(c, T));
        extra.emplace(detail::train_models(c, setting, extra_data, fl_options(c, seed, T), c.finetune));
      }
      const auto& tr = reuse ? main : *extra;
      const auto& dd = reuse ? main_data : extra_data;
      for (std::size_t k = 0; k < K; ++k) {
        auto& cr = out.clients[k];
        auto push = [&](const nn::ModelParams<float>& m, ClientEval& dst) {
          const auto v = score_model(m, dd[k].val, dd[k].target_scaler, {T});
          const auto t = score_model(m, dd[k].test, dd[k].target_scaler, {T});
          dst.horizons.push_back({T, v.steps[0], t.steps[0]});
        };
        push(tr.run.model_for(k), cr.base);
        if (cr.finetuned) push(tr.personal[k], *cr.finetuned);
      }
    }
  }

  out.e_val = e_val / double(K);
  out.e_test = e_test / double(K);
  out.score = metrics::score(out.e_val, out.e_test, out.ledger, c.weights, c.inference_mode);
  return out;
}

// Runs every seed of `c` under each of `settings` on identically prepared
// data. Seeds run in order; errors carry the seed as context.
inline RunReport run_experiment(const ExperimentConfig& c, const std::vector<Setting>& settings,
                                const std::string& variant = "") {
  validate(c);
  require(!settings.empty(), Errc::kInvariant, "no settings to run");
  RunReport report;
  report.config = c;
  for (std::uint64_t seed : c.seeds) {
    try {
      const auto series = prepare_clients(c, seed);
      for (Setting s : settings) {
        auto run = run_setting(c, s, series, seed);
        run.variant = variant;
        report.runs.push_back(std::move(run));
      }
    } catch (const Error& e) {
      throw e.with_context("seed " + std::to_string(seed));
    }
  }
  return report;
}

inline RunReport run_experiment(const ExperimentConfig& c) { return run_experiment(c, {c.setting}); }

// One labelled configuration per sweep point; runs are concatenated under
// the variant label and share the seed list of the base config.
struct Variant {
  std::string label;
  std::function<void(ExperimentConfig&)> apply;
};

inline RunReport run_sweep(const ExperimentConfig& base, const std::string& sweep, const std::vector<Variant>& variants,
                           const std::vector<Setting>& settings) {
  RunReport out;
  out.config = base;
  out.sweep = sweep;
  for (const auto& v : variants) {
    auto c = base;
    v.apply(c);
    try {
      auto r = run_experiment(c, settings, v.label);
      for (auto& run : r.runs) out.runs.push_back(std::move(run));
    } catch (const Error& e) {
      throw e.with_context(sweep + " " + v.label);
    }
  }
  return out;
}

inline std::vector<Variant> strategy_variants() {
  std::vector<Variant> out;
  for (const auto& name : fl::strategy_names())
    out.push_back({name, [name](ExperimentConfig& c) { c.strategy = name; }});
  return out;
}

inline std::vector<Variant> outlier_variants() {
  std::vector<Variant> out;
  for (const char* name : {"none", "zscore", "iqr", "forest", "floorcap"})
    out.push_back({name, [name = std::string(name)](ExperimentConfig& c) { c.outlier_method = name; }});
  return out;
}

// k clients per round for k = K..1, labelled "k/K".
inline std::vector<Variant> selection_variants(std::size_t K) {
  std::vector<Variant> out;
  for (std::size_t k = K; k >= 1; --k)
    out.push_back({std::to_string(k) + "/" + std::to_string(K), [k](ExperimentConfig& c) {
                     c.selection = "random";
                     c.k_per_round = k;
                   }});
  return out;
}

// Pairwise KL matrix on the first seed's corrected training splits, in
// original units, averaged over all features.
inline Table kl_table(const ExperimentConfig& c) {
  const auto series = prepare_clients(c, c.seeds.front());
  std::vector<data::RawSeries> raw;
  Table t;
  t.name = "kl_matrix";
  for (const auto& s : series) {
    raw.push_back(s.raw.train);
    t.rows.push_back(s.id);
  }
  t.cols = t.rows;
  std::vector<std::size_t> features(raw.front().dim());
  std::iota(features.begin(), features.end(), std::size_t(0));
  t.values = data::kl_matrix(raw, features);
  return t;
}

// Deletion study: mean and deviation over seeds of the (K+1) x (K+1) table.
inline RunReport run_deletion(const ExperimentConfig& c) {
  validate(c);
  RunReport out;
  out.config = c;
  out.sweep = "deletion";
  std::vector<Eigen::MatrixXd> tables;
  fl::DeletionTable shape;
  for (std::uint64_t seed : c.seeds) {
    try {
      const auto series = prepare_clients(c, seed);
      const auto data = client_data(series, model_config(c, c.max_horizon()));
      shape = fl::deletion_study(data, fl_options(c, seed, c.max_horizon()));
      tables.push_back(shape.nrmse);
    } catch (const Error& e) {
      throw e.with_context("seed " + std::to_string(seed));
    }
  }
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(shape.nrmse.rows(), shape.nrmse.cols());
  for (const auto& t : tables) mean += t;
  mean /= double(tables.size());
  Eigen::MatrixXd sd = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
  for (const auto& t : tables) sd.array() += (t - mean).array().square();
  sd = (sd / double(tables.size())).cwiseSqrt();
  auto cols = shape.client_ids;
  cols.push_back("average");
  out.tables.push_back({"deletion", shape.row_labels, cols, mean});
  out.tables.push_back({"deletion_std", shape.row_labels, cols, sd});
  return out;
}

}  // namespace fedcast::cli
