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
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fedcast/data/series.hpp"
#include "fedcast/data/synthetic.hpp"
#include "fedcast/fl/selection.hpp"
#include "fedcast/fl/strategy.hpp"
#include "fedcast/metrics/sustainability.hpp"
#include "fedcast/nn/lstm_config.hpp"
#include "fedcast/nn/optimizer.hpp"
#include "fedcast/outliers/outliers.hpp"

namespace fedcast::cli {

enum class Setting { kIndividual, kCentralized, kFederated };
enum class DataSource { kSynthetic, kCsv };
// per_step: one model predicts all max(T) steps and step T is scored.
// per_model: a separate model is trained for every T and its last step scored.
enum class HorizonMode { kPerStep, kPerModel };

inline const char* setting_name(Setting s) {
  switch (s) {
    case Setting::kIndividual: return "individual";
    case Setting::kCentralized: return "centralized";
    case Setting::kFederated: return "federated";
  }
  return "?";
}

inline Setting parse_setting(const std::string& s) {
  if (s == "individual") return Setting::kIndividual;
  if (s == "centralized") return Setting::kCentralized;
  if (s == "federated") return Setting::kFederated;
  fail(Errc::kTypeMismatch, "setting must be individual, centralized or federated, got '" + s + "'");
}

struct ExperimentConfig {
  // [experiment]
  Setting setting = Setting::kFederated;
  std::size_t rounds = 10;
  std::size_t epochs = 3;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::size_t> horizons = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  HorizonMode horizon_mode = HorizonMode::kPerStep;
  bool finetune = false;
  std::size_t finetune_epochs = 0;  // 0: same as epochs
  std::size_t parallel = 1;
  std::string output_dir = "out";

  // [model]; input_dim, target_dim and horizon are derived from the data.
  nn::LstmConfig model;
  std::size_t batch_size = 128;
  std::string optimizer = "adam";
  double learning_rate = 1e-3;
  bool shuffle = true;
  std::vector<std::string> target_features = pdcch_default_targets();

  // [data]
  DataSource source = DataSource::kSynthetic;
  std::vector<std::string> csv_paths;
  std::string exogenous_csv;
  std::vector<std::string> exogenous_columns;
  std::size_t downsample_block = 120;
  std::array<double, 3> split = {0.6, 0.2, 0.2};

  // [synthetic]
  data::SyntheticSpec synthetic;
  bool reseed_data = false;  // draw a fresh synthetic dataset per run seed

  // [strategy]
  std::string strategy = "fedavg";
  double momentum = 0.9;
  double eta_s = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double tau = 1e-3;

  // [selection]
  std::string selection = "all";
  std::size_t k_per_round = 1;
  std::string exclude;

  // [outliers]
  std::string outlier_method = "none";
  double threshold = 3.0;
  double iqr_k = 1.5;
  std::size_t n_trees = 100;
  std::size_t subsample = 256;
  double contamination = 0.05;
  double lower_q = 0.01;
  double upper_q = 0.99;

  // [sustainability]
  metrics::SustainabilityWeights weights;
  double joules_per_flop = metrics::kDefaultJoulesPerFlop;
  metrics::InferenceMode inference_mode = metrics::InferenceMode::kShifted;

  static std::vector<std::string> pdcch_default_targets() {
    const auto& f = data::pdcch_features();
    return {f.begin(), f.begin() + 5};
  }

  std::size_t max_horizon() const { return *std::max_element(horizons.begin(), horizons.end()); }
  std::size_t resolved_finetune_epochs() const { return finetune_epochs == 0 ? epochs : finetune_epochs; }

  fl::AggregationStrategy aggregation() const {
    if (strategy == "fedavgm") return fl::FedAvgM{momentum};
    if (strategy == "fedadagrad") return fl::FedAdagrad{eta_s, tau};
    if (strategy == "fedyogi") return fl::FedYogi{eta_s, beta1, beta2, tau};
    if (strategy == "fedadam") return fl::FedAdam{eta_s, beta1, beta2, tau};
    return fl::make_strategy(strategy);
  }

  fl::SelectionPolicy selection_policy() const {
    if (selection == "random") return fl::SelectRandom{k_per_round};
    if (selection == "exclude") return fl::SelectExclude{exclude};
    return fl::SelectAll{};
  }

  // The forest seed is filled in per (run seed, client) by the pipeline.
  outliers::OutlierMethod outlier() const {
    if (outlier_method == "zscore") return outliers::ZScore{threshold};
    if (outlier_method == "iqr") return outliers::Iqr{iqr_k};
    if (outlier_method == "forest") return outliers::Forest{n_trees, subsample, contamination, 0};
    if (outlier_method == "floorcap") return outliers::FloorCap{lower_q, upper_q};
    return outliers::NoOutliers{};
  }

  nn::OptimizerState local_optimizer() const {
    if (optimizer == "sgd") return nn::Sgd{learning_rate};
    nn::Adam a;
    a.lr = learning_rate;
    return a;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>)
      out += v[i];
    else if constexpr (std::is_floating_point_v<T>)
      out += fmt(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) {
    const char* what = std::is_floating_point_v<T> ? "a number" : "a non-negative integer";
    fail(Errc::kTypeMismatch, key + " expects " + std::string(what) + ", got '" + v + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(Errc::kTypeMismatch, key + " expects true or false, got '" + v + "'");
}

inline std::string parse_choice(const std::string& key, const std::string& v,
                                std::initializer_list<const char*> allowed) {
  std::string names;
  for (const char* a : allowed) {
    if (v == a) return v;
    names += names.empty() ? a : std::string("|") + a;
  }
  fail(Errc::kTypeMismatch, key + " must be one of " + names + ", got '" + v + "'");
}

template <typename T>
std::vector<T> parse_numbers(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
  return out;
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Field accessors shared by set and get.
#define FEDCAST_KEY_SIZE(sec, key, field)                                                        \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_number<std::size_t>(#key, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); } }
#define FEDCAST_KEY_DOUBLE(sec, key, field)                                                      \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_number<double>(#key, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); } }
#define FEDCAST_KEY_BOOL(sec, key, field)                                                        \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_bool(#key, v); }, \
        [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); } }
#define FEDCAST_KEY_STRING(sec, key, field)                                                      \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = v; },               \
        [](const ExperimentConfig& c) { return c.field; } }
#define FEDCAST_KEY_CHOICE(sec, key, field, ...)                                                 \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_choice(#key, v, {__VA_ARGS__}); }, \
        [](const ExperimentConfig& c) { return c.field; } }
#define FEDCAST_KEY_DLIST(sec, key, field)                                                       \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_numbers<double>(#key, v); }, \
        [](const ExperimentConfig& c) { return join(c.field); } }
#define FEDCAST_KEY_SLIST(sec, key, field)                                                       \
  Key { sec, #key, [](ExperimentConfig& c, const std::string& v) { c.field = split_list(v); },   \
        [](const ExperimentConfig& c) { return join(c.field); } }

inline const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"experiment", "setting",
          [](ExperimentConfig& c, const std::string& v) { c.setting = parse_setting(v); },
          [](const ExperimentConfig& c) { return std::string(setting_name(c.setting)); }},
      FEDCAST_KEY_SIZE("experiment", rounds, rounds),
      FEDCAST_KEY_SIZE("experiment", epochs, epochs),
      Key{"experiment", "seeds",
          [](ExperimentConfig& c, const std::string& v) { c.seeds = parse_numbers<std::uint64_t>("seeds", v); },
          [](const ExperimentConfig& c) { return join(c.seeds); }},
      Key{"experiment", "horizons",
          [](ExperimentConfig& c, const std::string& v) { c.horizons = parse_numbers<std::size_t>("horizons", v); },
          [](const ExperimentConfig& c) { return join(c.horizons); }},
      Key{"experiment", "horizon_mode",
          [](ExperimentConfig& c, const std::string& v) {
            c.horizon_mode = parse_choice("horizon_mode", v, {"per_step", "per_model"}) == "per_step"
                                 ? HorizonMode::kPerStep
                                 : HorizonMode::kPerModel;
          },
          [](const ExperimentConfig& c) {
            return std::string(c.horizon_mode == HorizonMode::kPerStep ? "per_step" : "per_model");
          }},
      FEDCAST_KEY_BOOL("experiment", finetune, finetune),
      FEDCAST_KEY_SIZE("experiment", finetune_epochs, finetune_epochs),
      FEDCAST_KEY_SIZE("experiment", parallel, parallel),
      FEDCAST_KEY_STRING("experiment", output_dir, output_dir),

      FEDCAST_KEY_SIZE("model", lookback, model.lookback),
      FEDCAST_KEY_SIZE("model", hidden_width, model.hidden_width),
      FEDCAST_KEY_SIZE("model", lstm_layers, model.lstm_layers),
      FEDCAST_KEY_SIZE("model", ffn_layers, model.ffn_layers),
      FEDCAST_KEY_SIZE("model", ffn_width, model.ffn_width),
      FEDCAST_KEY_SIZE("model", batch_size, batch_size),
      FEDCAST_KEY_CHOICE("model", optimizer, optimizer, "adam", "sgd"),
      FEDCAST_KEY_DOUBLE("model", learning_rate, learning_rate),
      FEDCAST_KEY_BOOL("model", shuffle, shuffle),
      FEDCAST_KEY_SLIST("model", target_features, target_features),

      Key{"data", "source",
          [](ExperimentConfig& c, const std::string& v) {
            c.source = parse_choice("source", v, {"synthetic", "csv"}) == "csv" ? DataSource::kCsv
                                                                                 : DataSource::kSynthetic;
          },
          [](const ExperimentConfig& c) { return std::string(c.source == DataSource::kCsv ? "csv" : "synthetic"); }},
      FEDCAST_KEY_SLIST("data", csv_paths, csv_paths),
      FEDCAST_KEY_STRING("data", exogenous_csv, exogenous_csv),
      FEDCAST_KEY_SLIST("data", exogenous_columns, exogenous_columns),
      FEDCAST_KEY_SIZE("data", downsample_block, downsample_block),
      Key{"data", "split",
          [](ExperimentConfig& c, const std::string& v) {
            const auto f = parse_numbers<double>("split", v);
            require(f.size() == 3, Errc::kTypeMismatch, "split expects three fractions");
            c.split = {f[0], f[1], f[2]};
          },
          [](const ExperimentConfig& c) { return join(std::vector<double>(c.split.begin(), c.split.end())); }},

      FEDCAST_KEY_SIZE("synthetic", n_clients, synthetic.n_clients),
      FEDCAST_KEY_SIZE("synthetic", days, synthetic.days),
      Key{"synthetic", "sample_period_ms",
          [](ExperimentConfig& c, const std::string& v) {
            c.synthetic.sample_period_ms = parse_number<std::int64_t>("sample_period_ms", v);
          },
          [](const ExperimentConfig& c) { return std::to_string(c.synthetic.sample_period_ms); }},
      Key{"synthetic", "start_ms",
          [](ExperimentConfig& c, const std::string& v) { c.synthetic.start_ms = parse_number<std::int64_t>("start_ms", v); },
          [](const ExperimentConfig& c) { return std::to_string(c.synthetic.start_ms); }},
      FEDCAST_KEY_DLIST("synthetic", base_rate, synthetic.base_rate),
      FEDCAST_KEY_DLIST("synthetic", daily_amplitude, synthetic.daily_amplitude),
      FEDCAST_KEY_DLIST("synthetic", weekly_amplitude, synthetic.weekly_amplitude),
      FEDCAST_KEY_DLIST("synthetic", phase, synthetic.phase),
      FEDCAST_KEY_DLIST("synthetic", noise_std, synthetic.noise_std),
      FEDCAST_KEY_DOUBLE("synthetic", event_rate, synthetic.event_rate),
      FEDCAST_KEY_DOUBLE("synthetic", event_magnitude, synthetic.event_magnitude),
      Key{"synthetic", "data_seed",
          [](ExperimentConfig& c, const std::string& v) { c.synthetic.seed = parse_number<std::uint64_t>("data_seed", v); },
          [](const ExperimentConfig& c) { return std::to_string(c.synthetic.seed); }},
      FEDCAST_KEY_BOOL("synthetic", reseed_data, reseed_data),

      Key{"strategy", "strategy",
          [](ExperimentConfig& c, const std::string& v) {
            fl::make_strategy(v);  // rejects unknown names
            c.strategy = v;
          },
          [](const ExperimentConfig& c) { return c.strategy; }},
      FEDCAST_KEY_DOUBLE("strategy", momentum, momentum),
      FEDCAST_KEY_DOUBLE("strategy", eta_s, eta_s),
      FEDCAST_KEY_DOUBLE("strategy", beta1, beta1),
      FEDCAST_KEY_DOUBLE("strategy", beta2, beta2),
      FEDCAST_KEY_DOUBLE("strategy", tau, tau),

      FEDCAST_KEY_CHOICE("selection", selection, selection, "all", "random", "exclude"),
      FEDCAST_KEY_SIZE("selection", k_per_round, k_per_round),
      FEDCAST_KEY_STRING("selection", exclude, exclude),

      FEDCAST_KEY_CHOICE("outliers", method, outlier_method, "none", "zscore", "iqr", "forest", "floorcap"),
      FEDCAST_KEY_DOUBLE("outliers", threshold, threshold),
      FEDCAST_KEY_DOUBLE("outliers", iqr_k, iqr_k),
      FEDCAST_KEY_SIZE("outliers", n_trees, n_trees),
      FEDCAST_KEY_SIZE("outliers", subsample, subsample),
      FEDCAST_KEY_DOUBLE("outliers", contamination, contamination),
      FEDCAST_KEY_DOUBLE("outliers", lower_q, lower_q),
      FEDCAST_KEY_DOUBLE("outliers", upper_q, upper_q),

      FEDCAST_KEY_DOUBLE("sustainability", alpha, weights.alpha),
      FEDCAST_KEY_DOUBLE("sustainability", beta, weights.beta),
      FEDCAST_KEY_DOUBLE("sustainability", gamma, weights.gamma),
      FEDCAST_KEY_DOUBLE("sustainability", alpha_inf, weights.alpha_inf),
      FEDCAST_KEY_DOUBLE("sustainability", beta_inf, weights.beta_inf),
      FEDCAST_KEY_DOUBLE("sustainability", joules_per_flop, joules_per_flop),
      Key{"sustainability", "inference_mode",
          [](ExperimentConfig& c, const std::string& v) {
            c.inference_mode = parse_choice("inference_mode", v, {"shifted", "strict"}) == "strict"
                                   ? metrics::InferenceMode::kStrict
                                   : metrics::InferenceMode::kShifted;
          },
          [](const ExperimentConfig& c) {
            return std::string(c.inference_mode == metrics::InferenceMode::kStrict ? "strict" : "shifted");
          }},
  };
  return table;
}

#undef FEDCAST_KEY_SIZE
#undef FEDCAST_KEY_DOUBLE
#undef FEDCAST_KEY_BOOL
#undef FEDCAST_KEY_STRING
#undef FEDCAST_KEY_CHOICE
#undef FEDCAST_KEY_DLIST
#undef FEDCAST_KEY_SLIST

inline const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys())
    if (name == k.name && (section.empty() || section == k.section)) return &k;
  return nullptr;
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  require(!c.seeds.empty(), Errc::kInvariant, "seeds must not be empty");
  require(!c.horizons.empty(), Errc::kInvariant, "horizons must not be empty");
  for (auto t : c.horizons) require(t >= 1, Errc::kInvariant, "horizons must be >= 1");
  require(c.rounds >= 1 && c.epochs >= 1, Errc::kInvariant, "rounds and epochs must be >= 1");
  require(c.parallel >= 1, Errc::kInvariant, "parallel must be >= 1");
  require(c.batch_size >= 1, Errc::kInvariant, "batch_size must be >= 1");
  require(c.learning_rate > 0.0, Errc::kInvariant, "learning_rate must be > 0");
  require(c.downsample_block >= 1, Errc::kInvariant, "downsample_block must be >= 1");
  require(!c.target_features.empty(), Errc::kInvariant, "target_features must not be empty");
  for (double f : c.split) require(f >= 0.0, Errc::kInvariant, "split fractions must be >= 0");
  require(std::abs(c.split[0] + c.split[1] + c.split[2] - 1.0) <= 1e-9, Errc::kInvariant,
          "split fractions must sum to 1");
  if (c.source == DataSource::kCsv)
    require(!c.csv_paths.empty(), Errc::kInvariant, "source = csv needs csv_paths");
  else
    c.synthetic.validate();
  require(c.exogenous_columns.empty() == c.exogenous_csv.empty(), Errc::kInvariant,
          "exogenous_csv and exogenous_columns must be given together");
  auto lstm = c.model;
  lstm.input_dim = data::pdcch_features().size() + c.exogenous_columns.size();
  lstm.target_dim = c.target_features.size();
  lstm.horizon = c.max_horizon();
  lstm.validate();
  c.weights.validate();
  fl::validate(c.aggregation());
  if (c.selection == "random")
    require(c.k_per_round >= 1, Errc::kInvariant, "k_per_round must be >= 1");
  if (c.selection == "exclude") require(!c.exclude.empty(), Errc::kInvariant, "selection = exclude needs exclude");
  outliers::validate(c.outlier());
  require(c.joules_per_flop > 0.0, Errc::kInvariant, "joules_per_flop must be > 0");
}

// Sets one key, given as "name" or "section.name".
inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  std::string section, name = key;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    section = key.substr(0, dot);
    name = key.substr(dot + 1);
  }
  const auto* k = detail::find_key(section, name);
  require(k != nullptr, Errc::kUnknownKey,
          "'" + name + "'" + (section.empty() ? std::string() : " in section [" + section + "]"));
  k->set(c, value);
}

// Sectioned key = value text. '#' and ';' start comments, lists are comma
// separated, and one line may carry several assignments ("a = 1, b = 2").
// Keys are unique across sections, so a key before any header is accepted.
inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const auto line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      require(line.back() == ']', Errc::kTypeMismatch, where + ": unterminated section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : detail::keys()) known = known || section == k.section;
      require(known, Errc::kUnknownKey, where + ": section [" + section + "]");
      continue;
    }
    std::vector<std::pair<std::string, std::string>> assigns;
    std::string chunk;
    std::istringstream parts(line);
    while (std::getline(parts, chunk, ',')) {
      if (const auto eq = chunk.find('='); eq != std::string::npos) {
        assigns.emplace_back(detail::trim(chunk.substr(0, eq)), detail::trim(chunk.substr(eq + 1)));
      } else {
        require(!assigns.empty(), Errc::kTypeMismatch, where + ": expected key = value");
        assigns.back().second += "," + detail::trim(chunk);
      }
    }
    for (const auto& [key, value] : assigns) {
      require(!key.empty(), Errc::kTypeMismatch, where + ": missing key name");
      try {
        set_key(c, section.empty() ? key : section + "." + key, value);
      } catch (const Error& e) {
        throw e.with_context(where);
      }
    }
  }
  validate(c);
  return c;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::kIo, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

// Every key with its effective value, in table order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : detail::keys()) out.emplace_back(std::string(k.section) + "." + k.name, k.get(c));
  return out;
}

// Canonical text form; parse_config_text(write_config(c)) reproduces c.
inline std::string write_config(const ExperimentConfig& c) {
  std::string out, section;
  for (const auto& k : detail::keys()) {
    if (section != k.section) {
      section = k.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(c) + "\n";
  }
  return out;
}

// Content hash of the canonical form. The output directory and thread count
// do not change results and are left out.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = fnv1a("fedcast-config");
  for (const auto& [k, v] : config_entries(c)) {
    if (k == "experiment.output_dir" || k == "experiment.parallel") continue;
    h = fnv1a(k + "=" + v + "\n", h);
  }
  return h;
}

}  // namespace fedcast::cli
