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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedcast/cli/config.hpp"
#include "fedcast/fl/federated.hpp"
#include "fedcast/metrics/metrics.hpp"
#include "fedcast/metrics/sustainability.hpp"
#include "fedcast/outliers/outliers.hpp"

namespace fedcast::cli {

struct Metrics {
  double mae = 0.0;
  double nrmse = 0.0;
};

struct HorizonMetrics {
  std::size_t horizon = 0;
  Metrics val, test;
};

// Scores of one deployed model on one client.
struct ClientEval {
  Metrics val, test;                     // all predicted steps
  std::vector<HorizonMetrics> horizons;  // step T of the sweep
};

struct ClientResult {
  std::string id;
  std::size_t train_windows = 0;
  std::size_t zeroed = 0;  // corrupted cells replaced during cleaning
  outliers::OutlierReport outliers;
  ClientEval base;
  std::optional<ClientEval> finetuned;

  const ClientEval& deployed() const { return finetuned ? *finetuned : base; }
};

// One (variant, seed, setting) cell.
struct SettingRun {
  std::string variant;
  std::uint64_t seed = 0;
  Setting setting = Setting::kFederated;
  std::vector<ClientResult> clients;
  std::vector<fl::RoundReport> rounds;
  metrics::EnergyLedger ledger;
  double e_val = 0.0;
  double e_test = 0.0;
  metrics::SustainabilityScore score;
  std::uint32_t min_visits = 0;  // per train window, over all clients
  std::uint32_t max_visits = 0;
};

// A labelled matrix (KL divergences, deletion study).
struct Table {
  std::string name;
  std::vector<std::string> rows, cols;
  Eigen::MatrixXd values;
};

struct RunReport {
  ExperimentConfig config;
  std::string sweep;  // varied dimension, empty for a plain run
  std::vector<SettingRun> runs;
  std::vector<Table> tables;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

using nlohmann::json;

inline json to_json(const Metrics& m) { return {{"mae", m.mae}, {"nrmse", m.nrmse}}; }

inline json to_json(const ClientEval& e) {
  json h = json::array();
  for (const auto& x : e.horizons) h.push_back({{"horizon", x.horizon}, {"val", to_json(x.val)}, {"test", to_json(x.test)}});
  return {{"val", to_json(e.val)}, {"test", to_json(e.test)}, {"horizons", std::move(h)}};
}

inline json to_json(const outliers::OutlierReport& r) {
  return {{"method", r.method}, {"row_level", r.row_level}, {"flagged", r.flagged}, {"corrected", r.corrected}};
}

inline json to_json(const SettingRun& s) {
  json clients = json::array();
  for (const auto& c : s.clients) {
    json j = {{"id", c.id},
              {"train_windows", c.train_windows},
              {"zeroed", c.zeroed},
              {"outliers", to_json(c.outliers)},
              {"base", to_json(c.base)}};
    if (c.finetuned) j["finetuned"] = to_json(*c.finetuned);
    clients.push_back(std::move(j));
  }
  json rounds = json::array();
  for (const auto& r : s.rounds)
    rounds.push_back({{"round", r.round},
                      {"selected", r.selected},
                      {"mean_train_loss", r.mean_train_loss},
                      {"val_nrmse", r.val_nrmse},
                      {"cumulative_flops", r.cumulative_flops},
                      {"bytes_transmitted", r.bytes_transmitted}});
  return {{"variant", s.variant},
          {"seed", s.seed},
          {"setting", setting_name(s.setting)},
          {"clients", std::move(clients)},
          {"rounds", std::move(rounds)},
          {"ledger",
           {{"train_flops", s.ledger.train_flops},
            {"inference_flops", s.ledger.inference_flops},
            {"joules_per_flop", s.ledger.joules_per_flop},
            {"ds_kb", s.ledger.ds_kb},
            {"train_wh", s.ledger.train_wh()},
            {"inference_wh", s.ledger.inference_wh()}}},
          {"e_val", s.e_val},
          {"e_test", s.e_test},
          {"sustainability", {{"s_train", s.score.s_train}, {"s_inference", s.score.s_inference}, {"s", s.score.s}}},
          {"visits", {{"min", s.min_visits}, {"max", s.max_visits}}}};
}

inline json to_json(const Table& t) {
  json values = json::array();
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    std::vector<double> row(std::size_t(t.values.cols()));
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) row[std::size_t(c)] = t.values(r, c);
    values.push_back(row);
  }
  return {{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"values", std::move(values)}};
}

inline json report_body(const RunReport& r) {
  json cfg = json::object();
  for (const auto& [k, v] : config_entries(r.config)) cfg[k] = v;
  json runs = json::array();
  for (const auto& s : r.runs) runs.push_back(to_json(s));
  json tables = json::array();
  for (const auto& t : r.tables) tables.push_back(to_json(t));
  return {{"config", std::move(cfg)},
          {"config_hash", hex64(config_hash(r.config))},
          {"sweep", r.sweep},
          {"runs", std::move(runs)},
          {"tables", std::move(tables)}};
}

}  // namespace detail

// Content hash over the canonical JSON body. Host-specific keys (output
// directory, thread count) are excluded, so --parallel never changes it.
inline std::uint64_t report_hash(const RunReport& r) {
  auto body = detail::report_body(r);
  body["config"].erase("experiment.output_dir");
  body["config"].erase("experiment.parallel");
  return fnv1a(body.dump());
}

// Canonical JSON: sorted keys, shortest round-trip doubles, two-space indent.
inline std::string report_json(const RunReport& r) {
  auto body = detail::report_body(r);
  body["report_hash"] = hex64(report_hash(r));
  return body.dump(2) + "\n";
}

// Mean and deviation across seeds, keyed by (variant, setting).
struct CellSummary {
  std::string variant;
  Setting setting = Setting::kFederated;
  std::vector<std::string> clients;
  std::vector<metrics::MeanStd> test_nrmse, test_mae, val_nrmse;  // per client, then the client average
  std::vector<metrics::MeanStd> ft_test_nrmse;                    // empty unless fine-tuned
  std::vector<std::size_t> horizons;
  std::vector<metrics::MeanStd> horizon_test_mae, horizon_test_nrmse;  // client average per horizon
  metrics::MeanStd train_wh, inference_wh, ds_kb, s_train, s_inference, s;
  std::size_t seeds = 0;
};

inline std::vector<CellSummary> summarize(const RunReport& r) {
  std::vector<std::pair<std::string, Setting>> keys;
  for (const auto& s : r.runs)
    if (std::find(keys.begin(), keys.end(), std::pair{s.variant, s.setting}) == keys.end())
      keys.emplace_back(s.variant, s.setting);
  std::vector<CellSummary> out;
  for (const auto& [variant, setting] : keys) {
    std::vector<const SettingRun*> cell;
    for (const auto& s : r.runs)
      if (s.variant == variant && s.setting == setting) cell.push_back(&s);
    CellSummary sum;
    sum.variant = variant;
    sum.setting = setting;
    sum.seeds = cell.size();
    const auto& first = *cell.front();
    for (const auto& c : first.clients) sum.clients.push_back(c.id);
    const std::size_t K = sum.clients.size();
    auto across = [&](auto&& value) {
      std::vector<double> v;
      for (const auto* s : cell) v.push_back(value(*s));
      return metrics::seed_aggregate(v);
    };
    auto per_client = [&](auto&& pick, std::vector<metrics::MeanStd>& dst) {
      for (std::size_t k = 0; k <= K; ++k)
        dst.push_back(across([&](const SettingRun& s) {
          if (k < K) return pick(s.clients.at(k));
          double m = 0.0;
          for (const auto& c : s.clients) m += pick(c);
          return m / double(K);
        }));
    };
    per_client([](const ClientResult& c) { return c.base.test.nrmse; }, sum.test_nrmse);
    per_client([](const ClientResult& c) { return c.base.test.mae; }, sum.test_mae);
    per_client([](const ClientResult& c) { return c.base.val.nrmse; }, sum.val_nrmse);
    if (first.clients.front().finetuned)
      per_client([](const ClientResult& c) { return c.finetuned->test.nrmse; }, sum.ft_test_nrmse);
    for (std::size_t h = 0; h < first.clients.front().base.horizons.size(); ++h) {
      sum.horizons.push_back(first.clients.front().base.horizons[h].horizon);
      auto mean_over_clients = [&](const SettingRun& s, bool use_mae) {
        double m = 0.0;
        for (const auto& c : s.clients) m += use_mae ? c.base.horizons[h].test.mae : c.base.horizons[h].test.nrmse;
        return m / double(s.clients.size());
      };
      sum.horizon_test_mae.push_back(across([&](const SettingRun& s) { return mean_over_clients(s, true); }));
      sum.horizon_test_nrmse.push_back(across([&](const SettingRun& s) { return mean_over_clients(s, false); }));
    }
    sum.train_wh = across([](const SettingRun& s) { return s.ledger.train_wh(); });
    sum.inference_wh = across([](const SettingRun& s) { return s.ledger.inference_wh(); });
    sum.ds_kb = across([](const SettingRun& s) { return s.ledger.ds_kb; });
    sum.s_train = across([](const SettingRun& s) { return s.score.s_train; });
    sum.s_inference = across([](const SettingRun& s) { return s.score.s_inference; });
    sum.s = across([](const SettingRun& s) { return s.score.s; });
    out.push_back(std::move(sum));
  }
  return out;
}

namespace detail {

inline std::string num(double v) { return fmt(v); }

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    require(out_.good(), Errc::kIo, "cannot write " + path.string());
    out_ << header << "\n";
  }
  // Cells are written verbatim; callers keep them free of commas.
  CsvFile& row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
    return *this;
  }
  ~CsvFile() noexcept(false) {
    out_.flush();
    if (!out_.good() && std::uncaught_exceptions() == 0) fail(Errc::kIo, "failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), Errc::kIo, "cannot create directory " + dir.string());
}

}  // namespace detail

inline void write_table_csv(const Table& t, const std::filesystem::path& path) {
  std::string header = "row";
  for (const auto& c : t.cols) header += "," + c;
  detail::CsvFile f(path, header);
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    std::vector<std::string> cells = {t.rows.at(std::size_t(r))};
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) cells.push_back(detail::num(t.values(r, c)));
    f.row(cells);
  }
}

// report.json, results.csv (one row per seed, setting, client and horizon),
// rounds.csv, summary.csv, sustainability.csv and one CSV per table.
inline std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  {
    const auto p = dir / "report.json";
    std::ofstream out(p);
    require(out.good(), Errc::kIo, "cannot write " + p.string());
    out << report_json(r);
    out.flush();
    require(out.good(), Errc::kIo, "failed writing " + p.string());
    written.push_back(p);
  }
  using detail::num;
  auto opt_num = [](const std::optional<ClientEval>& e, std::size_t h, bool test, bool use_mae) {
    if (!e) return std::string();
    const auto& m = test ? e->horizons[h].test : e->horizons[h].val;
    return num(use_mae ? m.mae : m.nrmse);
  };
  {
    written.push_back(dir / "results.csv");
    detail::CsvFile f(written.back(),
                      "variant,seed,setting,client,horizon,val_mae,val_nrmse,test_mae,test_nrmse,"
                      "ft_val_mae,ft_val_nrmse,ft_test_mae,ft_test_nrmse");
    for (const auto& s : r.runs)
      for (const auto& c : s.clients)
        for (std::size_t h = 0; h < c.base.horizons.size(); ++h) {
          const auto& m = c.base.horizons[h];
          f.row({s.variant, std::to_string(s.seed), setting_name(s.setting), c.id, std::to_string(m.horizon),
                 num(m.val.mae), num(m.val.nrmse), num(m.test.mae), num(m.test.nrmse),
                 opt_num(c.finetuned, h, false, true), opt_num(c.finetuned, h, false, false),
                 opt_num(c.finetuned, h, true, true), opt_num(c.finetuned, h, true, false)});
        }
  }
  {
    written.push_back(dir / "rounds.csv");
    detail::CsvFile f(written.back(),
                      "variant,seed,setting,round,selected,mean_train_loss,mean_val_nrmse,cumulative_flops,"
                      "bytes_transmitted");
    for (const auto& s : r.runs)
      for (const auto& rr : s.rounds) {
        double v = 0.0;
        for (double x : rr.val_nrmse) v += x;
        f.row({s.variant, std::to_string(s.seed), setting_name(s.setting), std::to_string(rr.round),
               std::to_string(rr.selected.size()), num(rr.mean_train_loss),
               rr.val_nrmse.empty() ? std::string() : num(v / double(rr.val_nrmse.size())),
               std::to_string(rr.cumulative_flops), std::to_string(rr.bytes_transmitted)});
      }
  }
  const auto cells = summarize(r);
  {
    written.push_back(dir / "summary.csv");
    detail::CsvFile f(written.back(),
                      "variant,setting,client,seeds,test_nrmse_mean,test_nrmse_std,test_mae_mean,test_mae_std,"
                      "val_nrmse_mean,val_nrmse_std,ft_test_nrmse_mean,ft_test_nrmse_std");
    for (const auto& c : cells)
      for (std::size_t k = 0; k <= c.clients.size(); ++k) {
        const bool ft = !c.ft_test_nrmse.empty();
        f.row({c.variant, setting_name(c.setting), k < c.clients.size() ? c.clients[k] : "average",
               std::to_string(c.seeds), num(c.test_nrmse[k].mean), num(c.test_nrmse[k].std),
               num(c.test_mae[k].mean), num(c.test_mae[k].std), num(c.val_nrmse[k].mean),
               num(c.val_nrmse[k].std), ft ? num(c.ft_test_nrmse[k].mean) : "",
               ft ? num(c.ft_test_nrmse[k].std) : ""});
      }
  }
  {
    written.push_back(dir / "sustainability.csv");
    detail::CsvFile f(written.back(),
                      "variant,setting,seeds,nrmse_mean,train_wh_mean,inference_wh_mean,ds_kb_mean,"
                      "s_train_mean,s_inference_mean,s_mean,s_std");
    for (const auto& c : cells)
      f.row({c.variant, setting_name(c.setting), std::to_string(c.seeds), num(c.test_nrmse.back().mean),
             num(c.train_wh.mean), num(c.inference_wh.mean), num(c.ds_kb.mean), num(c.s_train.mean),
             num(c.s_inference.mean), num(c.s.mean), num(c.s.std)});
  }
  for (const auto& t : r.tables) {
    written.push_back(dir / (t.name + ".csv"));
    write_table_csv(t, written.back());
  }
  return written;
}

// Figure-style series: the horizon curve always, and a comparison across
// variants named after the sweep (plot_aggregators.csv, plot_outliers.csv...).
inline std::vector<std::filesystem::path> emit_plotdata(const RunReport& r, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  using detail::num;
  std::vector<std::filesystem::path> written;
  const auto cells = summarize(r);
  {
    written.push_back(dir / "plot_horizon.csv");
    detail::CsvFile f(written.back(),
                      "variant,setting,horizon,test_mae_mean,test_mae_std,test_nrmse_mean,test_nrmse_std");
    for (const auto& c : cells)
      for (std::size_t h = 0; h < c.horizons.size(); ++h)
        f.row({c.variant, setting_name(c.setting), std::to_string(c.horizons[h]), num(c.horizon_test_mae[h].mean),
               num(c.horizon_test_mae[h].std), num(c.horizon_test_nrmse[h].mean),
               num(c.horizon_test_nrmse[h].std)});
  }
  if (!r.sweep.empty() && !r.runs.empty()) {
    written.push_back(dir / ("plot_" + r.sweep + ".csv"));
    detail::CsvFile f(written.back(),
                      "variant,setting,test_nrmse_mean,test_nrmse_std,test_mae_mean,test_mae_std,s_mean,s_std,"
                      "ft_test_nrmse_mean,ft_test_nrmse_std");
    for (const auto& c : cells) {
      const bool ft = !c.ft_test_nrmse.empty();
      f.row({c.variant, setting_name(c.setting), num(c.test_nrmse.back().mean), num(c.test_nrmse.back().std),
             num(c.test_mae.back().mean), num(c.test_mae.back().std), num(c.s.mean), num(c.s.std),
             ft ? num(c.ft_test_nrmse.back().mean) : "", ft ? num(c.ft_test_nrmse.back().std) : ""});
    }
  }
  for (const auto& t : r.tables) {
    written.push_back(dir / ("plot_" + t.name + ".csv"));
    write_table_csv(t, written.back());
  }
  return written;
}

}  // namespace fedcast::cli
