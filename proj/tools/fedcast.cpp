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

// fedcast <subcommand> [--config file] [--out dir] [--seeds a,b,c] [--parallel n] [--set key=value]...
// Exit codes: 0 success, 1 runtime error, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedcast/cli/config.hpp"
#include "fedcast/cli/experiment.hpp"
#include "fedcast/cli/report.hpp"
#include "fedcast/data/csv.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fedcast;
using namespace fedcast::cli;

struct Args {
  std::string config;
  std::string out;
  std::string seeds;
  std::size_t parallel = 0;
  std::vector<std::string> overrides;
};

ExperimentConfig load(const Args& a) {
  ExperimentConfig c = a.config.empty() ? parse_config_text("") : parse_config(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, Errc::kTypeMismatch, "--set expects key=value, got '" + kv + "'");
    set_key(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  }
  if (!a.seeds.empty()) set_key(c, "seeds", a.seeds);
  if (a.parallel > 0) c.parallel = a.parallel;
  if (!a.out.empty()) c.output_dir = a.out;
  validate(c);
  return c;
}

void print_summary(const RunReport& r, std::ostream& os) {
  char line[256];
  for (const auto& cell : summarize(r)) {
    std::snprintf(line, sizeof(line), "%-12s %-12s seeds=%zu  test NRMSE %.4f +- %.4f  MAE %.4f  S %.4f\n",
                  cell.variant.empty() ? "-" : cell.variant.c_str(), setting_name(cell.setting), cell.seeds,
                  cell.test_nrmse.back().mean, cell.test_nrmse.back().std, cell.test_mae.back().mean, cell.s.mean);
    os << line;
    if (!cell.ft_test_nrmse.empty()) {
      std::snprintf(line, sizeof(line), "%-12s %-12s fine-tuned test NRMSE %.4f +- %.4f\n", "", "",
                    cell.ft_test_nrmse.back().mean, cell.ft_test_nrmse.back().std);
      os << line;
    }
  }
  for (const auto& t : r.tables) os << "table " << t.name << " (" << t.rows.size() << " x " << t.cols.size() << ")\n";
}

void finish(const RunReport& r, const ExperimentConfig& c) {
  const fs::path dir = c.output_dir;
  emit_report(r, dir);
  emit_plotdata(r, dir);
  {
    std::ofstream cfg(dir / "config.ini");
    cfg << write_config(c);
  }
  print_summary(r, std::cout);
  std::cout << "report " << hex64(report_hash(r)) << " -> " << (dir / "report.json").string() << "\n";
}

void synth_gen(const ExperimentConfig& c) {
  require(c.source == DataSource::kSynthetic, Errc::kInvalidArgument, "synth-gen needs source = synthetic");
  const fs::path dir = c.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, Errc::kIo, "cannot create directory " + dir.string());
  auto run_cfg = c;
  run_cfg.source = DataSource::kCsv;
  run_cfg.csv_paths.clear();
  const auto spec = synthetic_spec(c, c.seeds.front());
  for (std::size_t k = 0; k < spec.n_clients; ++k) {
    const auto s = data::generate_synthetic_client(spec, k);
    const auto path = fs::absolute(dir / (s.client_id + ".csv"));
    data::save_csv(s, path);
    run_cfg.csv_paths.push_back(path.lexically_normal().string());
    std::cout << "wrote " << path.string() << " (" << s.rows() << " rows)\n";
  }
  run_cfg.output_dir = (dir / "run").string();
  std::ofstream ini(dir / "fedcast.ini");
  require(ini.good(), Errc::kIo, "cannot write " + (dir / "fedcast.ini").string());
  ini << write_config(run_cfg);
  std::cout << "wrote " << (dir / "fedcast.ini").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedcast: federated LSTM traffic forecasting simulator"};
  app.require_subcommand(1);
  Args args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", args.config, "experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--out,-o", args.out, "output directory");
    sub->add_option("--seeds", args.seeds, "comma separated seed list");
    sub->add_option("--parallel,-j", args.parallel, "client threads per round")->check(CLI::PositiveNumber);
    sub->add_option("--set", args.overrides, "override a config key, e.g. --set rounds=5");
    return sub;
  };
  struct Cmd {
    const char* name;
    const char* help;
  };
  const std::vector<Cmd> cmds = {
      {"run", "run the configured setting over all seeds"},
      {"compare-settings", "individual, centralized and federated on shared data"},
      {"aggregators", "federated run per aggregation strategy"},
      {"outliers", "configured setting per outlier method"},
      {"select-clients", "federated run for k = K..1 random clients per round"},
      {"deletion", "federated runs leaving out one client at a time"},
      {"finetune", "centralized and federated runs with local fine-tuning"},
      {"kl", "pairwise KL divergence between client training splits"},
      {"synth-gen", "write synthetic per-client CSVs and a config that loads them"},
  };
  for (const auto& c : cmds) add_common(app.add_subcommand(c.name, c.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = load(args);
  } catch (const Error& e) {
    std::cerr << "fedcast " << cmd << ": " << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd == "synth-gen") {
      synth_gen(cfg);
      return 0;
    }
    RunReport report;
    if (cmd == "run") {
      report = run_experiment(cfg);
    } else if (cmd == "compare-settings") {
      report = run_experiment(cfg, {Setting::kIndividual, Setting::kCentralized, Setting::kFederated});
      report.sweep = "settings";
    } else if (cmd == "aggregators") {
      report = run_sweep(cfg, "aggregators", strategy_variants(), {Setting::kFederated});
    } else if (cmd == "outliers") {
      report = run_sweep(cfg, "outliers", outlier_variants(), {cfg.setting});
    } else if (cmd == "select-clients") {
      report = run_sweep(cfg, "select_clients", selection_variants(client_count(cfg)), {Setting::kFederated});
    } else if (cmd == "deletion") {
      report = run_deletion(cfg);
    } else if (cmd == "finetune") {
      cfg.finetune = true;
      report = run_experiment(cfg, {Setting::kCentralized, Setting::kFederated});
      report.sweep = "finetune";
    } else if (cmd == "kl") {
      report.config = cfg;
      report.sweep = "kl";
      report.tables.push_back(kl_table(cfg));
    }
    finish(report, cfg);
  } catch (const Error& e) {
    std::cerr << "fedcast " << cmd << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fedcast " << cmd << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
