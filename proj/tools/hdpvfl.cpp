// Copyright 2026 The HDP-VFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hdpvfl/data.hpp"
#include "hdpvfl/errors.hpp"
#include "hdpvfl/harness.hpp"
#include "hdpvfl/protocol.hpp"
#include "hdpvfl/transport.hpp"

namespace {

using namespace hdpvfl;

double parse_epsilon(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw InputError("bad epsilon: " + s);
  }
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_epsilon(cell));
  return out;
}

struct CommonFlags {
  std::string loss = "logistic";
  std::string penalty = "l2";
  std::string epsilon = "1";
  double delta = 0.01;
  double eta = 0.1;
  std::uint32_t batch = 64;
  std::uint32_t epochs = 10;
  double clip = 1.0;
  double lambda = 0.001;
  double mu = 0.0;
  std::uint64_t seed = 1;

  void add_to(CLI::App* app) {
    app->add_option("--loss", loss, "logistic|least_squares|l2_svm|edf:<family>");
    app->add_option("--penalty", penalty, "l2|l1|elastic_net");
    app->add_option("--epsilon", epsilon, "privacy budget, or \"inf\"");
    app->add_option("--delta", delta, "privacy slack in (0,1)");
    app->add_option("--eta", eta, "learning rate");
    app->add_option("--batch", batch, "mini-batch size");
    app->add_option("--epochs", epochs, "epoch count");
    app->add_option("--clip", clip, "weight-norm clipping bound k");
    app->add_option("--lambda", lambda, "regularization strength");
    app->add_option("--mu", mu, "elastic-net mixing");
    app->add_option("--seed", seed, "shared RNG seed");
  }

  TrainConfig to_config() const {
    TrainConfig tc;
    tc.h.epsilon = parse_epsilon(epsilon);
    tc.h.delta = delta;
    tc.h.eta = eta;
    tc.h.b = batch;
    tc.h.e = epochs;
    tc.h.k = clip;
    tc.h.lambda = lambda;
    tc.h.seed = seed;
    tc.spec = LossSpec::from_name(loss);
    tc.spec.gamma = lambda;
    tc.pen = PenaltySpec::from_name(penalty, lambda, mu);
    return tc;
  }
};

AlignedPair load_pair(const std::string& active_csv,
                      const std::string& passive_csv) {
  const PartyTable a = load_csv(active_csv, true);
  const PartyTable p = load_csv(passive_csv, false);
  return normalize_features(entity_resolve(a, p));
}

void print_weights(std::ostream& out, const char* name,
                   const std::vector<double>& w) {
  out << name << " = [";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out << ", ";
    out << w[i];
  }
  out << "]\n";
}

int do_prepare(const std::string& input, std::size_t d_active,
               std::uint64_t seed, const std::string& out_active,
               const std::string& out_passive, const std::string& meta_path) {
  const PartyTable full = load_csv(input, true);
  auto [active, passive] = vertical_split(full, d_active, seed);
  AlignedPair pair = normalize_features(entity_resolve(active, passive));
  write_csv(pair.active, out_active);
  write_csv(pair.passive, out_passive);

  std::ofstream meta(meta_path);
  if (!meta) throw InputError("cannot write " + meta_path);
  meta << "n=" << pair.n << "\n";
  meta << "d_active=" << pair.active.X.cols << "\n";
  meta << "d_passive=" << pair.passive.X.cols << "\n";
  meta << "scale_active=" << pair.active.feature_scale << "\n";
  meta << "scale_passive=" << pair.passive.feature_scale << "\n";
  auto join = [](const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) s += ',';
      s += names[i];
    }
    return s;
  };
  meta << "columns_active=" << join(pair.active.column_names) << "\n";
  meta << "columns_passive=" << join(pair.passive.column_names) << "\n";
  std::cout << "prepared " << pair.n << " aligned samples ("
            << pair.active.X.cols << " active / " << pair.passive.X.cols
            << " passive attributes)\n";
  return 0;
}

int do_train(const CommonFlags& flags, const std::string& mode_str,
             const std::string& active_csv, const std::string& passive_csv,
             const std::string& listen, const std::string& connect,
             std::uint32_t passive_dim, const std::string& out_path) {
  const TrainConfig tc = flags.to_config();

  if (!listen.empty()) {
    // Wire mode, passive side: expects a prepared (aligned) passive CSV.
    if (passive_csv.empty()) throw InputError("--listen requires --passive-csv");
    const PartyTable p = normalize_party(load_csv(passive_csv, false));
    TcpListener listener(static_cast<std::uint16_t>(std::stoi(listen)));
    std::cerr << "listening on port " << listener.port() << "\n";
    auto channel = listener.accept_one();
    const PartyResult res = run_passive_party(p, *channel);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      out = &file;
    }
    print_weights(*out, "w_b", res.w);
    return 0;
  }

  if (!connect.empty()) {
    // Wire mode, active side. The peer's feature count goes into Setup so
    // the passive side can validate its table; it comes from the prepare
    // metadata.
    if (active_csv.empty()) throw InputError("--connect requires --active-csv");
    if (passive_dim == 0) throw InputError("--connect requires --passive-dim");
    const auto colon = connect.rfind(':');
    if (colon == std::string::npos) {
      throw InputError("--connect expects host:port");
    }
    const PartyTable a = normalize_party(load_csv(active_csv, true));
    auto channel = tcp_connect(connect.substr(0, colon),
                               static_cast<std::uint16_t>(
                                   std::stoi(connect.substr(colon + 1))));
    const PartyResult res = run_active_party(a, tc, passive_dim, *channel);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      out = &file;
    }
    print_weights(*out, "w_a", res.w);
    if (!res.epoch_loss.empty()) {
      *out << "final_epoch_loss = " << res.epoch_loss.back() << "\n";
    }
    return 0;
  }

  // In-process mode: both tables local.
  AlignedPair pair = load_pair(active_csv, passive_csv);
  ExperimentConfig cfg;
  cfg.mode = mode_from_name(mode_str);
  cfg.base = tc;
  cfg.repeats = 1;
  cfg.epsilon_grid = {tc.h.epsilon};
  const std::vector<MetricsRecord> records = run_experiment(cfg, pair);
  if (!out_path.empty()) {
    emit_metrics(records, out_path);
  }
  std::cout << "mode=" << records[0].mode
            << " test_accuracy=" << records[0].test_accuracy
            << (records[0].diverged ? " (diverged)" : "") << "\n";
  return records[0].diverged ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDP-VFL: differentially private vertical federated learning "
               "for generalized linear models"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "split and normalize a raw CSV");
  std::string input, out_active = "active.csv", out_passive = "passive.csv",
              meta = "prepare.meta";
  std::size_t d_active = 1;
  std::uint64_t prep_seed = 1;
  prepare->add_option("--input", input, "raw CSV with id,label,features")
      ->required();
  prepare->add_option("--d-active", d_active, "active party's attribute count")
      ->required();
  prepare->add_option("--seed", prep_seed, "column-assignment seed");
  prepare->add_option("--out-active", out_active, "active party CSV path");
  prepare->add_option("--out-passive", out_passive, "passive party CSV path");
  prepare->add_option("--meta", meta, "metadata output path");

  // train
  auto* train = app.add_subcommand("train", "one training run");
  CommonFlags train_flags;
  train_flags.add_to(train);
  std::string mode = "vfl_dp", active_csv, passive_csv, listen, connect,
              train_out;
  train->add_option("--mode", mode, "single_party|centralized|vfl_plain|vfl_dp");
  train->add_option("--active-csv", active_csv, "active party CSV");
  train->add_option("--passive-csv", passive_csv, "passive party CSV");
  std::uint32_t passive_dim = 0;
  train->add_option("--listen", listen, "wire mode: listen port (passive)");
  train->add_option("--connect", connect, "wire mode: host:port (active)");
  train->add_option("--passive-dim", passive_dim,
                    "wire mode: passive party's attribute count");
  train->add_option("--out", train_out, "metrics output path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "epsilon-grid experiment sweep");
  CommonFlags sweep_flags;
  sweep_flags.add_to(sweep);
  std::string sweep_mode = "vfl_dp", grid = "0.1,1,10", sweep_active,
              sweep_passive, sweep_out = "metrics.jsonl";
  std::uint32_t repeats = 10;
  sweep->add_option("--mode", sweep_mode, "experiment mode");
  sweep->add_option("--epsilon-grid", grid, "comma-separated epsilons");
  sweep->add_option("--repeats", repeats, "runs per cell");
  sweep->add_option("--active-csv", sweep_active, "active party CSV")->required();
  sweep->add_option("--passive-csv", sweep_passive, "passive party CSV")
      ->required();
  sweep->add_option("--out", sweep_out, "metrics output path");

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "5-fold CV over (e, k)");
  CommonFlags tune_flags;
  tune_flags.add_to(tune_cmd);
  std::string e_grid = "5,10,15", k_grid = "0.1,0.5,1", tune_active, tune_passive;
  std::uint32_t folds = 5;
  tune_cmd->add_option("--e-grid", e_grid, "comma-separated epoch counts");
  tune_cmd->add_option("--k-grid", k_grid, "comma-separated clipping bounds");
  tune_cmd->add_option("--folds", folds, "cross-validation folds");
  tune_cmd->add_option("--active-csv", tune_active, "active party CSV")
      ->required();
  tune_cmd->add_option("--passive-csv", tune_passive, "passive party CSV")
      ->required();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "sensitivity and noise report");
  CommonFlags bounds_flags;
  bounds_flags.add_to(bounds);
  std::uint32_t bounds_n = 0;
  bounds->add_option("--n", bounds_n, "dataset size used to resolve r and T")
      ->required();

  try {
    app.parse(argc, argv);

    if (prepare->parsed()) {
      return do_prepare(input, d_active, prep_seed, out_active, out_passive,
                        meta);
    }
    if (train->parsed()) {
      return do_train(train_flags, mode, active_csv, passive_csv, listen,
                      connect, passive_dim, train_out);
    }
    if (sweep->parsed()) {
      ExperimentConfig cfg;
      cfg.mode = mode_from_name(sweep_mode);
      cfg.base = sweep_flags.to_config();
      cfg.epsilon_grid = parse_grid(grid);
      cfg.repeats = repeats;
      const AlignedPair pair = load_pair(sweep_active, sweep_passive);
      const auto records = run_experiment(cfg, pair);
      emit_metrics(records, sweep_out);
      std::cout << "wrote " << records.size() << " records to " << sweep_out
                << "\n";
      return 0;
    }
    if (tune_cmd->parsed()) {
      ExperimentConfig cfg;
      cfg.mode = Mode::kVflDp;
      cfg.base = tune_flags.to_config();
      cfg.folds = folds;
      const AlignedPair pair = load_pair(tune_active, tune_passive);
      std::vector<std::uint32_t> es;
      for (double v : parse_grid(e_grid)) {
        es.push_back(static_cast<std::uint32_t>(v));
      }
      const Hyperparams best = tune(cfg, pair, es, parse_grid(k_grid));
      std::cout << "selected e=" << best.e << " k=" << best.k << "\n";
      return 0;
    }
    if (bounds->parsed()) {
      const TrainConfig tc = bounds_flags.to_config();
      const Hyperparams h = tc.h.resolve_for_n(bounds_n);
      std::cout << bound_report(h, tc.spec);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const TransportError& e) {
    std::cerr << "transport failure: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
