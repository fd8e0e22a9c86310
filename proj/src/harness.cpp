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

#include "hdpvfl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "hdpvfl/errors.hpp"
#include "hdpvfl/rng.hpp"

namespace hdpvfl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_epsilon(double eps) {
  return std::isinf(eps) ? std::string("\"inf\"") : fmt_double(eps);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.uniform_below(i)]);
  }
  return idx;
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kSingleParty:
      return "single_party";
    case Mode::kCentralized:
      return "centralized";
    case Mode::kVflPlain:
      return "vfl_plain";
    case Mode::kVflDp:
      return "vfl_dp";
  }
  return "vfl_dp";
}

Mode mode_from_name(const std::string& name) {
  if (name == "single_party") return Mode::kSingleParty;
  if (name == "centralized") return Mode::kCentralized;
  if (name == "vfl_plain") return Mode::kVflPlain;
  if (name == "vfl_dp") return Mode::kVflDp;
  throw InputError("unknown mode: " + name);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    const std::vector<double>& y, std::uint64_t seed) {
  if (y.size() < 2) throw InputError("holdout_split: need at least 2 samples");
  Rng rng(derive_seed(seed, kStreamHoldout));
  const bool binary = std::all_of(y.begin(), y.end(), [](double v) {
    return v == 1.0 || v == -1.0;
  });

  std::vector<std::size_t> train, test;
  auto split_group = [&](std::vector<std::size_t> group) {
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[rng.uniform_below(i)]);
    }
    const std::size_t n_test = std::max<std::size_t>(1, group.size() / 5);
    for (std::size_t i = 0; i < group.size(); ++i) {
      (i < n_test ? test : train).push_back(group[i]);
    }
  };

  if (binary) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) {
      (y[i] > 0 ? pos : neg).push_back(i);
    }
    if (!pos.empty()) split_group(std::move(pos));
    if (!neg.empty()) split_group(std::move(neg));
  } else {
    std::vector<std::size_t> all(y.size());
    std::iota(all.begin(), all.end(), 0u);
    split_group(std::move(all));
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

double joint_accuracy(const AlignedPair& test, const std::vector<double>& w_a,
                      const std::vector<double>& w_b) {
  if (!test.active.y) throw InputError("joint_accuracy: test set lacks labels");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.n; ++i) {
    const double theta =
        dot(test.active.X.row(i), w_a) + dot(test.passive.X.row(i), w_b);
    const double pred = theta >= 0.0 ? 1.0 : -1.0;
    if (pred == (*test.active.y)[i]) ++correct;
  }
  return static_cast<double>(correct) / test.n;
}

namespace {

MetricsRecord run_cell(Mode mode, double epsilon, std::uint64_t seed,
                       const ExperimentConfig& cfg, const AlignedPair& data) {
  MetricsRecord rec;
  rec.mode = mode_name(mode);
  rec.epsilon = (mode == Mode::kVflDp) ? epsilon : kInf;
  rec.seed = seed;

  TrainConfig tc = cfg.base;
  tc.h.seed = seed;
  tc.h.epsilon = rec.epsilon;
  tc.h.r = 0;
  tc.h.T = 0;

  auto [train_rows, test_rows] = holdout_split(*data.active.y, seed);
  const AlignedPair train = subset_rows(data, train_rows);
  const AlignedPair test = subset_rows(data, test_rows);
  rec.h = tc.h.resolve_for_n(static_cast<std::uint32_t>(train.n));

  const auto start = std::chrono::steady_clock::now();
  try {
    switch (mode) {
      case Mode::kSingleParty: {
        const std::vector<double> w =
            train_single(train.active.X, *train.active.y, tc);
        const std::vector<double> w_b(test.passive.X.cols, 0.0);
        rec.test_accuracy = joint_accuracy(test, w, w_b);
        break;
      }
      case Mode::kCentralized: {
        const TrainedModel m = train_local_joint(
            train.active.X, train.passive.X, *train.active.y, tc);
        rec.test_accuracy = joint_accuracy(test, m.w_a, m.w_b);
        rec.train_loss = m.epoch_loss;
        break;
      }
      case Mode::kVflPlain:
      case Mode::kVflDp: {
        const TrainOutcome out = run_training(train.active, train.passive, tc);
        rec.test_accuracy = joint_accuracy(test, out.model.w_a, out.model.w_b);
        rec.train_loss = out.model.epoch_loss;
        break;
      }
    }
  } catch (const DivergenceError&) {
    rec.diverged = true;
    rec.test_accuracy = 0.0;
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rec;
}

}  // namespace

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg,
                                          const AlignedPair& data) {
  if (cfg.repeats < 1) throw InputError("repeats must be >= 1");
  std::vector<double> grid;
  if (cfg.mode == Mode::kVflDp) {
    if (cfg.epsilon_grid.empty()) {
      throw InputError("epsilon grid must be nonempty for vfl_dp sweeps");
    }
    grid = cfg.epsilon_grid;
  } else {
    grid = {kInf};
  }

  std::vector<MetricsRecord> records;
  for (double eps : grid) {
    for (std::uint32_t i = 0; i < cfg.repeats; ++i) {
      records.push_back(
          run_cell(cfg.mode, eps, cfg.base.h.seed + i, cfg, data));
    }
  }
  return records;
}

Hyperparams tune(const ExperimentConfig& cfg, const AlignedPair& data,
                 const std::vector<std::uint32_t>& e_grid,
                 const std::vector<double>& k_grid) {
  if (e_grid.empty() || k_grid.empty()) {
    throw InputError("tune: grids must be nonempty");
  }
  if (cfg.folds < 2) throw InputError("tune: folds must be >= 2");

  Rng rng(derive_seed(cfg.base.h.seed, kStreamFolds));
  const std::vector<std::size_t> order = shuffled_indices(data.n, rng);

  double best_acc = -1.0;
  double best_sens = kInf;
  Hyperparams best = cfg.base.h;
  bool have_best = false;

  for (std::uint32_t e : e_grid) {
    for (double k : k_grid) {
      TrainConfig tc = cfg.base;
      tc.h.e = e;
      tc.h.k = k;
      tc.h.r = 0;
      tc.h.T = 0;

      double acc_sum = 0.0;
      for (std::uint32_t f = 0; f < cfg.folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < order.size(); ++i) {
          (i % cfg.folds == f ? test_rows : train_rows).push_back(order[i]);
        }
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(test_rows.begin(), test_rows.end());
        const AlignedPair train = subset_rows(data, train_rows);
        const AlignedPair test = subset_rows(data, test_rows);
        try {
          const TrainOutcome out = run_training(train.active, train.passive, tc);
          acc_sum += joint_accuracy(test, out.model.w_a, out.model.w_b);
        } catch (const DivergenceError&) {
          // counts as zero accuracy for this fold
        }
      }
      const double acc = acc_sum / cfg.folds;
      const Hyperparams resolved =
          tc.h.resolve_for_n(static_cast<std::uint32_t>(data.n));
      const double sens = delta2_ir_a(resolved, cfg.base.spec);
      const bool better =
          !have_best || acc > best_acc + 1e-12 ||
          (std::abs(acc - best_acc) <= 1e-12 &&
           (sens < best_sens - 1e-12 ||
            (std::abs(sens - best_sens) <= 1e-12 && e < best.e)));
      if (better) {
        have_best = true;
        best_acc = acc;
        best_sens = sens;
        best = tc.h;
      }
    }
  }
  return best;
}

void emit_metrics(const std::vector<MetricsRecord>& records,
                  const std::string& path) {
  if (records.empty()) throw InputError("emit_metrics: no records");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);

  for (const MetricsRecord& r : records) {
    out << "{\"mode\":\"" << r.mode << "\",\"epsilon\":" << fmt_epsilon(r.epsilon)
        << ",\"test_accuracy\":" << fmt_double(r.test_accuracy)
        << ",\"seed\":" << r.seed
        << ",\"diverged\":" << (r.diverged ? "true" : "false")
        << ",\"h\":{\"eta\":" << fmt_double(r.h.eta) << ",\"b\":" << r.h.b
        << ",\"e\":" << r.h.e << ",\"r\":" << r.h.r << ",\"T\":" << r.h.T
        << ",\"k\":" << fmt_double(r.h.k)
        << ",\"lambda\":" << fmt_double(r.h.lambda)
        << ",\"delta\":" << fmt_double(r.h.delta) << "},\"train_loss\":[";
    for (std::size_t i = 0; i < r.train_loss.size(); ++i) {
      if (i) out << ',';
      out << fmt_double(r.train_loss[i]);
    }
    out << "]}\n";
  }

  // Summary table: mean and std of accuracy per (mode, epsilon).
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const MetricsRecord& r : records) {
    groups[{r.mode, r.epsilon}].push_back(r.test_accuracy);
  }
  out << "# mode epsilon mean_accuracy std_accuracy runs\n";
  for (const auto& [key, accs] : groups) {
    const double mean =
        std::accumulate(accs.begin(), accs.end(), 0.0) / accs.size();
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    const double stddev = std::sqrt(var / accs.size());
    char line[160];
    std::snprintf(line, sizeof line, "# %s %s %.6f %.6f %zu\n",
                  key.first.c_str(),
                  std::isinf(key.second) ? "inf" : fmt_double(key.second).c_str(),
                  mean, stddev, accs.size());
    out << line;
  }
}

std::string bound_report(const Hyperparams& h, const LossSpec& spec) {
  h.validate();
  if (h.T < 1) throw InputError("bound_report requires resolved T >= 1");
  const double d2b = delta2_ir_b(h, spec.L);
  const double d2a = delta2_ir_a(h, spec);
  const NoiseScales noise = compute_noise_scales(h, spec);
  std::ostringstream out;
  char buf[96];
  auto line = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%-22s %.10g\n", name, v);
    out << buf;
  };
  line("delta2_ir_b", d2b);
  line("delta2_ir_a", d2a);
  line("sigma_ir_b", noise.sigma_ir_b);
  line("sigma_ir_a", noise.sigma_ir_a);
  line("gradient_error_bound", gradient_error_bound(h, spec));
  line("utility_bound", utility_bound(h, spec));
  return out.str();
}

}  // namespace hdpvfl
