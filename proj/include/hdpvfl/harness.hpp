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

#ifndef HDPVFL_HARNESS_HPP_
#define HDPVFL_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hdpvfl/data.hpp"
#include "hdpvfl/protocol.hpp"

namespace hdpvfl {

enum class Mode { kSingleParty, kCentralized, kVflPlain, kVflDp };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct ExperimentConfig {
  Mode mode = Mode::kVflDp;
  TrainConfig base;
  std::vector<double> epsilon_grid;  // VflDp only; others run a single cell
  std::uint32_t folds = 5;
  std::uint32_t repeats = 10;
  std::string out_path;
};

struct MetricsRecord {
  std::string mode;
  double epsilon = 0.0;  // infinity for noiseless modes
  double test_accuracy = 0.0;
  std::vector<double> train_loss;
  double wall_time_s = 0.0;  // not emitted, to keep metrics files reproducible
  std::uint64_t seed = 0;
  Hyperparams h;
  bool diverged = false;
};

// Seed-derived 80/20 train/test split, stratified by label when the labels
// are binary. Returns (train_rows, test_rows).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    const std::vector<double>& y, std::uint64_t seed);

// Trains and evaluates each (mode, epsilon, repeat) cell on a held-out
// split. Repeat i uses seed base+i. Divergence is recorded per cell.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg,
                                          const AlignedPair& data);

// 5-fold cross-validated (e, k) selection at the configured epsilon.
// Ties break toward smaller IR_A sensitivity, then smaller e.
Hyperparams tune(const ExperimentConfig& cfg, const AlignedPair& data,
                 const std::vector<std::uint32_t>& e_grid,
                 const std::vector<double>& k_grid);

// One JSONL record per line plus '#'-prefixed mean/std summary lines.
void emit_metrics(const std::vector<MetricsRecord>& records,
                  const std::string& path);

// Text report of the sensitivity and noise quantities for a configured run.
std::string bound_report(const Hyperparams& h, const LossSpec& spec);

// Fraction of test samples with sign(x_a.w_a + x_b.w_b) == y.
double joint_accuracy(const AlignedPair& test, const std::vector<double>& w_a,
                      const std::vector<double>& w_b);

}  // namespace hdpvfl

#endif  // HDPVFL_HARNESS_HPP_
