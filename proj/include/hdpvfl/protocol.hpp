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

#ifndef HDPVFL_PROTOCOL_HPP_
#define HDPVFL_PROTOCOL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "hdpvfl/data.hpp"
#include "hdpvfl/glm.hpp"
#include "hdpvfl/matrix.hpp"
#include "hdpvfl/privacy.hpp"
#include "hdpvfl/transport.hpp"

namespace hdpvfl {

struct TrainConfig {
  Hyperparams h;
  LossSpec spec;
  PenaltySpec pen;
};

struct TrainedModel {
  std::vector<double> w_a;
  std::vector<double> w_b;
  std::vector<double> epoch_loss;  // active party's local loss approximation
};

// Seed-derived mini-batch schedule: per epoch, a permutation of {0..n-1}
// partitioned into r = floor(n/b) batches of exactly b; remainder samples
// sit out that epoch. Identical on both parties for identical (seed, h, n).
std::vector<std::vector<std::uint32_t>> build_schedule(const Hyperparams& h,
                                                       std::uint32_t n);

// IR_B: inner products x_i^B . w^B over the batch (pre-noise).
std::vector<double> passive_compute_ir(std::span<const double> w_b,
                                       const Matrix& x_b,
                                       std::span<const std::uint32_t> batch);

// IR_A: dl/dtheta at theta_i = x_i^A . w^A + sec_ir_b[i] (pre-noise).
std::vector<double> active_compute_ir(const LossSpec& spec,
                                      std::span<const double> w_a,
                                      const Matrix& x_a,
                                      std::span<const double> y,
                                      std::span<const std::uint32_t> batch,
                                      std::span<const double> sec_ir_b);

// (IR)^T X_batch / b. Used for g^A with the unperturbed IR_A and for g^B
// with the perturbed one.
std::vector<double> ir_gradient(std::span<const double> ir, const Matrix& x,
                                std::span<const std::uint32_t> batch,
                                std::uint32_t b);

// w / max(1, ||w||_2 / k).
std::vector<double> clip_weights(std::span<const double> w, double k);

struct PartyResult {
  std::vector<double> w;
  std::vector<double> epoch_loss;                 // active only
  std::vector<std::vector<double>> ir_history;    // unperturbed, if recorded
  std::vector<std::vector<double>> grad_history;  // if recorded
};

struct RunOptions {
  bool record_ir = false;
  bool record_gradients = false;
};

// The two party state machines. Each drives one endpoint of a channel and
// blocks on the peer; they may run on separate threads or processes.
PartyResult run_active_party(const PartyTable& data, const TrainConfig& cfg,
                             std::uint32_t d_b, Channel& channel,
                             const RunOptions& opts = {});
PartyResult run_passive_party(const PartyTable& data, Channel& channel,
                              const RunOptions& opts = {});

struct TrainOutcome {
  TrainedModel model;
  std::vector<TranscriptEntry> active_transcript;  // if record_transcript
  PartyResult active;
  PartyResult passive;
};

struct TrainingOptions : RunOptions {
  bool record_transcript = false;
};

// Runs both parties over a paired in-process channel (passive on a worker
// thread) and assembles the joint model.
TrainOutcome run_training(const PartyTable& active, const PartyTable& passive,
                          const TrainConfig& cfg,
                          const TrainingOptions& opts = {});

// Centralized reference: identical math (same schedule, per-block penalty
// and clipping) without channels or noise. Used by the non-FL baselines.
TrainedModel train_local_joint(const Matrix& x_a, const Matrix& x_b,
                               std::span<const double> y,
                               const TrainConfig& cfg);

// Single-table trainer (active party alone): one weight block, one clip.
std::vector<double> train_single(const Matrix& x, std::span<const double> y,
                                 const TrainConfig& cfg);

}  // namespace hdpvfl

#endif  // HDPVFL_PROTOCOL_HPP_
