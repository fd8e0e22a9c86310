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

#include "hdpvfl/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <utility>

#include "hdpvfl/errors.hpp"
#include "hdpvfl/rng.hpp"

namespace hdpvfl {

namespace {

void check_finite(std::span<const double> w, std::uint32_t t) {
  for (double v : w) {
    if (!std::isfinite(v)) {
      throw DivergenceError("non-finite weights at iteration " +
                            std::to_string(t));
    }
  }
}

void expect_kind(const Message& m, MessageKind kind, std::uint32_t t) {
  if (m.kind != kind) {
    throw TransportError("protocol violation: unexpected message kind at t=" +
                         std::to_string(t));
  }
  if ((kind == MessageKind::kIrA || kind == MessageKind::kIrB) && m.t != t) {
    throw TransportError("protocol violation: expected t=" + std::to_string(t) +
                         ", got t=" + std::to_string(m.t));
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> build_schedule(const Hyperparams& h,
                                                       std::uint32_t n) {
  if (n < 1) throw InputError("build_schedule: n must be >= 1");
  const Hyperparams hr = (h.T == 0) ? h.resolve_for_n(n) : h;
  if (hr.b > n) throw InputError("build_schedule: b > n after resolution");
  Rng rng(derive_seed(hr.seed, kStreamSchedule));
  std::vector<std::vector<std::uint32_t>> schedule;
  schedule.reserve(hr.T);
  std::vector<std::uint32_t> perm(n);
  for (std::uint32_t epoch = 0; epoch < hr.e; ++epoch) {
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::uint32_t i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
    }
    for (std::uint32_t j = 0; j < hr.r; ++j) {
      schedule.emplace_back(perm.begin() + j * hr.b,
                            perm.begin() + (j + 1) * hr.b);
    }
  }
  return schedule;
}

std::vector<double> passive_compute_ir(std::span<const double> w_b,
                                       const Matrix& x_b,
                                       std::span<const std::uint32_t> batch) {
  if (w_b.size() != x_b.cols) {
    throw InputError("passive_compute_ir: weight/feature dimension mismatch");
  }
  std::vector<double> ir;
  ir.reserve(batch.size());
  for (std::uint32_t i : batch) ir.push_back(dot(x_b.row(i), w_b));
  return ir;
}

std::vector<double> active_compute_ir(const LossSpec& spec,
                                      std::span<const double> w_a,
                                      const Matrix& x_a,
                                      std::span<const double> y,
                                      std::span<const std::uint32_t> batch,
                                      std::span<const double> sec_ir_b) {
  if (w_a.size() != x_a.cols) {
    throw InputError("active_compute_ir: weight/feature dimension mismatch");
  }
  if (sec_ir_b.size() != batch.size()) {
    throw InputError("active_compute_ir: sec_ir_b length != batch size");
  }
  std::vector<double> ir;
  ir.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const std::uint32_t i = batch[j];
    const double theta = dot(x_a.row(i), w_a) + sec_ir_b[j];
    ir.push_back(dl_dtheta(spec, theta, y[i]));
  }
  return ir;
}

std::vector<double> ir_gradient(std::span<const double> ir, const Matrix& x,
                                std::span<const std::uint32_t> batch,
                                std::uint32_t b) {
  if (ir.size() != batch.size()) {
    throw InputError("ir_gradient: ir length != batch size");
  }
  std::vector<double> g(x.cols, 0.0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto row = x.row(batch[j]);
    for (std::size_t c = 0; c < x.cols; ++c) g[c] += ir[j] * row[c];
  }
  for (double& v : g) v /= b;
  return g;
}

std::vector<double> clip_weights(std::span<const double> w, double k) {
  if (!(k > 0.0)) throw InputError("clip_weights: k must be positive");
  const double norm = norm2(w);
  std::vector<double> out(w.begin(), w.end());
  if (norm > k) {
    const double scale = k / norm;
    for (double& v : out) v *= scale;
  }
  return out;
}

PartyResult run_active_party(const PartyTable& data, const TrainConfig& cfg,
                             std::uint32_t d_b, Channel& channel,
                             const RunOptions& opts) {
  if (!data.y) throw InputError("active party requires targets");
  const auto n = static_cast<std::uint32_t>(data.X.rows);
  const Hyperparams h = cfg.h.resolve_for_n(n);
  const NoiseScales noise = compute_noise_scales(h, cfg.spec);
  const auto schedule = build_schedule(h, n);
  Rng noise_rng(derive_seed(h.seed, kStreamActiveNoise));

  SetupPayload setup;
  setup.h = h;
  setup.loss = cfg.spec.name();
  setup.penalty = cfg.pen.name();
  setup.mu = cfg.pen.mu;
  setup.n = n;
  setup.d_a = static_cast<std::uint32_t>(data.X.cols);
  setup.d_b = d_b;
  channel.send(Message::make_setup(setup));

  PartyResult result;
  result.w.assign(data.X.cols, 0.0);
  const std::span<const double> y(*data.y);

  double epoch_loss_sum = 0.0;
  for (std::uint32_t t = 0; t < h.T; ++t) {
    const Message ir_b_msg = channel.recv();
    expect_kind(ir_b_msg, MessageKind::kIrB, t);
    const auto& batch = schedule[t];
    if (ir_b_msg.values.size() != batch.size()) {
      throw TransportError("protocol violation: IR_B length mismatch");
    }

    std::vector<double> ir =
        active_compute_ir(cfg.spec, result.w, data.X, y, batch, ir_b_msg.values);
    channel.send(
        Message::make_ir_a(t, perturb(ir, noise.sigma_ir_a, noise_rng)));
    if (opts.record_ir) result.ir_history.push_back(ir);

    // Local loss approximation at the only theta the active party can form.
    double batch_loss = 0.0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const double theta =
          dot(data.X.row(batch[j]), result.w) + ir_b_msg.values[j];
      batch_loss += loss_value(cfg.spec, theta, y[batch[j]]);
    }
    epoch_loss_sum += batch_loss / h.b;

    // Step 9 uses the unperturbed IR_A on the active side.
    const std::vector<double> g = ir_gradient(ir, data.X, batch, h.b);
    if (opts.record_gradients) result.grad_history.push_back(g);
    result.w = clip_weights(apply_penalty(cfg.pen, result.w, g, h.eta), h.k);
    check_finite(result.w, t);

    if ((t + 1) % h.r == 0) {
      result.epoch_loss.push_back(epoch_loss_sum / h.r);
      epoch_loss_sum = 0.0;
    }
  }

  DonePayload done;
  done.epoch_loss = result.epoch_loss;
  channel.send(Message::make_done(done));
  return result;
}

PartyResult run_passive_party(const PartyTable& data, Channel& channel,
                              const RunOptions& opts) {
  const Message setup_msg = channel.recv();
  expect_kind(setup_msg, MessageKind::kSetup, 0);
  const SetupPayload& setup = setup_msg.setup;
  const Hyperparams& h = setup.h;
  h.validate();
  if (setup.n != data.X.rows) {
    throw InputError("setup n does not match passive dataset size");
  }
  if (setup.d_b != data.X.cols) {
    throw InputError("setup d_b does not match passive feature count");
  }
  const LossSpec spec = LossSpec::from_name(setup.loss);
  const PenaltySpec pen = PenaltySpec::from_name(setup.penalty, h.lambda, setup.mu);
  const NoiseScales noise = compute_noise_scales(h, spec);
  const auto schedule = build_schedule(h, setup.n);
  Rng noise_rng(derive_seed(h.seed, kStreamPassiveNoise));

  PartyResult result;
  result.w.assign(data.X.cols, 0.0);

  for (std::uint32_t t = 0; t < h.T; ++t) {
    const auto& batch = schedule[t];
    std::vector<double> ir = passive_compute_ir(result.w, data.X, batch);
    channel.send(
        Message::make_ir_b(t, perturb(ir, noise.sigma_ir_b, noise_rng)));
    if (opts.record_ir) result.ir_history.push_back(std::move(ir));

    const Message ir_a_msg = channel.recv();
    expect_kind(ir_a_msg, MessageKind::kIrA, t);
    if (ir_a_msg.values.size() != batch.size()) {
      throw TransportError("protocol violation: IR_A length mismatch");
    }

    // Step 10 uses the perturbed IR_A.
    const std::vector<double> g =
        ir_gradient(ir_a_msg.values, data.X, batch, h.b);
    if (opts.record_gradients) result.grad_history.push_back(g);
    result.w = clip_weights(apply_penalty(pen, result.w, g, h.eta), h.k);
    check_finite(result.w, t);
  }

  const Message done = channel.recv();
  expect_kind(done, MessageKind::kDone, h.T);
  return result;
}

TrainOutcome run_training(const PartyTable& active, const PartyTable& passive,
                          const TrainConfig& cfg, const TrainingOptions& opts) {
  if (active.X.rows != passive.X.rows) {
    throw InputError("run_training: parties must hold equal sample counts");
  }
  auto [active_end, passive_end] = make_channel_pair();

  std::unique_ptr<Channel> active_channel = std::move(active_end);
  RecordingChannel* recorder = nullptr;
  if (opts.record_transcript) {
    auto rec = std::make_unique<RecordingChannel>(std::move(active_channel));
    recorder = rec.get();
    active_channel = std::move(rec);
  }

  TrainOutcome outcome;
  std::exception_ptr passive_error;
  std::thread passive_thread([&] {
    try {
      outcome.passive = run_passive_party(passive, *passive_end, opts);
    } catch (...) {
      passive_error = std::current_exception();
      passive_end->close();
    }
  });

  std::exception_ptr active_error;
  try {
    outcome.active = run_active_party(
        active, cfg, static_cast<std::uint32_t>(passive.X.cols),
        *active_channel, opts);
  } catch (...) {
    active_error = std::current_exception();
    active_channel->close();
  }
  passive_thread.join();
  if (active_error) std::rethrow_exception(active_error);
  if (passive_error) std::rethrow_exception(passive_error);

  outcome.model.w_a = outcome.active.w;
  outcome.model.w_b = outcome.passive.w;
  outcome.model.epoch_loss = outcome.active.epoch_loss;
  if (recorder) outcome.active_transcript = recorder->transcript();
  return outcome;
}

TrainedModel train_local_joint(const Matrix& x_a, const Matrix& x_b,
                               std::span<const double> y,
                               const TrainConfig& cfg) {
  if (x_a.rows != x_b.rows || x_a.rows != y.size()) {
    throw InputError("train_local_joint: row count mismatch");
  }
  const auto n = static_cast<std::uint32_t>(x_a.rows);
  const Hyperparams h = cfg.h.resolve_for_n(n);
  const auto schedule = build_schedule(h, n);

  TrainedModel model;
  model.w_a.assign(x_a.cols, 0.0);
  model.w_b.assign(x_b.cols, 0.0);

  double epoch_loss_sum = 0.0;
  for (std::uint32_t t = 0; t < h.T; ++t) {
    const auto& batch = schedule[t];
    const std::vector<double> ir_b = passive_compute_ir(model.w_b, x_b, batch);
    const std::vector<double> ir =
        active_compute_ir(cfg.spec, model.w_a, x_a, y, batch, ir_b);

    double batch_loss = 0.0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const double theta = dot(x_a.row(batch[j]), model.w_a) + ir_b[j];
      batch_loss += loss_value(cfg.spec, theta, y[batch[j]]);
    }
    epoch_loss_sum += batch_loss / h.b;

    const std::vector<double> g_a = ir_gradient(ir, x_a, batch, h.b);
    const std::vector<double> g_b = ir_gradient(ir, x_b, batch, h.b);
    model.w_a = clip_weights(apply_penalty(cfg.pen, model.w_a, g_a, h.eta), h.k);
    model.w_b = clip_weights(apply_penalty(cfg.pen, model.w_b, g_b, h.eta), h.k);
    check_finite(model.w_a, t);
    check_finite(model.w_b, t);

    if ((t + 1) % h.r == 0) {
      model.epoch_loss.push_back(epoch_loss_sum / h.r);
      epoch_loss_sum = 0.0;
    }
  }
  return model;
}

std::vector<double> train_single(const Matrix& x, std::span<const double> y,
                                 const TrainConfig& cfg) {
  if (x.rows != y.size()) throw InputError("train_single: row count mismatch");
  const auto n = static_cast<std::uint32_t>(x.rows);
  const Hyperparams h = cfg.h.resolve_for_n(n);
  const auto schedule = build_schedule(h, n);

  std::vector<double> w(x.cols, 0.0);
  for (std::uint32_t t = 0; t < h.T; ++t) {
    const auto& batch = schedule[t];
    std::vector<double> ir;
    ir.reserve(batch.size());
    for (std::uint32_t i : batch) {
      ir.push_back(dl_dtheta(cfg.spec, dot(x.row(i), w), y[i]));
    }
    const std::vector<double> g = ir_gradient(ir, x, batch, h.b);
    w = clip_weights(apply_penalty(cfg.pen, w, g, h.eta), h.k);
    check_finite(w, t);
  }
  return w;
}

}  // namespace hdpvfl
