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

#ifndef HDPVFL_PRIVACY_HPP_
#define HDPVFL_PRIVACY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "hdpvfl/glm.hpp"
#include "hdpvfl/rng.hpp"

namespace hdpvfl {

// All knobs of the joint training loop. r and T are derived from the dataset
// size once known (resolve_for_n); until then they are zero.
struct Hyperparams {
  double epsilon = 1.0;  // infinity = explicit no-privacy mode
  double delta = 0.01;
  double eta = 0.1;
  std::uint32_t b = 1;   // mini-batch size
  std::uint32_t e = 1;   // epochs
  std::uint32_t r = 0;   // mini-batches per epoch, set by resolve_for_n
  std::uint32_t T = 0;   // e * r, set by resolve_for_n
  double k = 1.0;        // weight-norm clipping bound
  double lambda = 0.0;
  std::uint64_t seed = 0;

  bool no_privacy() const;

  // Throws InputError on invalid values; logs a warning to stderr when
  // epsilon >= 1 (the Gaussian-mechanism guarantee assumes epsilon < 1,
  // but larger budgets are permitted to match common experimental practice).
  void validate() const;

  // Returns a copy with b clamped to n (full-batch downgrade, logged),
  // r = floor(n/b) and T = e*r filled in.
  Hyperparams resolve_for_n(std::uint32_t n) const;
};

struct NoiseScales {
  double sigma_ir_b = 0.0;  // std of noise the passive party adds to IR_B
  double sigma_ir_a = 0.0;  // std of noise the active party adds to IR_A
};

// Worst-case weight divergence between neighboring runs: 2*e*eta*L/b.
double delta_w_bound(const Hyperparams& h, double L);

// l2-sensitivity of the full IR_B sequence:
// sqrt(4 L^2 e^2 T eta^2 / b + 8 k L e^2 eta / b + 4 k^2 e).
double delta2_ir_b(const Hyperparams& h, double L);

// l2-sensitivity of the full IR_A sequence:
// sqrt(4 bt^2 L^2 e^2 T eta^2 / b + 8 (bt*k + by*ky) bt L e^2 eta / b
//      + 4 (bt*k + by*ky)^2 e),   bt = beta_theta, by = beta_y, ky = k_y.
double delta2_ir_a(const Hyperparams& h, const LossSpec& spec);

// Gaussian-mechanism noise std: sqrt(2 ln(1.25/delta)) * delta2 / epsilon.
double gaussian_sigma(double delta2, double epsilon, double delta);

// Both noise scales for a run. Zero in no-privacy mode.
NoiseScales compute_noise_scales(const Hyperparams& h, const LossSpec& spec);

// v + iid Normal(0, sigma^2) per component. sigma = 0 returns v unchanged
// without consuming the rng.
std::vector<double> perturb(std::span<const double> v, double sigma, Rng& rng);

// Magnitude of the per-iteration gradient error caused by the noise
// (diagnostic, constant factor 1).
double gradient_error_bound(const Hyperparams& h, const LossSpec& spec);

// Excess-risk bound [k sqrt(beta/T) + 2 sqrt(T/beta) * gradient_error]^2
// (diagnostic, constant factor 1).
double utility_bound(const Hyperparams& h, const LossSpec& spec);

}  // namespace hdpvfl

#endif  // HDPVFL_PRIVACY_HPP_
