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

#include "hdpvfl/privacy.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "hdpvfl/errors.hpp"

namespace hdpvfl {

bool Hyperparams::no_privacy() const {
  return std::isinf(epsilon);
}

void Hyperparams::validate() const {
  if (!no_privacy()) {
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    if (epsilon >= 1.0) {
      std::cerr << "warning: epsilon = " << epsilon
                << " >= 1 exceeds the Gaussian-mechanism regime\n";
    }
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must be in (0,1)");
  if (!(eta >= 0.0)) throw InputError("eta must be nonnegative");
  if (b < 1) throw InputError("batch size must be >= 1");
  if (e < 1) throw InputError("epoch count must be >= 1");
  if (!(k > 0.0)) throw InputError("clipping bound k must be positive");
  if (lambda < 0.0) throw InputError("lambda must be nonnegative");
  if (r != 0 && T != e * r) throw InputError("T must equal e*r");
}

Hyperparams Hyperparams::resolve_for_n(std::uint32_t n) const {
  if (n < 1) throw InputError("dataset must be nonempty");
  Hyperparams out = *this;
  if (out.b > n) {
    std::cerr << "note: batch size " << out.b << " > n = " << n
              << ", downgrading to full batch\n";
    out.b = n;
  }
  out.r = n / out.b;
  out.T = out.e * out.r;
  out.validate();
  return out;
}

double delta_w_bound(const Hyperparams& h, double L) {
  return 2.0 * h.e * h.eta * L / h.b;
}

double delta2_ir_b(const Hyperparams& h, double L) {
  const double e = h.e, T = h.T, eta = h.eta, b = h.b, k = h.k;
  return std::sqrt(4.0 * L * L * e * e * T * eta * eta / b +
                   8.0 * k * L * e * e * eta / b + 4.0 * k * k * e);
}

double delta2_ir_a(const Hyperparams& h, const LossSpec& spec) {
  const double e = h.e, T = h.T, eta = h.eta, b = h.b, k = h.k;
  const double bt = spec.beta_theta, L = spec.L;
  const double c = bt * k + spec.beta_y * spec.k_y;
  return std::sqrt(4.0 * bt * bt * L * L * e * e * T * eta * eta / b +
                   8.0 * c * bt * L * e * e * eta / b + 4.0 * c * c * e);
}

double gaussian_sigma(double delta2, double epsilon, double delta) {
  if (delta2 < 0.0) throw InputError("sensitivity must be nonnegative");
  if (std::isinf(epsilon)) return 0.0;
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must be in (0,1)");
  return std::sqrt(2.0 * std::log(1.25 / delta)) * delta2 / epsilon;
}

NoiseScales compute_noise_scales(const Hyperparams& h, const LossSpec& spec) {
  h.validate();
  if (h.no_privacy()) return NoiseScales{0.0, 0.0};
  NoiseScales s;
  s.sigma_ir_b = gaussian_sigma(delta2_ir_b(h, spec.L), h.epsilon, h.delta);
  s.sigma_ir_a = gaussian_sigma(delta2_ir_a(h, spec), h.epsilon, h.delta);
  return s;
}

std::vector<double> perturb(std::span<const double> v, double sigma, Rng& rng) {
  if (sigma < 0.0) throw InputError("sigma must be nonnegative");
  std::vector<double> out(v.begin(), v.end());
  if (sigma == 0.0) return out;
  for (double& x : out) x += sigma * rng.gaussian();
  return out;
}

double gradient_error_bound(const Hyperparams& h, const LossSpec& spec) {
  if (h.no_privacy()) return 0.0;
  const double e = h.e, T = h.T, eta = h.eta, b = h.b, k = h.k;
  const double bt = spec.beta_theta, L = spec.L;
  const double c = bt * k + spec.beta_y * spec.k_y;
  const double inner = bt * bt * L * L * e * e * T * eta * eta / b +
                       2.0 * c * bt * L * e * e * eta / b + c * c * e;
  return std::sqrt(std::log(1.25 / h.delta)) / h.epsilon * std::sqrt(inner);
}

double utility_bound(const Hyperparams& h, const LossSpec& spec) {
  if (!(spec.beta > 0.0)) throw InputError("utility bound requires beta > 0");
  if (h.T < 1) throw InputError("utility bound requires resolved T >= 1");
  const double first = h.k * std::sqrt(spec.beta / h.T);
  const double second =
      2.0 * std::sqrt(h.T / spec.beta) * gradient_error_bound(h, spec);
  const double sum = first + second;
  return sum * sum;
}

}  // namespace hdpvfl
