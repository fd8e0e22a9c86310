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

#ifndef HDPVFL_GLM_HPP_
#define HDPVFL_GLM_HPP_

#include <span>
#include <string>
#include <vector>

namespace hdpvfl {

enum class LossKind { kLogistic, kLeastSquares, kL2Svm, kExpDispersion };

enum class EdfDistribution { kBernoulli, kNormal, kPoisson, kGamma };

// Exponential-dispersion-family instance: loss (y*theta - b(theta))/a(phi)
// up to a theta-independent term, with a(phi) and b(theta) per distribution.
struct EdfFamily {
  EdfDistribution family = EdfDistribution::kBernoulli;
  double phi = 1.0;          // dispersion parameter
  double theta_bound = 2.0;  // |theta| bound used for sup|b''|; Gamma uses
                             // theta in [-theta_bound, -1/theta_bound]

  double a_phi() const;
  double b(double theta) const;
  double b_prime(double theta) const;
};

// sup of |b''(theta)| over the family's theta domain.
// Bernoulli -> 0.25, Normal -> 1, Poisson -> exp(theta_bound),
// Gamma -> theta_bound^2.
double edf_beta_theta(const EdfFamily& fam);

// A GLM loss together with the constants the noise calibration consumes:
//   L          Lipschitz constant of the loss w.r.t. weights
//   beta_theta smoothness of the loss w.r.t. the natural parameter
//   beta_y     Lipschitz constant of dl/dtheta w.r.t. the target
//   k_y        high-probability bound on |y|
//   beta       smoothness w.r.t. weights (utility bound only)
//   gamma      strong convexity w.r.t. weights (weight-divergence diagnostic)
struct LossSpec {
  LossKind kind = LossKind::kLogistic;
  EdfFamily edf;  // used only when kind == kExpDispersion
  double L = 1.0;
  double beta_theta = 0.25;
  double beta_y = 1.1;
  double k_y = 1.0;
  double beta = 0.25;
  double gamma = 0.0;

  static LossSpec logistic();
  static LossSpec least_squares();
  static LossSpec l2_svm();
  static LossSpec exp_dispersion(EdfFamily fam, double k_y);

  // Parses "logistic", "least_squares", "l2_svm", "edf:poisson", ...
  static LossSpec from_name(const std::string& name);
  std::string name() const;
};

enum class PenaltyKind { kL2, kL1, kElasticNet };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::kL2;
  double lambda = 0.0;
  double mu = 0.0;  // elastic-net mixing, ElasticNet only

  static PenaltySpec from_name(const std::string& name, double lambda, double mu);
  std::string name() const;
};

// Per-sample loss at natural parameter theta, regularization excluded.
double loss_value(const LossSpec& spec, double theta, double y);

// dl/dtheta at (theta, y).
double dl_dtheta(const LossSpec& spec, double theta, double y);

// One penalized gradient step. L2: w - eta*(g + lambda*w). L1 and elastic net
// apply the proximal soft-threshold to w - eta*g.
std::vector<double> apply_penalty(const PenaltySpec& pen,
                                  std::span<const double> w,
                                  std::span<const double> g, double eta);

}  // namespace hdpvfl

#endif  // HDPVFL_GLM_HPP_
