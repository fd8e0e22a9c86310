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

#include "hdpvfl/glm.hpp"

#include <algorithm>
#include <cmath>

#include "hdpvfl/errors.hpp"

namespace hdpvfl {

namespace {

void check_binary_target(double y, const char* loss) {
  if (y != 1.0 && y != -1.0) {
    throw InputError(std::string(loss) + ": target must be -1 or +1, got " +
                     std::to_string(y));
  }
}

void check_edf_domain(const EdfFamily& fam, double theta, double y) {
  if (fam.family == EdfDistribution::kGamma && theta >= 0.0) {
    throw InputError("edf:gamma: natural parameter must be negative, got " +
                     std::to_string(theta));
  }
  if (fam.family == EdfDistribution::kPoisson && y < 0.0) {
    throw InputError("edf:poisson: target must be nonnegative");
  }
}

}  // namespace

double EdfFamily::a_phi() const {
  switch (family) {
    case EdfDistribution::kBernoulli:
    case EdfDistribution::kPoisson:
      return 1.0;
    case EdfDistribution::kNormal:
    case EdfDistribution::kGamma:
      return phi;
  }
  return 1.0;
}

double EdfFamily::b(double theta) const {
  switch (family) {
    case EdfDistribution::kBernoulli:
      return std::log1p(std::exp(theta));
    case EdfDistribution::kNormal:
      return theta * theta / 2.0;
    case EdfDistribution::kPoisson:
      return std::exp(theta);
    case EdfDistribution::kGamma:
      return -std::log(-theta);
  }
  return 0.0;
}

double EdfFamily::b_prime(double theta) const {
  switch (family) {
    case EdfDistribution::kBernoulli:
      return 1.0 / (1.0 + std::exp(-theta));
    case EdfDistribution::kNormal:
      return theta;
    case EdfDistribution::kPoisson:
      return std::exp(theta);
    case EdfDistribution::kGamma:
      return -1.0 / theta;
  }
  return 0.0;
}

double edf_beta_theta(const EdfFamily& fam) {
  if (fam.theta_bound <= 0.0) {
    throw InputError("edf theta_bound must be positive");
  }
  switch (fam.family) {
    case EdfDistribution::kBernoulli:
      return 0.25;
    case EdfDistribution::kNormal:
      return 1.0;
    case EdfDistribution::kPoisson:
      // b''(theta) = exp(theta), increasing.
      return std::exp(fam.theta_bound);
    case EdfDistribution::kGamma:
      // b''(theta) = 1/theta^2 on [-theta_bound, -1/theta_bound].
      return fam.theta_bound * fam.theta_bound;
  }
  return 0.0;
}

LossSpec LossSpec::logistic() {
  LossSpec s;
  s.kind = LossKind::kLogistic;
  s.L = 1.0;
  s.beta_theta = 0.25;
  s.beta_y = 1.1;
  s.k_y = 1.0;
  s.beta = 0.25;
  return s;
}

LossSpec LossSpec::least_squares() {
  LossSpec s;
  s.kind = LossKind::kLeastSquares;
  s.L = 6.0;
  s.beta_theta = 2.0;
  s.beta_y = 2.0;
  s.k_y = 3.0;
  s.beta = 2.0;
  return s;
}

LossSpec LossSpec::l2_svm() {
  LossSpec s;
  s.kind = LossKind::kL2Svm;
  s.L = 2.0;
  s.beta_theta = 2.0;
  s.beta_y = 2.0;
  s.k_y = 1.0;
  s.beta = 2.0;
  return s;
}

LossSpec LossSpec::exp_dispersion(EdfFamily fam, double k_y) {
  LossSpec s;
  s.kind = LossKind::kExpDispersion;
  s.edf = fam;
  s.k_y = k_y;
  s.L = k_y / fam.a_phi();
  s.beta_y = 1.0 / fam.a_phi();
  s.beta_theta = edf_beta_theta(fam);
  s.beta = s.beta_theta;
  return s;
}

LossSpec LossSpec::from_name(const std::string& name) {
  if (name == "logistic") return logistic();
  if (name == "least_squares") return least_squares();
  if (name == "l2_svm") return l2_svm();
  if (name.rfind("edf:", 0) == 0) {
    const std::string fam = name.substr(4);
    EdfFamily f;
    double k_y = 1.0;
    if (fam == "bernoulli") {
      f.family = EdfDistribution::kBernoulli;
    } else if (fam == "normal") {
      f.family = EdfDistribution::kNormal;
      k_y = 3.0;
    } else if (fam == "poisson") {
      f.family = EdfDistribution::kPoisson;
      k_y = 3.0;
    } else if (fam == "gamma") {
      f.family = EdfDistribution::kGamma;
      k_y = 3.0;
    } else {
      throw InputError("unknown edf family: " + fam);
    }
    return exp_dispersion(f, k_y);
  }
  throw InputError("unknown loss: " + name);
}

std::string LossSpec::name() const {
  switch (kind) {
    case LossKind::kLogistic:
      return "logistic";
    case LossKind::kLeastSquares:
      return "least_squares";
    case LossKind::kL2Svm:
      return "l2_svm";
    case LossKind::kExpDispersion:
      switch (edf.family) {
        case EdfDistribution::kBernoulli:
          return "edf:bernoulli";
        case EdfDistribution::kNormal:
          return "edf:normal";
        case EdfDistribution::kPoisson:
          return "edf:poisson";
        case EdfDistribution::kGamma:
          return "edf:gamma";
      }
  }
  return "logistic";
}

PenaltySpec PenaltySpec::from_name(const std::string& name, double lambda,
                                   double mu) {
  if (lambda < 0.0) throw InputError("lambda must be nonnegative");
  if (mu < 0.0) throw InputError("mu must be nonnegative");
  PenaltySpec p;
  p.lambda = lambda;
  p.mu = mu;
  if (name == "l2") {
    p.kind = PenaltyKind::kL2;
  } else if (name == "l1") {
    p.kind = PenaltyKind::kL1;
  } else if (name == "elastic_net") {
    p.kind = PenaltyKind::kElasticNet;
  } else {
    throw InputError("unknown penalty: " + name);
  }
  return p;
}

std::string PenaltySpec::name() const {
  switch (kind) {
    case PenaltyKind::kL2:
      return "l2";
    case PenaltyKind::kL1:
      return "l1";
    case PenaltyKind::kElasticNet:
      return "elastic_net";
  }
  return "l2";
}

double loss_value(const LossSpec& spec, double theta, double y) {
  switch (spec.kind) {
    case LossKind::kLogistic:
      check_binary_target(y, "logistic");
      // log(1 + exp(-y*theta)), computed stably for large |y*theta|.
      {
        const double m = -y * theta;
        return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
      }
    case LossKind::kLeastSquares:
      return (y - theta) * (y - theta);
    case LossKind::kL2Svm: {
      check_binary_target(y, "l2_svm");
      const double margin = std::max(0.0, 1.0 - y * theta);
      return margin * margin;
    }
    case LossKind::kExpDispersion:
      check_edf_domain(spec.edf, theta, y);
      // Terms independent of theta are dropped.
      return (y * theta - spec.edf.b(theta)) / spec.edf.a_phi();
  }
  return 0.0;
}

double dl_dtheta(const LossSpec& spec, double theta, double y) {
  switch (spec.kind) {
    case LossKind::kLogistic:
      check_binary_target(y, "logistic");
      return (1.0 / (1.0 + std::exp(-y * theta)) - 1.0) * y;
    case LossKind::kLeastSquares:
      return -2.0 * (y - theta);
    case LossKind::kL2Svm:
      check_binary_target(y, "l2_svm");
      return -2.0 * y * std::max(0.0, 1.0 - y * theta);
    case LossKind::kExpDispersion:
      check_edf_domain(spec.edf, theta, y);
      return (y - spec.edf.b_prime(theta)) / spec.edf.a_phi();
  }
  return 0.0;
}

std::vector<double> apply_penalty(const PenaltySpec& pen,
                                  std::span<const double> w,
                                  std::span<const double> g, double eta) {
  if (w.size() != g.size()) {
    throw InputError("apply_penalty: dim(w) != dim(g)");
  }
  if (eta < 0.0) throw InputError("apply_penalty: eta must be nonnegative");
  std::vector<double> out(w.size());
  switch (pen.kind) {
    case PenaltyKind::kL2:
      for (std::size_t j = 0; j < w.size(); ++j) {
        out[j] = w[j] - eta * (g[j] + pen.lambda * w[j]);
      }
      break;
    case PenaltyKind::kL1:
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double wt = w[j] - eta * g[j];
        const double shrunk = std::max(0.0, std::abs(wt) - eta * pen.lambda);
        out[j] = wt < 0 ? -shrunk : shrunk;
      }
      break;
    case PenaltyKind::kElasticNet: {
      const double scale = 1.0 / (1.0 + eta * pen.lambda * pen.mu);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double wt = w[j] - eta * g[j];
        const double shrunk = std::max(0.0, std::abs(wt) - eta * pen.lambda);
        out[j] = scale * (wt < 0 ? -shrunk : shrunk);
      }
      break;
    }
  }
  return out;
}

}  // namespace hdpvfl
