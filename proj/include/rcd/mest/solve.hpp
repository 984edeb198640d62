// Copyright 2026 The rcd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <optional>

#include "rcd/mest/estimating_function.hpp"

namespace rcd {

struct ParameterPoint {
  double psi = 0.0;
  Eigen::VectorXd lambda;

  static ParameterPoint from_theta(const Eigen::VectorXd& theta);
  Eigen::VectorXd theta() const;
};

struct SolveOptions {
  int max_iter = 200;
  double tol = 1e-8;  // on ||sum g|| / n
  Eigen::VectorXd weights;  // optional observation weights
  /// Starting point; solvers pick their own when absent.
  std::optional<Eigen::VectorXd> start;
};

struct Fit {
  Eigen::VectorXd theta;
  int iterations = 0;
  double residual_norm = 0.0;  // ||sum g(theta)||

  double psi() const { return theta(0); }
  double sigma() const { return theta(theta.size() - 1); }
};

/// Root of sum g = 0. Throws ConvergenceError (with the last iterate) when
/// the iteration budget runs out, NumericError on degenerate data.
Fit solve(const EstimatingFunction& ef, const Dataset& d, const SolveOptions& opt = {});

/// Root of the nuisance block with psi held fixed; theta(0) == psi_fixed.
Fit solve_constrained(const EstimatingFunction& ef, const Dataset& d, double psi_fixed, const SolveOptions& opt = {});

/// Sensitivity, variability and Godambe quantities at theta.
struct GodambeEstimates {
  Eigen::MatrixXd K;   // -(1/n) sum dg/dtheta
  Eigen::MatrixXd J;   // (1/n) sum g g'
  Eigen::MatrixXd V;   // K^-1 J K^-T, asymptotic covariance of sqrt(n)(theta~ - theta)
  Eigen::MatrixXd Vg;  // Godambe information V^-1
  double n = 0.0;      // effective sample size (sum of weights)
  double var_psi = 0.0;  // V_g^{psi psi}: variance of psi~, V(0,0)/n
  double k_psi = 0.0;    // K^{psi psi}: [K^-1](0,0)/n

  double se_psi() const;
  /// nu = V_g^{psi psi} / K^{psi psi}.
  double nu() const { return var_psi / k_psi; }
};

GodambeEstimates godambe(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& w = {});

/// IF(y; theta) = K^-1 g(y; theta) for an observation with design row x.
Eigen::VectorXd influence_function(const EstimatingFunction& ef, const GodambeEstimates& ge, double y,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& theta);

/// Closed-form power integral of the normal density: int f^gamma dy.
double normal_power_integral(double sigma, double gamma);

/// Tsallis score of one observation (public entry used by tests).
Eigen::VectorXd tsallis_g(double gamma, const Eigen::VectorXd& theta, double y, const Eigen::VectorXd& x);

}  // namespace rcd
