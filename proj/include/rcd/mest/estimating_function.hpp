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

#include <string>

#include "rcd/models/dataset.hpp"

namespace rcd {

enum class EfKind { ml_score, huber, median_sign, tsallis };

/// Estimating function for the normal linear model y = X beta + sigma u.
///
/// theta = (beta_0 .. beta_{p-1}, sigma), with beta_0 the interest parameter.
/// The sigma component is dropped when sigma is known and for median_sign,
/// whose sign score carries no scale equation.
///
/// g is oriented as a score (minus the gradient of the objective G), so the
/// sensitivity K = -E[dg/dtheta] is positive definite.
///
///   ml_score:    G = log sigma + r^2/2
///   huber:       G = sigma rho_c(r) + kappa sigma / 2      (Proposal 2 scale)
///   median_sign: g = sign(r) x, no objective
///   tsallis:     G = [(gamma-1) int f^gamma - gamma f^(gamma-1)] / (gamma-1)
/// with r = (y - x'beta)/sigma. The tsallis score is divided by (gamma - 1)
/// so that it tends to the ML score as gamma -> 1.
struct EstimatingFunction {
  EfKind kind = EfKind::ml_score;
  double c = 1.345;     // huber tuning constant
  double gamma = 1.5;   // tsallis index, > 1
  bool known_sigma = false;
  double sigma = 1.0;   // used when known_sigma

  static EstimatingFunction ml_score() { return {}; }
  static EstimatingFunction huber(double c = 1.345);
  static EstimatingFunction median_sign();
  static EstimatingFunction tsallis(double gamma);

  EstimatingFunction with_known_sigma(double s) const;

  bool has_objective() const noexcept { return kind != EfKind::median_sign; }
  bool has_scale() const noexcept { return kind != EfKind::median_sign && !known_sigma; }
  /// Dimension of theta for a design with p columns.
  Eigen::Index dim(Eigen::Index p) const noexcept { return p + (has_scale() ? 1 : 0); }
  /// sup |g_beta| / |x| is finite.
  bool bounded() const noexcept { return kind == EfKind::huber || kind == EfKind::median_sign; }

  std::string name() const;
};

/// Huber psi_c and its a.e. derivative.
double huber_psi(double r, double c) noexcept;
double huber_rho(double r, double c) noexcept;

// Per-observation quantities. `theta` has length ef.dim(d.p()). Optional
// weights w (length n) turn every sum into a weighted sum.

/// n x dim matrix whose rows are g(y_i; theta).
Eigen::MatrixXd g_rows(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta);
/// g for a single observation with design row x.
Eigen::VectorXd g_single(const EstimatingFunction& ef, double y, const Eigen::VectorXd& x, const Eigen::VectorXd& theta);
Eigen::VectorXd g_sum(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta,
                      const Eigen::VectorXd& w = {});
/// Weighted sum of G(y_i; theta). Throws for median_sign.
double objective(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta, const Eigen::VectorXd& w = {});
/// Weighted sum of dg_i/dtheta (analytic for ml_score and huber, central
/// differences for tsallis). Not defined for median_sign.
Eigen::MatrixXd jacobian_sum(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& w = {});

}  // namespace rcd
