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

#include <memory>
#include <string>
#include <vector>

#include "rcd/cd/distribution.hpp"
#include "rcd/mest/solve.hpp"

namespace rcd {

enum class PivotKind {
  wald_classic,      // w_p, ML with observed information
  lrt_classic,       // W_p
  root_classic,      // r_p
  wald_robust,       // w_R
  score_robust,      // w_sR
  ratio_robust_adj,  // W_R / nu
  root_robust,       // r_R
};

enum class Reference { normal, chisq1 };

const char* to_string(PivotKind k);
PivotKind pivot_kind_from_string(const std::string& s);
Reference reference_of(PivotKind k) noexcept;
bool is_classic(PivotKind k) noexcept;
bool needs_objective(PivotKind k) noexcept;

struct GridOptions {
  std::size_t points = 401;
  double half_width_se = 8.0;  // grid spans psi~ +- this many standard errors
  double max_drop_fraction = 0.2;
};

/// A fitted estimating function on one dataset: the unconstrained root,
/// its Godambe estimates and the objective there. Pivots at any psi reuse
/// these; constrained roots are solved on demand.
class PivotModel {
 public:
  PivotModel(const EstimatingFunction& ef, const Dataset& d, const SolveOptions& opt = {});

  const EstimatingFunction& ef() const noexcept { return ef_; }
  const Dataset& data() const noexcept { return d_; }
  const Fit& fit() const noexcept { return fit_; }
  const GodambeEstimates& godambe() const noexcept { return ge_; }
  double psi_hat() const noexcept { return fit_.psi(); }
  double se() const { return ge_.se_psi(); }

  /// Pivot value at psi. Kinds whose name ends in _classic always use the ML
  /// score, whatever estimating function the model was built with.
  double value(PivotKind kind, double psi) const;

  /// Objective difference 2 (G(theta~_psi) - G(theta~)), clamped at zero.
  double ratio_statistic(double psi) const;
  /// (K^{psi psi} sum g_psi(theta~_psi))^2 / V_g^{psi psi}.
  double score_statistic(double psi) const;

  /// Constrained root at psi, optionally warm-started.
  Fit constrained(double psi, const Eigen::VectorXd* start = nullptr) const;
  /// Statistic on the chi-square scale (W_p, w_sR, W_R / nu) using a given
  /// constrained root.
  double chisq_statistic(PivotKind kind, const Fit& constrained_fit) const;

  /// The ML companion model used by the _classic kinds (this model when its
  /// estimating function already is the ML score).
  const PivotModel& classic() const;

 private:

  EstimatingFunction ef_;
  Dataset d_;
  SolveOptions opt_;
  Fit fit_;
  GodambeEstimates ge_;
  double g_hat_ = 0.0;
  std::shared_ptr<const PivotModel> ml_;  // classical companion; null when ef_ is the ML score
};

/// CD induced by a pivot. Wald kinds give a closed-form normal CD; root and
/// chi-square kinds are tabulated on a grid (with their confidence density
/// attached) and monotonized. Grid points whose constrained solve fails are
/// dropped; more than `max_drop_fraction` dropped raises NumericError.
ConfidenceDistribution cd_from_pivot(PivotKind kind, const PivotModel& model, const GridOptions& grid = {});
ConfidenceDistribution cd_from_pivot(PivotKind kind, const EstimatingFunction& ef, const Dataset& d,
                                     const GridOptions& grid = {});
/// Same, on a caller-supplied sorted psi grid.
ConfidenceDistribution cd_from_pivot_on(PivotKind kind, const PivotModel& model, const std::vector<double>& psi,
                                        double max_drop_fraction = 0.2);

ConfidenceDensity confidence_density_from_pivot(PivotKind kind, const PivotModel& model, const GridOptions& grid = {});

/// Exact classical CD from the t distribution: difference of group means
/// with pooled (default) or Welch variance for two-sample data, the mean for
/// one-sample data, OLS for regressions.
ConfidenceDistribution exact_t_cd(const Dataset& d, bool welch = false);

/// Tail-area influence of an observation (y, x) on C(psi): central difference
/// in epsilon of Phi(q(psi; F_eps)) with F_eps = (1 - eps) F_n + eps Delta_(y,x).
/// The standard error and nu are held at their F_n values.
double tail_area_influence(PivotKind kind, const EstimatingFunction& ef, const Dataset& d, double psi, double y,
                           const Eigen::VectorXd& x, double eps = 1e-4);

}  // namespace rcd
