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

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rcd/core/rng.hpp"
#include "rcd/models/dataset.hpp"

namespace rcd {

struct OneSampleModel {
  double theta = 1.0;
  double sigma = 1.0;
  std::size_t n = 100;
};

struct TwoSampleModel {
  double mu_N = 120.0;
  double psi = 2.6;  // mu_S - mu_N
  double sigma = 4.0;
  std::size_t n_per_group = 20;
};

/// Follow-up = beta0 + beta1 * baseline + beta2 * P + sigma u on a fixed
/// covariate design.
struct RegressionModel {
  double beta0 = 0.0, beta1 = 1.0, beta2 = 0.0;
  double sigma = 1.0;
  Eigen::VectorXd baseline;
  std::vector<int> p;
};

enum class ContaminationMechanism {
  none,
  half_cauchy_new_group,  // new-group errors replaced by direction * |scale * Cauchy|
  cauchy_extreme,         // observations replaced by the largest draw of an n-size Cauchy sample
  cauchy,                 // observations replaced by scale * standard Cauchy draws (location samples)
};

struct ContaminationRecipe {
  double fraction = 0.0;
  ContaminationMechanism mechanism = ContaminationMechanism::none;
  double scale = 10.0;
  double direction = -1.0;
  /// cauchy_extreme only: k independent maxima instead of one copied k times.
  bool independent_extremes = false;
};

struct DatasetSpec {
  std::variant<OneSampleModel, TwoSampleModel, RegressionModel> model;
  ContaminationRecipe contamination;
  std::uint64_t seed = 0;
};

/// Deterministic count of contaminated observations: floor(fraction * n + 0.5).
std::size_t contaminated_count(double fraction, std::size_t n);

/// Draw a dataset; a pure function of the spec.
Dataset sample(const DatasetSpec& spec);

/// Responses X beta + sigma z for standard normal z on a fixed design.
Eigen::VectorXd simulate_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, double sigma, Rng& rng);

}  // namespace rcd
