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

#include "rcd/models/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <type_traits>

#include "rcd/core/error.hpp"

namespace rcd {

std::size_t contaminated_count(double fraction, std::size_t n) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ArgumentError("contamination fraction must lie in [0, 1)");
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

namespace {

// Fisher-Yates on a permutation, applied jointly to values and labels.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  return idx;
}

double cauchy_max(std::size_t n, Rng& rng) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, rng.cauchy());
  return m;
}

Dataset sample_one(const OneSampleModel& m, const ContaminationRecipe& c, Rng& rng) {
  if (m.n < 1 || m.sigma < 0.0) throw ArgumentError("one-sample model needs n >= 1 and sigma >= 0");
  std::vector<double> y(m.n);
  for (auto& v : y) v = m.theta + m.sigma * rng.normal();
  if (c.mechanism != ContaminationMechanism::none) {
    const std::size_t k = contaminated_count(c.fraction, m.n);
    if (c.mechanism == ContaminationMechanism::cauchy_extreme) {
      const double shared = k > 0 ? cauchy_max(m.n, rng) : 0.0;
      for (std::size_t j = m.n - k; j < m.n; ++j) y[j] = c.independent_extremes ? cauchy_max(m.n, rng) : shared;
    } else if (c.mechanism == ContaminationMechanism::cauchy) {
      for (std::size_t j = m.n - k; j < m.n; ++j) y[j] = rng.cauchy(c.scale);
    } else {
      for (std::size_t j = m.n - k; j < m.n; ++j) y[j] = m.theta + c.direction * std::abs(c.scale * rng.cauchy());
    }
    const auto perm = permutation(m.n, rng);
    std::vector<double> shuffled(m.n);
    for (std::size_t i = 0; i < m.n; ++i) shuffled[i] = y[perm[i]];
    y.swap(shuffled);
  }
  return make_one_sample(Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
}

Dataset sample_two(const TwoSampleModel& m, const ContaminationRecipe& c, Rng& rng) {
  if (m.n_per_group < 2 || m.sigma < 0.0) throw ArgumentError("two-sample model needs n_per_group >= 2 and sigma >= 0");
  const std::size_t g = m.n_per_group;
  std::vector<double> us(g), un(g);
  for (auto& v : us) v = rng.normal();
  for (auto& v : un) v = rng.normal();
  std::vector<double> ys(g), yn(g);
  for (std::size_t i = 0; i < g; ++i) {
    ys[i] = m.mu_N + m.psi + m.sigma * us[i];
    yn[i] = m.mu_N + m.sigma * un[i];
  }
  const bool contaminate = c.mechanism != ContaminationMechanism::none;
  if (contaminate) {
    const std::size_t k = contaminated_count(c.fraction, g);
    if (c.mechanism == ContaminationMechanism::half_cauchy_new_group) {
      // The error term itself is replaced, so sigma does not rescale it.
      for (std::size_t j = g - k; j < g; ++j) yn[j] = m.mu_N + c.direction * std::abs(c.scale * rng.cauchy());
    } else if (c.mechanism == ContaminationMechanism::cauchy) {
      for (std::size_t j = g - k; j < g; ++j) yn[j] = rng.cauchy(c.scale);
    } else {
      const double shared = k > 0 ? cauchy_max(g, rng) : 0.0;
      for (std::size_t j = g - k; j < g; ++j) yn[j] = c.independent_extremes ? cauchy_max(g, rng) : shared;
    }
  }
  std::vector<double> y;
  std::vector<int> label;
  y.reserve(2 * g);
  label.reserve(2 * g);
  for (double v : ys) y.push_back(v), label.push_back(1);
  for (double v : yn) y.push_back(v), label.push_back(0);
  if (contaminate) {
    const auto perm = permutation(y.size(), rng);
    std::vector<double> y2(y.size());
    std::vector<int> l2(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[perm[i]], l2[i] = label[perm[i]];
    y.swap(y2);
    label.swap(l2);
  }
  return make_two_sample(Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())), label);
}

Dataset sample_regression(const RegressionModel& m, const ContaminationRecipe& c, Rng& rng) {
  if (m.sigma < 0.0) throw ArgumentError("regression model needs sigma >= 0");
  const auto n = m.baseline.size();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = m.beta0 + m.beta1 * m.baseline(i) + m.beta2 * m.p[static_cast<std::size_t>(i)] + m.sigma * rng.normal();
  if (c.mechanism == ContaminationMechanism::half_cauchy_new_group) {
    // Contaminate the last k subjects of the P = 0 arm.
    std::vector<Eigen::Index> arm;
    for (Eigen::Index i = 0; i < n; ++i)
      if (m.p[static_cast<std::size_t>(i)] == 0) arm.push_back(i);
    const std::size_t k = contaminated_count(c.fraction, arm.size());
    for (std::size_t j = arm.size() - k; j < arm.size(); ++j) {
      const Eigen::Index i = arm[j];
      y(i) = m.beta0 + m.beta1 * m.baseline(i) + c.direction * std::abs(c.scale * rng.cauchy());
    }
  } else if (c.mechanism == ContaminationMechanism::cauchy_extreme || c.mechanism == ContaminationMechanism::cauchy) {
    throw ArgumentError("Cauchy replacement contamination is defined for location samples only");
  }
  return make_regression(y, m.baseline, m.p);
}

}  // namespace

Dataset sample(const DatasetSpec& spec) {
  Rng rng(derive_seed(spec.seed, {0x5a17}));
  return std::visit(
      [&](const auto& m) -> Dataset {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OneSampleModel>) return sample_one(m, spec.contamination, rng);
        else if constexpr (std::is_same_v<M, TwoSampleModel>) return sample_two(m, spec.contamination, rng);
        else return sample_regression(m, spec.contamination, rng);
      },
      spec.model);
}

Eigen::VectorXd simulate_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, double sigma, Rng& rng) {
  Eigen::VectorXd y = X * beta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * rng.normal();
  return y;
}

}  // namespace rcd
