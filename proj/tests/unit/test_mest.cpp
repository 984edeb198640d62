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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "rcd/core/error.hpp"
#include "rcd/core/rng.hpp"
#include "rcd/mest/estimating_function.hpp"
#include "rcd/mest/solve.hpp"
#include "rcd/models/sampler.hpp"

namespace rcd {
namespace {

Dataset one_sample(std::initializer_list<double> v) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) y(i++) = x;
  return make_one_sample(y);
}

Dataset normal_sample(std::size_t n, double mu, double sigma, std::uint64_t seed) {
  DatasetSpec s;
  s.model = OneSampleModel{mu, sigma, n};
  s.seed = seed;
  return sample(s);
}

Dataset two_sample(std::size_t m, double psi, double sigma, double frac, std::uint64_t seed) {
  DatasetSpec s;
  TwoSampleModel tm;
  tm.psi = psi;
  tm.sigma = sigma;
  tm.n_per_group = m;
  s.model = tm;
  if (frac > 0) s.contamination = {frac, ContaminationMechanism::half_cauchy_new_group};
  s.seed = seed;
  return sample(s);
}

// Bisection oracle for sum psi_c(y_i - mu) = 0 (sigma = 1).
double huber_location_oracle(const std::vector<double>& y, double c) {
  double lo = -100, hi = 100;
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    double s = 0;
    for (double v : y) s += std::clamp(v - mid, -c, c);
    (s > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Solve, HuberLocationOracle) {
  const auto ef = EstimatingFunction::huber(1.345).with_known_sigma(1.0);
  const Fit f = solve(ef, one_sample({-1, 0, 10}));
  EXPECT_NEAR(f.psi(), huber_location_oracle({-1, 0, 10}, 1.345), 1e-9);
  EXPECT_NEAR(f.psi(), 0.1725, 1e-6);
  EXPECT_LE(f.residual_norm, 3e-8);
}

TEST(Solve, MedianAndSymmetry) {
  EXPECT_DOUBLE_EQ(solve(EstimatingFunction::median_sign(), one_sample({1, 2, 5})).psi(), 2.0);
  EXPECT_DOUBLE_EQ(solve(EstimatingFunction::median_sign(), one_sample({1, 2, 5, 7})).psi(), 3.5);
  EXPECT_NEAR(solve(EstimatingFunction::ml_score().with_known_sigma(1.0), one_sample({-3.2, 3.2})).psi(), 0.0, 1e-15);
  EXPECT_NEAR(solve(EstimatingFunction::ml_score(), one_sample({-3.2, 0.0, 3.2})).psi(), 0.0, 1e-15);
  // Fewer than dim(theta) + 1 observations is refused.
  EXPECT_THROW(solve(EstimatingFunction::ml_score(), one_sample({-3.2, 3.2})), NumericError);
}

TEST(Solve, ToleranceMetOnEveryKind) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.1, 4);
  for (const auto& ef : {EstimatingFunction::ml_score(), EstimatingFunction::huber(), EstimatingFunction::tsallis(1.2),
                         EstimatingFunction::huber().with_known_sigma(4.0)}) {
    const Fit f = solve(ef, d);
    EXPECT_LE(f.residual_norm, 1e-8 * static_cast<double>(d.n())) << ef.name();
    EXPECT_LE(g_sum(ef, d, f.theta).norm(), 1e-8 * static_cast<double>(d.n())) << ef.name();
  }
}

TEST(Solve, TwoSampleMedianIsGroupMedianDifference) {
  Eigen::VectorXd y(6);
  y << 5, 7, 9, 1, 2, 10;
  const Dataset d = make_two_sample(y, {1, 1, 1, 0, 0, 0});
  const Fit f = solve(EstimatingFunction::median_sign(), d);
  EXPECT_DOUBLE_EQ(f.theta(0), 5.0);
  EXPECT_DOUBLE_EQ(f.theta(1), 2.0);
}

TEST(SolveConstrained, InactiveConstraint) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.1, 8);
  for (const auto& ef : {EstimatingFunction::ml_score(), EstimatingFunction::huber(), EstimatingFunction::tsallis(1.3)}) {
    const Fit full = solve(ef, d);
    const Fit con = solve_constrained(ef, d, full.psi());
    EXPECT_LE((con.theta - full.theta).norm(), 1e-6 * (1.0 + full.theta.norm())) << ef.name();
  }
}

TEST(SolveConstrained, PooledMeanOracle) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.0, 10);
  const Fit f = solve_constrained(EstimatingFunction::ml_score(), d, 0.0);
  const double mean = d.y.mean();
  const double var = (d.y.array() - mean).square().mean();
  EXPECT_DOUBLE_EQ(f.theta(0), 0.0);
  EXPECT_NEAR(f.theta(1), mean, 1e-10);
  EXPECT_NEAR(f.theta(2), std::sqrt(var), 1e-10);
}

TEST(SolveConstrained, ZeroSpreadErrors) {
  const Dataset d = one_sample({2, 2, 2, 2});
  EXPECT_THROW(solve_constrained(EstimatingFunction::ml_score(), d, 1.0), NumericError);
  EXPECT_THROW(solve(EstimatingFunction::huber(), d), NumericError);
}

TEST(Solve, NonConvergenceReportsLastIterate) {
  SolveOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-300;
  const Dataset d = two_sample(20, 2.6, 4.0, 0.1, 2);
  try {
    solve(EstimatingFunction::huber(), d, opt);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 3);
    EXPECT_GT(e.residual_norm(), 0.0);
  }
}

TEST(Godambe, MlKnownSigmaFisher) {
  const auto ef = EstimatingFunction::ml_score().with_known_sigma(1.0);
  for (std::size_t n : {100u, 10000u}) {
    const Dataset d = normal_sample(n, 0.5, 1.0, 21);
    const Fit f = solve(ef, d);
    const auto ge = godambe(ef, d, f.theta);
    EXPECT_NEAR(ge.K(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(ge.var_psi * static_cast<double>(n), 1.0, n == 100 ? 0.3 : 0.05);
  }
}

TEST(Godambe, HuberLargeCIsMl) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.0, 13);
  const auto ml = godambe(EstimatingFunction::ml_score(), d, solve(EstimatingFunction::ml_score(), d).theta);
  const auto hf = solve(EstimatingFunction::huber(1e6), d);
  const auto hb = godambe(EstimatingFunction::huber(1e6), d, hf.theta);
  EXPECT_NEAR(hf.psi(), solve(EstimatingFunction::ml_score(), d).psi(), 1e-9);
  EXPECT_NEAR(hb.var_psi, ml.var_psi, 1e-6 * ml.var_psi);
}

TEST(Godambe, InformationIdentityUnderModel) {
  const Dataset d = normal_sample(10000, 1.0, 2.0, 99);
  const auto ef = EstimatingFunction::ml_score();
  const auto ge = godambe(ef, d, solve(ef, d).theta);
  EXPECT_LE((ge.K - ge.J).norm() / ge.K.norm(), 0.05);
  EXPECT_NEAR(ge.nu(), 1.0, 0.05);
  // J is symmetric positive semidefinite; Vg inverts V.
  EXPECT_LE((ge.J - ge.J.transpose()).norm(), 1e-14);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ge.J).eigenvalues().minCoeff(), 0.0);
  EXPECT_LE((ge.Vg * ge.V - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-9);
}

TEST(Godambe, MedianSensitivityIsKernelBased) {
  const Dataset d = normal_sample(2000, 0.0, 1.0, 5);
  const auto ef = EstimatingFunction::median_sign();
  const auto ge = godambe(ef, d, solve(ef, d).theta);
  // Asymptotic variance of the median: pi/2 sigma^2 / n.
  EXPECT_NEAR(ge.var_psi * 2000, std::numbers::pi / 2, 0.25);
}

TEST(Influence, MlIsResidual) {
  const Dataset d = normal_sample(50, 3.0, 2.0, 31);
  const auto ef = EstimatingFunction::ml_score();
  const Fit f = solve(ef, d);
  const auto ge = godambe(ef, d, f.theta);
  for (double y : {-100.0, 0.0, 3.0, 17.5}) {
    EXPECT_NEAR(influence_function(ef, ge, y, Eigen::VectorXd::Ones(1), f.theta)(0), y - f.psi(), 1e-9);
  }
}

TEST(Influence, HuberBoundedAndZeroAtCentre) {
  const auto ef = EstimatingFunction::huber().with_known_sigma(1.0);
  const Dataset d = normal_sample(60, 0.0, 1.0, 8);
  const Fit f = solve(ef, d);
  const auto ge = godambe(ef, d, f.theta);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
  const double bound = std::abs(1.0 / ge.K(0, 0)) * ef.c;
  EXPECT_NEAR(std::abs(influence_function(ef, ge, 1e6, x, f.theta)(0)), bound, 1e-12);
  EXPECT_NEAR(std::abs(influence_function(ef, ge, -1e6, x, f.theta)(0)), bound, 1e-12);
  EXPECT_NEAR(influence_function(ef, ge, f.psi(), x, f.theta)(0), 0.0, 1e-15);
}

TEST(Jacobian, AnalyticMatchesFiniteDifferences) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.1, 17);
  Rng rng(1);
  for (const auto& ef : {EstimatingFunction::ml_score(), EstimatingFunction::huber()}) {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd t(3);
      t << rng.uniform(0, 5), rng.uniform(115, 125), rng.uniform(2, 6);
      const Eigen::MatrixXd H = jacobian_sum(ef, d, t);
      Eigen::MatrixXd F(3, 3);
      for (int j = 0; j < 3; ++j) {
        const double h = 1e-6 * (1 + std::abs(t(j)));
        Eigen::VectorXd a = t, b = t;
        a(j) += h;
        b(j) -= h;
        F.col(j) = (g_sum(ef, d, a) - g_sum(ef, d, b)) / (2 * h);
      }
      EXPECT_LE((H - F).norm(), 1e-5 * (1.0 + H.norm())) << ef.name();
    }
  }
}

TEST(Properties, HuberShiftEquivariance) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.1, 23);
  const Fit base = solve(EstimatingFunction::huber(), make_one_sample(d.y));
  for (double a : {-50.0, 0.3, 1000.0}) {
    const Fit moved = solve(EstimatingFunction::huber(), make_one_sample((d.y.array() + a).matrix()));
    EXPECT_NEAR(moved.psi(), base.psi() + a, 1e-7 * (1 + std::abs(a)));
    EXPECT_NEAR(moved.sigma(), base.sigma(), 1e-7);
  }
}

TEST(Properties, BRobustness) {
  const Dataset d = normal_sample(200, 0.0, 1.0, 41);
  auto with_point = [&](double y) {
    Eigen::VectorXd v(d.n() + 1);
    v << d.y, y;
    return make_one_sample(v);
  };
  const auto hub = EstimatingFunction::huber().with_known_sigma(1.0);
  const Fit h0 = solve(hub, d);
  const auto ge = godambe(hub, d, h0.theta);
  const double if_bound = hub.c / ge.K(0, 0);
  const double n = static_cast<double>(d.n());
  for (double y : {1e6, -1e6}) {
    const double shift = std::abs(solve(hub, with_point(y)).psi() - h0.psi());
    EXPECT_LE(shift, if_bound / n * 1.1);
  }
  const auto ml = EstimatingFunction::ml_score();
  const double m0 = solve(ml, d).psi();
  const double s3 = std::abs(solve(ml, with_point(1e3)).psi() - m0);
  const double s6 = std::abs(solve(ml, with_point(1e6)).psi() - m0);
  EXPECT_GT(s6, 100 * s3);
  EXPECT_GT(s6, 1000.0);
}

TEST(Properties, UnbiasedAtTruth) {
  // Mean of g over 1e5 model draws at the true theta is within 3 standard errors of 0.
  const Dataset d = normal_sample(100000, 2.0, 1.5, 55);
  Eigen::VectorXd truth(2);
  truth << 2.0, 1.5;
  for (const auto& ef : {EstimatingFunction::ml_score(), EstimatingFunction::huber(), EstimatingFunction::tsallis(1.5)}) {
    const Eigen::MatrixXd G = g_rows(ef, d, truth);
    const Eigen::RowVectorXd m = G.colwise().mean();
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      const double sd = std::sqrt((G.col(j).array() - m(j)).square().sum() / (G.rows() - 1));
      EXPECT_LE(std::abs(m(j)), 3.0 * sd / std::sqrt(static_cast<double>(G.rows()))) << ef.name() << " component " << j;
    }
  }
}

TEST(Properties, LargeSampleConsistency) {
  const auto ef = EstimatingFunction::huber();
  int inside = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const Dataset d = normal_sample(10000, 1.0, 2.0, 1000 + static_cast<std::uint64_t>(r));
    const Fit f = solve(ef, d);
    const auto ge = godambe(ef, d, f.theta);
    inside += std::abs(f.psi() - 1.0) <= 4.0 * ge.se_psi();
  }
  EXPECT_GE(inside, 198);
}

TEST(Tsallis, PowerIntegralMatchesQuadrature) {
  for (double sigma : {0.5, 1.0, 3.0}) {
    for (double gamma : {1.1, 1.5, 2.0}) {
      // Composite Simpson over +-12 sigma.
      const int m = 20000;
      const double a = -12 * sigma, b = 12 * sigma, h = (b - a) / m;
      auto f = [&](double y) { return std::pow(std::exp(-0.5 * y * y / (sigma * sigma)) / (std::sqrt(2 * std::numbers::pi) * sigma), gamma); };
      double s = f(a) + f(b);
      for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
      EXPECT_NEAR(normal_power_integral(sigma, gamma), s * h / 3, 1e-10);
    }
  }
}

TEST(Tsallis, TendsToMlScore) {
  Eigen::VectorXd theta(2);
  theta << 0.4, 1.3;
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
  for (double y : {-2.0, 0.1, 3.5}) {
    const Eigen::VectorXd t = tsallis_g(1.001, theta, y, x);
    const Eigen::VectorXd m = g_single(EstimatingFunction::ml_score(), y, x, theta);
    EXPECT_LE((t - m).norm(), 1e-2 * (1 + m.norm()));
    EXPECT_GT(t.dot(m), 0.0);
  }
  EXPECT_THROW(tsallis_g(1.0, theta, 0.0, x), ArgumentError);
}

TEST(Tsallis, GradientOfObjective) {
  // g is minus the gradient of G, checked by differencing the objective.
  const Dataset d = normal_sample(30, 0.0, 1.0, 3);
  const auto ef = EstimatingFunction::tsallis(1.4);
  Eigen::VectorXd t(2);
  t << 0.2, 0.9;
  const Eigen::VectorXd g = g_sum(ef, d, t);
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd a = t, b = t;
    a(j) += 1e-6;
    b(j) -= 1e-6;
    EXPECT_NEAR(-(objective(ef, d, a) - objective(ef, d, b)) / 2e-6, g(j), 1e-5 * (1 + std::abs(g(j))));
  }
}

TEST(Objective, GradientMatchesScore) {
  const Dataset d = two_sample(20, 2.6, 4.0, 0.1, 71);
  Eigen::VectorXd t(3);
  t << 2.0, 119.0, 3.5;
  for (const auto& ef : {EstimatingFunction::ml_score(), EstimatingFunction::huber()}) {
    const Eigen::VectorXd g = g_sum(ef, d, t);
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd a = t, b = t;
      a(j) += 1e-6;
      b(j) -= 1e-6;
      EXPECT_NEAR(-(objective(ef, d, a) - objective(ef, d, b)) / 2e-6, g(j), 1e-5 * (1 + std::abs(g(j)))) << ef.name();
    }
  }
  EXPECT_THROW(objective(EstimatingFunction::median_sign(), d, t.head(2)), ArgumentError);
}

}  // namespace
}  // namespace rcd
