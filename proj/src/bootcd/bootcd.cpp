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

#include "rcd/bootcd/bootcd.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "rcd/core/error.hpp"
#include "rcd/core/parallel.hpp"
#include "rcd/core/rng.hpp"
#include "rcd/core/stats.hpp"
#include "rcd/mest/solve.hpp"

namespace rcd {

const char* to_string(BootVariant v) {
  switch (v) {
    case BootVariant::basic: return "basic";
    case BootVariant::normal: return "normal";
    case BootVariant::percentile: return "percentile";
    case BootVariant::t_boot: return "t_boot";
  }
  return "?";
}

BootVariant boot_variant_from_string(const std::string& s) {
  for (BootVariant v : {BootVariant::basic, BootVariant::normal, BootVariant::percentile, BootVariant::t_boot})
    if (s == to_string(v)) return v;
  throw ConfigError(fmt::format("unknown bootstrap variant '{}'", s));
}

Transform Transform::log() {
  Transform t;
  t.name = "log";
  t.h = [](double x) { return std::log(x); };
  t.h_inv = [](double v) { return std::exp(v); };
  return t;
}

double Transform::invert(double v) const {
  if (!h) return v;
  if (h_inv) return h_inv(v);
  // Walk outward from a point where h is finite until h brackets v; steps
  // that leave the domain of h are halved.
  const double a = std::isfinite(h(0.0)) ? 0.0 : 1.0;
  auto walk = [&](double dir, auto done) {
    double x = a, step = 1.0;
    for (int i = 0; i < 400 && !done(h(x)); ++i) {
      const double cand = x + dir * step;
      if (!std::isfinite(h(cand))) {
        step *= 0.5;
        continue;
      }
      x = cand;
      step *= 2.0;
    }
    return x;
  };
  const double lo = walk(-1.0, [&](double hv) { return hv <= v; });
  const double hi = walk(1.0, [&](double hv) { return hv >= v; });
  if (!(h(lo) <= v && h(hi) >= v)) throw NumericError(fmt::format("cannot invert transform '{}' at {}", name, v));
  auto f = [&](double x) { return h(x) - v; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::bisect(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

namespace {

// Standard error of psi~: observed information for the ML score, sandwich
// otherwise.
double standard_error(const EstimatingFunction& ef, const Dataset& d, const Fit& fit) {
  const GodambeEstimates ge = godambe(ef, d, fit.theta);
  return ef.kind == EfKind::ml_score ? std::sqrt(ge.k_psi) : ge.se_psi();
}

double derivative(const Transform& t, double x) {
  if (!t.h) return 1.0;
  const double step = 1e-6 * (1.0 + std::abs(x));
  return (t.apply(x + step) - t.apply(x - step)) / (2.0 * step);
}

}  // namespace

BootReplicates boot_replicates(const BootstrapConfig& cfg, const Dataset& d) {
  if (cfg.B < 100) throw ConfigError(fmt::format("bootstrap needs B >= 100, got {}", cfg.B));
  const bool need_se = cfg.variant == BootVariant::t_boot;

  BootReplicates reps;
  reps.B = cfg.B;
  const Fit fit = solve(cfg.estimator, d);
  reps.psi_hat = fit.psi();
  const double h_hat = cfg.transform.apply(reps.psi_hat);
  if (need_se) reps.tau_hat = std::abs(derivative(cfg.transform, reps.psi_hat)) * standard_error(cfg.estimator, d, fit);

  // Generator: the ML fit of the normal linear model.
  const Fit ml = solve(EstimatingFunction::ml_score(), d);
  const Eigen::VectorXd mu = d.X * ml.theta.head(d.p());
  const double sigma = ml.sigma();

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> est(cfg.B, nan), q(cfg.B, nan);
  parallel_for(cfg.B, cfg.workers, [&](std::size_t b) {
    Rng rng(derive_seed(cfg.seed, {0xb007, b}));
    Eigen::VectorXd y = mu;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * rng.normal();
    try {
      const Dataset star = with_response(d, std::move(y));
      const Fit f = solve(cfg.estimator, star);
      double qb = 0.0;
      if (need_se) {
        const double tau = std::abs(derivative(cfg.transform, f.psi())) * standard_error(cfg.estimator, star, f);
        if (!(tau > 0.0) || !std::isfinite(tau)) return;
        qb = (h_hat - cfg.transform.apply(f.psi())) / tau;
      }
      if (!std::isfinite(f.psi()) || !std::isfinite(qb)) return;
      est[b] = f.psi();
      q[b] = qb;
    } catch (const Error&) {
      // dropped
    }
  });
  for (std::size_t b = 0; b < cfg.B; ++b) {
    if (std::isnan(est[b])) {
      ++reps.dropped;
      continue;
    }
    reps.estimates.push_back(est[b]);
    if (need_se) reps.q.push_back(q[b]);
  }
  if (static_cast<double>(reps.dropped) > cfg.max_drop_fraction * static_cast<double>(cfg.B))
    throw NumericError(fmt::format("{} of {} bootstrap replicates failed", reps.dropped, cfg.B));
  return reps;
}

ConfidenceDistribution boot_cd_from(const BootReplicates& reps, BootVariant variant, const Transform& transform) {
  if (reps.estimates.size() < 2) throw NumericError("too few bootstrap replicates");
  switch (variant) {
    case BootVariant::percentile: return ConfidenceDistribution::empirical(reps.estimates, true);
    case BootVariant::basic: {
      std::vector<double> s;
      s.reserve(reps.estimates.size());
      for (double e : reps.estimates) s.push_back(2.0 * reps.psi_hat - e);
      return ConfidenceDistribution::empirical(std::move(s), true);
    }
    case BootVariant::normal: {
      const double sd = stats::sd(reps.estimates);
      if (!(sd > 0.0)) throw NumericError("bootstrap estimates have zero spread");
      return ConfidenceDistribution::normal(reps.psi_hat, sd);
    }
    case BootVariant::t_boot: {
      if (reps.q.size() != reps.estimates.size()) throw ArgumentError("replicates were drawn without standard errors");
      // C(psi) = Q((h(psi) - h(psi^)) / tau^) is the law of
      // h^-1(h(psi^) + tau^ q*).
      const double h_hat = transform.apply(reps.psi_hat);
      std::vector<double> s;
      s.reserve(reps.q.size());
      for (double qb : reps.q) s.push_back(transform.invert(h_hat + reps.tau_hat * qb));
      return ConfidenceDistribution::empirical(std::move(s), true);
    }
  }
  throw ArgumentError("unknown bootstrap variant");
}

ConfidenceDistribution boot_cd(const BootstrapConfig& cfg, const Dataset& d) {
  return boot_cd_from(boot_replicates(cfg, d), cfg.variant, cfg.transform);
}

}  // namespace rcd
