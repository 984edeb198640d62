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

#include "rcd/mest/estimating_function.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "rcd/core/dist.hpp"
#include "rcd/core/error.hpp"
#include "rcd/mest/solve.hpp"

namespace rcd {

EstimatingFunction EstimatingFunction::huber(double c) {
  if (!(c > 0.0)) throw ArgumentError("huber tuning constant must be positive");
  EstimatingFunction ef;
  ef.kind = EfKind::huber;
  ef.c = c;
  return ef;
}

EstimatingFunction EstimatingFunction::median_sign() {
  EstimatingFunction ef;
  ef.kind = EfKind::median_sign;
  return ef;
}

EstimatingFunction EstimatingFunction::tsallis(double gamma) {
  if (!(gamma > 1.0)) throw ArgumentError("tsallis index gamma must exceed 1");
  EstimatingFunction ef;
  ef.kind = EfKind::tsallis;
  ef.gamma = gamma;
  return ef;
}

EstimatingFunction EstimatingFunction::with_known_sigma(double s) const {
  if (!(s > 0.0)) throw ArgumentError("known sigma must be positive");
  EstimatingFunction ef = *this;
  ef.known_sigma = true;
  ef.sigma = s;
  return ef;
}

std::string EstimatingFunction::name() const {
  std::string base;
  switch (kind) {
    case EfKind::ml_score: base = "ml_score"; break;
    case EfKind::huber: base = fmt::format("huber(c={})", c); break;
    case EfKind::median_sign: base = "median_sign"; break;
    case EfKind::tsallis: base = fmt::format("tsallis(gamma={})", gamma); break;
  }
  return known_sigma ? fmt::format("{}[sigma={}]", base, sigma) : base;
}

double huber_psi(double r, double c) noexcept { return r > c ? c : (r < -c ? -c : r); }

double huber_rho(double r, double c) noexcept {
  const double a = std::abs(r);
  return a <= c ? 0.5 * r * r : c * a - 0.5 * c * c;
}

double normal_power_integral(double sigma, double gamma) {
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * (1.0 - gamma)) / std::sqrt(gamma);
}

namespace {

struct Params {
  Eigen::VectorXd beta;
  double sigma;
};

Params split(const EstimatingFunction& ef, const Eigen::VectorXd& theta, Eigen::Index p) {
  if (theta.size() != ef.dim(p))
    throw ArgumentError(fmt::format("theta has length {}, expected {}", theta.size(), ef.dim(p)));
  Params out{theta.head(p), ef.known_sigma ? ef.sigma : 1.0};
  if (ef.has_scale()) out.sigma = theta(p);
  if (ef.has_scale() && !(out.sigma > 0.0)) throw NumericError("scale parameter must be positive");
  return out;
}

// f(y)^(gamma-1) for N(x'beta, sigma^2), from the standardized residual.
double tsallis_fpow(double r, double sigma, double gamma) {
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * (1.0 - gamma)) * std::exp(-0.5 * (gamma - 1.0) * r * r);
}

// Writes g for one observation into out (length dim).
void g_into(const EstimatingFunction& ef, double y, const Eigen::Ref<const Eigen::RowVectorXd>& x, const Params& par,
            double kappa, Eigen::Ref<Eigen::VectorXd> out) {
  const Eigen::Index p = x.size();
  const double e = y - x.dot(par.beta);
  const double s = par.sigma;
  const double r = e / s;
  switch (ef.kind) {
    case EfKind::ml_score:
      out.head(p) = (r / s) * x.transpose();
      if (ef.has_scale()) out(p) = (r * r - 1.0) / s;
      break;
    case EfKind::huber: {
      const double ps = huber_psi(r, ef.c);
      out.head(p) = ps * x.transpose();
      if (ef.has_scale()) out(p) = 0.5 * (ps * ps - kappa);
      break;
    }
    case EfKind::median_sign:
      out.head(p) = static_cast<double>((e > 0.0) - (e < 0.0)) * x.transpose();
      break;
    case EfKind::tsallis: {
      const double fp = tsallis_fpow(r, s, ef.gamma);
      out.head(p) = (ef.gamma * fp * r / s) * x.transpose();
      if (ef.has_scale())
        out(p) = ((ef.gamma - 1.0) * normal_power_integral(s, ef.gamma) + ef.gamma * fp * (r * r - 1.0)) / s;
      break;
    }
  }
}

double weight(const Eigen::VectorXd& w, Eigen::Index i) { return w.size() ? w(i) : 1.0; }

}  // namespace

Eigen::MatrixXd g_rows(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta) {
  const Params par = split(ef, theta, d.p());
  const double kappa = ef.kind == EfKind::huber ? dist::huber_kappa(ef.c) : 0.0;
  Eigen::MatrixXd G(d.n(), ef.dim(d.p()));
  Eigen::VectorXd row(G.cols());
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    g_into(ef, d.y(i), d.X.row(i), par, kappa, row);
    G.row(i) = row.transpose();
  }
  return G;
}

Eigen::VectorXd g_single(const EstimatingFunction& ef, double y, const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
  const Params par = split(ef, theta, x.size());
  const double kappa = ef.kind == EfKind::huber ? dist::huber_kappa(ef.c) : 0.0;
  Eigen::VectorXd out(ef.dim(x.size()));
  g_into(ef, y, x.transpose(), par, kappa, out);
  return out;
}

Eigen::VectorXd g_sum(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta, const Eigen::VectorXd& w) {
  const Params par = split(ef, theta, d.p());
  const double kappa = ef.kind == EfKind::huber ? dist::huber_kappa(ef.c) : 0.0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(ef.dim(d.p()));
  Eigen::VectorXd row(sum.size());
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    g_into(ef, d.y(i), d.X.row(i), par, kappa, row);
    sum += weight(w, i) * row;
  }
  return sum;
}

double objective(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta, const Eigen::VectorXd& w) {
  if (!ef.has_objective()) throw ArgumentError("ratio-type pivot unavailable: " + ef.name() + " has no objective");
  const Params par = split(ef, theta, d.p());
  const double s = par.sigma;
  const double kappa = ef.kind == EfKind::huber ? dist::huber_kappa(ef.c) : 0.0;
  const double integral = ef.kind == EfKind::tsallis ? normal_power_integral(s, ef.gamma) : 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double r = (d.y(i) - d.X.row(i).dot(par.beta)) / s;
    double Gi = 0.0;
    switch (ef.kind) {
      case EfKind::ml_score: Gi = std::log(s) + 0.5 * r * r; break;
      case EfKind::huber: Gi = s * huber_rho(r, ef.c) + 0.5 * kappa * s; break;
      case EfKind::tsallis: Gi = integral - ef.gamma / (ef.gamma - 1.0) * tsallis_fpow(r, s, ef.gamma); break;
      case EfKind::median_sign: break;
    }
    total += weight(w, i) * Gi;
  }
  return total;
}

Eigen::MatrixXd jacobian_sum(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& w) {
  const Eigen::Index p = d.p();
  const Eigen::Index k = ef.dim(p);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, k);
  switch (ef.kind) {
    case EfKind::median_sign:
      throw ArgumentError("sign score has no pointwise derivative; use godambe() for its sensitivity");
    case EfKind::tsallis: {
      Eigen::VectorXd t = theta;
      for (Eigen::Index j = 0; j < k; ++j) {
        const double h = 1e-5 * (1.0 + std::abs(theta(j)));
        t(j) = theta(j) + h;
        const Eigen::VectorXd up = g_sum(ef, d, t, w);
        t(j) = theta(j) - h;
        const Eigen::VectorXd dn = g_sum(ef, d, t, w);
        t(j) = theta(j);
        H.col(j) = (up - dn) / (2.0 * h);
      }
      return H;
    }
    default: break;
  }
  const Params par = split(ef, theta, p);
  const double s = par.sigma;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double wi = weight(w, i);
    const auto x = d.X.row(i);
    const double r = (d.y(i) - x.dot(par.beta)) / s;
    if (ef.kind == EfKind::ml_score) {
      H.topLeftCorner(p, p).noalias() -= (wi / (s * s)) * x.transpose() * x;
      if (ef.has_scale()) {
        H.block(0, p, p, 1) -= (wi * 2.0 * r / (s * s)) * x.transpose();
        H.block(p, 0, 1, p) -= (wi * 2.0 * r / (s * s)) * x;
        H(p, p) += wi * (1.0 - 3.0 * r * r) / (s * s);
      }
    } else {  // huber; kinks take the derivative of the inner branch
      const bool inner = std::abs(r) <= ef.c;
      if (!inner) continue;
      H.topLeftCorner(p, p).noalias() -= (wi / s) * x.transpose() * x;
      if (ef.has_scale()) {
        H.block(0, p, p, 1) -= (wi * r / s) * x.transpose();
        H.block(p, 0, 1, p) -= (wi * r / s) * x;
        H(p, p) -= wi * r * r / s;
      }
    }
  }
  return H;
}

Eigen::VectorXd tsallis_g(double gamma, const Eigen::VectorXd& theta, double y, const Eigen::VectorXd& x) {
  return g_single(EstimatingFunction::tsallis(gamma), y, x, theta);
}

}  // namespace rcd
