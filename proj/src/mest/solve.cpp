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

#include "rcd/mest/solve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rcd/core/dist.hpp"
#include "rcd/core/error.hpp"
#include "rcd/core/stats.hpp"

namespace rcd {

ParameterPoint ParameterPoint::from_theta(const Eigen::VectorXd& theta) {
  return {theta(0), theta.tail(theta.size() - 1)};
}

Eigen::VectorXd ParameterPoint::theta() const {
  Eigen::VectorXd t(lambda.size() + 1);
  t << psi, lambda;
  return t;
}

double GodambeEstimates::se_psi() const { return std::sqrt(var_psi); }

namespace {

// The problem after optionally pinning beta_0: responses y - offset on the
// free design columns.
struct Reduced {
  const Dataset& d;
  const EstimatingFunction& ef;
  bool pinned;
  double psi;
  Eigen::VectorXd yo;  // y - X_0 psi when pinned
  Eigen::MatrixXd Xf;  // free columns
  Eigen::VectorXd w;   // observation weights (ones when none given)
  double wsum;

  Reduced(const EstimatingFunction& e, const Dataset& data, bool pin, double psi_fixed, const Eigen::VectorXd& weights)
      : d(data), ef(e), pinned(pin), psi(psi_fixed) {
    const Eigen::Index p = d.p();
    if (pinned) {
      yo = d.y - d.X.col(0) * psi;
      Xf = d.X.rightCols(p - 1);
    } else {
      yo = d.y;
      Xf = d.X;
    }
    w = weights.size() ? weights : Eigen::VectorXd::Ones(d.n());
    if (w.size() != d.n()) throw ArgumentError("weight vector length does not match the data");
    wsum = w.sum();
    // Individual weights may be negative (signed perturbations of the
    // empirical distribution); the total may not.
    if (!(wsum > 0.0)) throw ArgumentError("observation weights must have a positive total");
  }

  Eigen::Index nfree_beta() const { return Xf.cols(); }

  Eigen::VectorXd full(const Eigen::VectorXd& beta_free, double sigma) const {
    Eigen::VectorXd t(ef.dim(d.p()));
    Eigen::Index k = 0;
    if (pinned) t(k++) = psi;
    t.segment(k, beta_free.size()) = beta_free;
    k += beta_free.size();
    if (ef.has_scale()) t(k) = sigma;
    return t;
  }

  // Free block of sum g.
  Eigen::VectorXd gfree(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd g = g_sum(ef, d, theta, w);
    return pinned ? Eigen::VectorXd(g.tail(g.size() - 1)) : g;
  }

  Eigen::MatrixXd hfree(const Eigen::VectorXd& theta) const {
    const Eigen::MatrixXd H = jacobian_sum(ef, d, theta, w);
    const Eigen::Index k = H.rows() - (pinned ? 1 : 0);
    return H.bottomRightCorner(k, k);
  }

  Eigen::VectorXd beta_free_of(const Eigen::VectorXd& theta) const { return theta.segment(pinned ? 1 : 0, nfree_beta()); }

  Eigen::VectorXd residuals(const Eigen::VectorXd& beta_free) const {
    return nfree_beta() ? Eigen::VectorXd(yo - Xf * beta_free) : yo;
  }

  Eigen::VectorXd wls(const Eigen::VectorXd& wt) const {
    if (nfree_beta() == 0) return {};
    const Eigen::MatrixXd A = Xf.transpose() * wt.asDiagonal() * Xf;
    const Eigen::VectorXd b = Xf.transpose() * wt.asDiagonal() * yo;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13) throw NumericError("design matrix is singular for the weighted fit");
    return ldlt.solve(b);
  }
};

double weighted_median(std::vector<std::pair<double, double>> vw) {
  if (vw.empty()) throw NumericError("median of an empty group");
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& [v, w] : vw) total += w;
  const double half = 0.5 * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < vw.size(); ++i) {
    cum += vw[i].second;
    if (cum >= half * (1.0 - 1e-12)) {
      // Exactly half the mass at or below: midpoint with the next value.
      if (std::abs(cum - half) <= 1e-12 * total && i + 1 < vw.size()) return 0.5 * (vw[i].first + vw[i + 1].first);
      return vw[i].first;
    }
  }
  return vw.back().first;
}

double robust_start_scale(const Eigen::VectorXd& e) {
  std::vector<double> v(e.data(), e.data() + e.size());
  double s = 1.4826 * stats::mad(v);
  if (!(s > 0.0)) s = stats::sd(v);
  if (!(s > 0.0) || !std::isfinite(s)) throw NumericError("zero-spread data: scale cannot be estimated");
  return s;
}

Fit finish(const Reduced& R, Eigen::VectorXd theta, int iter) {
  Fit f;
  f.residual_norm = R.gfree(theta).norm();
  f.theta = std::move(theta);
  f.iterations = iter;
  return f;
}

// ---- ML: weighted least squares and the ML scale --------------------------

Fit solve_ml(const Reduced& R) {
  const Eigen::VectorXd b = R.wls(R.w);
  double s = R.ef.sigma;
  if (R.ef.has_scale()) {
    const Eigen::VectorXd e = R.residuals(b);
    const double v = e.cwiseAbs2().dot(R.w) / R.wsum;
    if (v < 0.0) throw NumericError("weighted residual variance is negative");
    s = std::sqrt(v);
    if (!(s > 1e-300)) throw NumericError("zero-spread data: scale estimate is zero");
  }
  return finish(R, R.full(b, s), 1);
}

// ---- Newton polish shared by the smooth kinds ------------------------------

// One Newton step on the free block; returns true when it reduced ||sum g||.
bool newton_step(const Reduced& R, Eigen::VectorXd& theta, double& gnorm) {
  const Eigen::VectorXd g = R.gfree(theta);
  const Eigen::MatrixXd H = R.hfree(theta);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd step = lu.solve(g);
  if (!step.allFinite()) return false;
  const Eigen::Index off = R.pinned ? 1 : 0;
  for (double damp = 1.0; damp >= 0.125; damp *= 0.5) {
    Eigen::VectorXd cand = theta;
    cand.segment(off, step.size()) -= damp * step;
    if (R.ef.has_scale() && !(cand(cand.size() - 1) > 0.0)) continue;
    const double cn = R.gfree(cand).norm();
    if (cn < gnorm) {
      theta = cand;
      gnorm = cn;
      return true;
    }
  }
  return false;
}

Eigen::VectorXd lad_beta(const Reduced& R, int max_iter, int* iterations);

// ---- Huber: IRLS with Proposal-2 scale, Newton polish ----------------------

Fit solve_huber(const Reduced& R, const SolveOptions& opt) {
  const double c = R.ef.c;
  const double kappa = dist::huber_kappa(c);
  Eigen::VectorXd b;
  double s;
  int it0 = 0;
  if (opt.start) {
    b = R.beta_free_of(*opt.start);
    s = R.ef.has_scale() ? (*opt.start)(opt.start->size() - 1) : R.ef.sigma;
  } else {
    // Group medians are exact and cheap for location designs and keep IRLS
    // away from the pull of gross outliers; regressions start from least squares.
    b = R.d.kind == DatasetKind::regression ? R.wls(R.w) : lad_beta(R, 0, &it0);
    s = R.ef.has_scale() ? robust_start_scale(R.residuals(b)) : R.ef.sigma;
  }
  const double tol = opt.tol * R.wsum;
  Eigen::VectorXd theta = R.full(b, s);
  double gnorm = R.gfree(theta).norm();
  int it = 0;
  for (; it < opt.max_iter && !(gnorm <= tol); ++it) {
    Eigen::VectorXd e = R.residuals(b);
    Eigen::VectorXd wt(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const double a = std::abs(e(i)) / s;
      wt(i) = R.w(i) * (a <= c ? 1.0 : c / a);
    }
    if (R.nfree_beta()) b = R.wls(wt);
    if (R.ef.has_scale()) {
      e = R.residuals(b);
      double num = 0.0;
      for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double ps = huber_psi(e(i) / s, c);
        num += R.w(i) * ps * ps;
      }
      s = s * std::sqrt(num / (kappa * R.wsum));
      if (!(s > 1e-300)) throw NumericError("zero-spread data: scale estimate collapsed");
    }
    theta = R.full(b, s);
    gnorm = R.gfree(theta).norm();
    if (gnorm > tol && it >= 2 && newton_step(R, theta, gnorm)) {
      b = R.beta_free_of(theta);
      if (R.ef.has_scale()) s = theta(theta.size() - 1);
    }
  }
  if (gnorm <= tol) return finish(R, theta, it);

  // Scalar location with known scale: the equation is monotone, so bisection
  // cannot fail.
  if (!R.ef.has_scale() && R.nfree_beta() == 1 && (R.Xf.array() >= 0.0).all()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = 0; i < R.yo.size(); ++i)
      if (R.Xf(i, 0) > 0.0) lo = std::min(lo, R.yo(i) / R.Xf(i, 0)), hi = std::max(hi, R.yo(i) / R.Xf(i, 0));
    Eigen::VectorXd bb(1);
    for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++k) {
      bb(0) = 0.5 * (lo + hi);
      (R.gfree(R.full(bb, s))(0) > 0.0 ? lo : hi) = bb(0);
    }
    bb(0) = 0.5 * (lo + hi);
    return finish(R, R.full(bb, s), it + 200);
  }
  throw ConvergenceError("huber solver did not converge in " + std::to_string(opt.max_iter) + " iterations", theta, gnorm);
}

// ---- Tsallis: weighted fixed point from a Huber start, Newton polish -------

Fit solve_tsallis(const Reduced& R, const SolveOptions& opt) {
  const double g = R.ef.gamma;
  Eigen::VectorXd theta;
  if (opt.start) {
    theta = *opt.start;
  } else {
    EstimatingFunction hub = EstimatingFunction::huber();
    hub.known_sigma = R.ef.known_sigma;
    hub.sigma = R.ef.sigma;
    SolveOptions ho;
    ho.weights = R.w;
    theta = R.pinned ? solve_constrained(hub, R.d, R.psi, ho).theta : solve(hub, R.d, ho).theta;
  }
  Eigen::VectorXd b = R.beta_free_of(theta);
  double s = R.ef.has_scale() ? theta(theta.size() - 1) : R.ef.sigma;
  const double tol = opt.tol * R.wsum;
  double gnorm = R.gfree(theta).norm();
  int it = 0;
  for (; it < opt.max_iter && !(gnorm <= tol); ++it) {
    Eigen::VectorXd e = R.residuals(b);
    Eigen::VectorXd wt(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) wt(i) = R.w(i) * std::exp(-0.5 * (g - 1.0) * e(i) * e(i) / (s * s));
    if (R.nfree_beta()) b = R.wls(wt);
    if (R.ef.has_scale()) {
      e = R.residuals(b);
      double num = 0.0, den = -R.wsum * (g - 1.0) * std::pow(g, -1.5);
      for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double ei = R.w(i) * std::exp(-0.5 * (g - 1.0) * e(i) * e(i) / (s * s));
        num += ei * e(i) * e(i);
        den += ei;
      }
      if (!(den > 0.0)) throw NumericError("tsallis scale equation has no positive root at this iterate");
      s = std::sqrt(num / den);
      if (!(s > 1e-300)) throw NumericError("zero-spread data: scale estimate collapsed");
    }
    theta = R.full(b, s);
    gnorm = R.gfree(theta).norm();
    if (gnorm > tol && newton_step(R, theta, gnorm)) {
      b = R.beta_free_of(theta);
      if (R.ef.has_scale()) s = theta(theta.size() - 1);
    }
  }
  if (gnorm <= tol) return finish(R, theta, it);
  throw ConvergenceError("tsallis solver did not converge in " + std::to_string(opt.max_iter) + " iterations", theta, gnorm);
}

// ---- Sign score: exact medians where the design allows, LAD otherwise ------

// Free beta block minimizing the weighted absolute deviations.
Eigen::VectorXd lad_beta(const Reduced& R, int max_iter, int* iterations) {
  const Dataset& d = R.d;
  auto group_median = [&](int label) {
    std::vector<std::pair<double, double>> vw;
    for (Eigen::Index i = 0; i < d.n(); ++i)
      if (label < 0 || d.group[static_cast<std::size_t>(i)] == label) vw.emplace_back(R.yo(i), R.w(i));
    return weighted_median(std::move(vw));
  };
  Eigen::VectorXd b(R.nfree_beta());
  *iterations = 1;
  if (d.kind == DatasetKind::one_sample) {
    if (!R.pinned) b(0) = group_median(-1);
    return b;
  }
  if (d.kind == DatasetKind::two_sample) {
    if (R.pinned) {
      b(0) = group_median(-1);
    } else {
      const double mn = group_median(0);
      b(0) = group_median(1) - mn;
      b(1) = mn;
    }
    return b;
  }
  // Regression designs: least absolute deviations by IRLS.
  b = R.wls(R.w);
  const double eps = 1e-10 * std::max(1.0, R.yo.cwiseAbs().maxCoeff());
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd e = R.residuals(b);
    Eigen::VectorXd wt(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) wt(i) = R.w(i) / std::max(std::abs(e(i)), eps);
    const Eigen::VectorXd nb = R.wls(wt);
    const double change = (nb - b).cwiseAbs().maxCoeff();
    b = nb;
    if (change <= 1e-10 * (1.0 + b.cwiseAbs().maxCoeff())) break;
  }
  *iterations = it;
  return b;
}

Fit solve_median(const Reduced& R, const SolveOptions& opt) {
  int it = 0;
  const Eigen::VectorXd b = lad_beta(R, opt.max_iter, &it);
  return finish(R, R.full(b, 0.0), it);
}

Fit dispatch(const Reduced& R, const SolveOptions& opt) {
  if (R.d.n() < R.ef.dim(R.d.p()) + 1) throw NumericError("too few observations for the number of parameters");
  if ((R.d.y.array() == R.d.y(0)).all()) throw NumericError("zero-spread data: all responses are equal");
  switch (R.ef.kind) {
    case EfKind::ml_score: return solve_ml(R);
    case EfKind::huber: return solve_huber(R, opt);
    case EfKind::tsallis: return solve_tsallis(R, opt);
    case EfKind::median_sign: return solve_median(R, opt);
  }
  throw ArgumentError("unknown estimating function");
}

}  // namespace

Fit solve(const EstimatingFunction& ef, const Dataset& d, const SolveOptions& opt) {
  return dispatch(Reduced(ef, d, false, 0.0, opt.weights), opt);
}

Fit solve_constrained(const EstimatingFunction& ef, const Dataset& d, double psi_fixed, const SolveOptions& opt) {
  if (!std::isfinite(psi_fixed)) throw ArgumentError("constrained solve needs a finite psi");
  return dispatch(Reduced(ef, d, true, psi_fixed, opt.weights), opt);
}

GodambeEstimates godambe(const EstimatingFunction& ef, const Dataset& d, const Eigen::VectorXd& theta, const Eigen::VectorXd& w) {
  const Eigen::VectorXd wt = w.size() ? w : Eigen::VectorXd::Ones(d.n());
  const double W = wt.sum();
  const Eigen::MatrixXd G = g_rows(ef, d, theta);
  GodambeEstimates ge;
  ge.n = W;
  ge.J = G.transpose() * wt.asDiagonal() * G / W;
  if (ef.kind == EfKind::median_sign) {
    // dE[sign(r) x]/dbeta = -2 f(0) E[x x']; f(0) by a kernel estimate of
    // the residual density at zero.
    const Eigen::VectorXd e = d.y - d.X * theta;
    std::vector<double> ev(e.data(), e.data() + e.size());
    const double h = stats::silverman_bandwidth(ev);
    double f0 = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) f0 += wt(i) * dist::norm_pdf(e(i) / h);
    f0 /= W * h;
    ge.K = 2.0 * f0 * (d.X.transpose() * wt.asDiagonal() * d.X) / W;
  } else {
    ge.K = -jacobian_sum(ef, d, theta, w) / W;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ge.K);
  if (!lu.isInvertible() || !ge.K.allFinite()) throw NumericError("sensitivity matrix singular");
  const Eigen::MatrixXd Kinv = lu.inverse();
  ge.V = Kinv * ge.J * Kinv.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> vlu(ge.V);
  ge.Vg = vlu.isInvertible() ? Eigen::MatrixXd(vlu.inverse()) : Eigen::MatrixXd();
  ge.var_psi = ge.V(0, 0) / W;
  ge.k_psi = Kinv(0, 0) / W;
  if (!(ge.var_psi > 0.0) || !(ge.k_psi > 0.0)) throw NumericError("non-positive variance for the interest parameter");
  return ge;
}

Eigen::VectorXd influence_function(const EstimatingFunction& ef, const GodambeEstimates& ge, double y,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ge.K);
  if (!lu.isInvertible()) throw NumericError("sensitivity matrix singular");
  return lu.solve(g_single(ef, y, x, theta));
}

}  // namespace rcd
