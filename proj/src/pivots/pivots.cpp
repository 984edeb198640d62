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

#include "rcd/pivots/pivots.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "rcd/core/dist.hpp"
#include "rcd/core/error.hpp"

namespace rcd {

namespace {

struct KindName {
  PivotKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {PivotKind::wald_classic, "wald_classic"},   {PivotKind::lrt_classic, "lrt_classic"},
    {PivotKind::root_classic, "root_classic"},   {PivotKind::wald_robust, "wald_robust"},
    {PivotKind::score_robust, "score_robust"},   {PivotKind::ratio_robust_adj, "ratio_robust_adj"},
    {PivotKind::root_robust, "root_robust"},
};

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

bool is_wald(PivotKind k) { return k == PivotKind::wald_classic || k == PivotKind::wald_robust; }

}  // namespace

const char* to_string(PivotKind k) {
  for (const auto& e : kKindNames)
    if (e.kind == k) return e.name;
  return "?";
}

PivotKind pivot_kind_from_string(const std::string& s) {
  for (const auto& e : kKindNames)
    if (s == e.name) return e.kind;
  throw ArgumentError(fmt::format("unknown pivot '{}'", s));
}

Reference reference_of(PivotKind k) noexcept {
  switch (k) {
    case PivotKind::lrt_classic:
    case PivotKind::score_robust:
    case PivotKind::ratio_robust_adj: return Reference::chisq1;
    default: return Reference::normal;
  }
}

bool is_classic(PivotKind k) noexcept {
  return k == PivotKind::wald_classic || k == PivotKind::lrt_classic || k == PivotKind::root_classic;
}

bool needs_objective(PivotKind k) noexcept {
  return k == PivotKind::lrt_classic || k == PivotKind::root_classic || k == PivotKind::ratio_robust_adj ||
         k == PivotKind::root_robust;
}

PivotModel::PivotModel(const EstimatingFunction& ef, const Dataset& d, const SolveOptions& opt)
    : ef_(ef), d_(d), opt_(opt) {
  fit_ = solve(ef_, d_, opt_);
  ge_ = rcd::godambe(ef_, d_, fit_.theta, opt_.weights);
  if (ef_.has_objective()) g_hat_ = objective(ef_, d_, fit_.theta, opt_.weights);
  if (ef_.kind != EfKind::ml_score) {
    EstimatingFunction ml = EstimatingFunction::ml_score();
    if (ef_.known_sigma) ml = ml.with_known_sigma(ef_.sigma);
    ml_ = std::make_shared<const PivotModel>(ml, d_, opt_);
  }
}

const PivotModel& PivotModel::classic() const { return ml_ ? *ml_ : *this; }

Fit PivotModel::constrained(double psi, const Eigen::VectorXd* start) const {
  SolveOptions o = opt_;
  if (start) o.start = *start;
  return solve_constrained(ef_, d_, psi, o);
}

double PivotModel::chisq_statistic(PivotKind kind, const Fit& cf) const {
  switch (kind) {
    case PivotKind::score_robust: {
      const double s = ge_.k_psi * g_sum(ef_, d_, cf.theta, opt_.weights)(0);
      return s * s / ge_.var_psi;
    }
    case PivotKind::lrt_classic:
    case PivotKind::root_classic:
    case PivotKind::ratio_robust_adj:
    case PivotKind::root_robust: {
      const double W = std::max(0.0, 2.0 * (objective(ef_, d_, cf.theta, opt_.weights) - g_hat_));
      return is_classic(kind) ? W : W / ge_.nu();
    }
    default: throw ArgumentError(fmt::format("{} has no chi-square form", to_string(kind)));
  }
}

double PivotModel::ratio_statistic(double psi) const {
  if (!ef_.has_objective()) objective(ef_, d_, fit_.theta, opt_.weights);  // throws with the reason
  return std::max(0.0, 2.0 * (objective(ef_, d_, constrained(psi).theta, opt_.weights) - g_hat_));
}

double PivotModel::score_statistic(double psi) const {
  return chisq_statistic(PivotKind::score_robust, constrained(psi));
}

double PivotModel::value(PivotKind kind, double psi) const {
  switch (kind) {
    case PivotKind::wald_classic: {
      const PivotModel& m = classic();
      return (m.psi_hat() - psi) / std::sqrt(m.ge_.k_psi);
    }
    case PivotKind::wald_robust: return (psi_hat() - psi) / se();
    case PivotKind::lrt_classic: return classic().ratio_statistic(psi);
    case PivotKind::root_classic: {
      const PivotModel& m = classic();
      return sign(m.psi_hat() - psi) * std::sqrt(m.ratio_statistic(psi));
    }
    case PivotKind::score_robust: return score_statistic(psi);
    case PivotKind::ratio_robust_adj: return ratio_statistic(psi) / ge_.nu();
    case PivotKind::root_robust: return sign(psi_hat() - psi) * std::sqrt(ratio_statistic(psi) / ge_.nu());
  }
  return 0.0;
}

namespace {

// Central differences on a possibly non-uniform grid; one-sided at the ends.
std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == n ? n - 1 : i + 1;
    d[i] = (y[hi] - y[lo]) / (x[hi] - x[lo]);
  }
  return d;
}

}  // namespace

ConfidenceDistribution cd_from_pivot_on(PivotKind kind, const PivotModel& model, const std::vector<double>& psi,
                                        double max_drop_fraction) {
  if (is_wald(kind)) {
    const PivotModel& m = kind == PivotKind::wald_classic ? model.classic() : model;
    const double se = kind == PivotKind::wald_classic ? std::sqrt(m.godambe().k_psi) : m.se();
    return ConfidenceDistribution::normal(m.psi_hat(), se);
  }
  const PivotModel& m = is_classic(kind) ? model.classic() : model;
  if (needs_objective(kind) && !m.ef().has_objective())
    throw ArgumentError("ratio-type pivot unavailable: " + m.ef().name() + " has no objective");
  if (psi.size() < 3) throw ArgumentError("pivot grid needs at least 3 points");
  if (!std::is_sorted(psi.begin(), psi.end())) throw ArgumentError("pivot grid must be sorted");

  const double center = m.psi_hat();
  const std::size_t n = psi.size();
  std::vector<double> W(n, std::nan(""));
  std::size_t c = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(psi[i] - center) < std::abs(psi[c] - center)) c = i;

  // Walk outward from the estimate, warm-starting each constrained solve
  // from its neighbour.
  auto sweep = [&](std::ptrdiff_t from, std::ptrdiff_t to, std::ptrdiff_t step) {
    Eigen::VectorXd start = m.fit().theta;
    for (std::ptrdiff_t i = from; i != to; i += step) {
      try {
        start(0) = psi[i];
        const Fit f = m.constrained(psi[i], &start);
        W[i] = m.chisq_statistic(kind, f);
        start = f.theta;
      } catch (const Error&) {
        // dropped; counted below
      }
    }
  };
  sweep(static_cast<std::ptrdiff_t>(c), static_cast<std::ptrdiff_t>(n), 1);
  sweep(static_cast<std::ptrdiff_t>(c) - 1, -1, -1);

  std::vector<double> x, cval, r;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(W[i])) continue;
    const double s = sign(psi[i] - center);
    x.push_back(psi[i]);
    if (reference_of(kind) == Reference::normal) {
      r.push_back(s * std::sqrt(W[i]));
      cval.push_back(dist::norm_cdf(r.back()));
    } else {
      cval.push_back(0.5 * (1.0 + s * dist::chisq1_cdf(W[i])));
    }
  }
  const std::size_t dropped = n - x.size();
  if (static_cast<double>(dropped) > max_drop_fraction * static_cast<double>(n) || x.size() < 3)
    throw NumericError(fmt::format("{} of {} grid points failed to solve for the {} pivot", dropped, n,
                                   to_string(kind)));

  std::vector<double> dens;
  if (!r.empty()) {
    const std::vector<double> dr = derivative(x, r);
    for (std::size_t i = 0; i < x.size(); ++i) dens.push_back(dist::norm_pdf(r[i]) * std::abs(dr[i]));
  } else {
    dens = derivative(x, cval);
    for (double& v : dens) v = std::max(v, 0.0);
  }
  ConfidenceDistribution cd = monotonize(x, std::move(cval));
  cd.attach_density(ConfidenceDensity::from_grid(std::move(x), std::move(dens)));
  return cd;
}

ConfidenceDistribution cd_from_pivot(PivotKind kind, const PivotModel& model, const GridOptions& grid) {
  if (is_wald(kind)) return cd_from_pivot_on(kind, model, {});
  if (grid.points < 3) throw ArgumentError("pivot grid needs at least 3 points");
  const PivotModel& m = is_classic(kind) ? model.classic() : model;
  const double se = is_classic(kind) ? std::sqrt(m.godambe().k_psi) : m.se();
  const double center = m.psi_hat();
  const double h = 2.0 * grid.half_width_se * se / static_cast<double>(grid.points - 1);
  const std::ptrdiff_t mid = static_cast<std::ptrdiff_t>(grid.points / 2);
  std::vector<double> psi(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) psi[i] = center + static_cast<double>(static_cast<std::ptrdiff_t>(i) - mid) * h;
  psi[static_cast<std::size_t>(mid)] = center;
  return cd_from_pivot_on(kind, model, psi, grid.max_drop_fraction);
}

ConfidenceDistribution cd_from_pivot(PivotKind kind, const EstimatingFunction& ef, const Dataset& d,
                                     const GridOptions& grid) {
  return cd_from_pivot(kind, PivotModel(ef, d), grid);
}

ConfidenceDensity confidence_density_from_pivot(PivotKind kind, const PivotModel& model, const GridOptions& grid) {
  const ConfidenceDistribution cd = cd_from_pivot(kind, model, grid);
  if (cd.density()) return *cd.density();
  // Closed-form Wald CDs: tabulate the normal density on the same span.
  const double loc = cd.quantile(0.5), scale = cd.quantile(dist::norm_cdf(1.0)) - loc;
  std::vector<double> x(grid.points), y(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    x[i] = loc + scale * grid.half_width_se * (2.0 * static_cast<double>(i) / static_cast<double>(grid.points - 1) - 1.0);
    y[i] = dist::norm_pdf((x[i] - loc) / scale) / scale;
  }
  return ConfidenceDensity::from_grid(std::move(x), std::move(y));
}

ConfidenceDistribution exact_t_cd(const Dataset& d, bool welch) {
  const double n = static_cast<double>(d.n());
  switch (d.kind) {
    case DatasetKind::one_sample: {
      if (d.n() < 2) throw NumericError("exact t CD needs at least 2 observations");
      const double m = d.y.mean();
      const double s = std::sqrt((d.y.array() - m).square().sum() / (n - 1.0));
      if (s == 0.0) return ConfidenceDistribution::empirical({m});  // degenerate: point mass
      return ConfidenceDistribution::student_t(m, s / std::sqrt(n), n - 1.0);
    }
    case DatasetKind::two_sample: {
      double sum[2] = {0, 0}, ss[2] = {0, 0}, cnt[2] = {0, 0};
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        sum[d.group[i]] += d.y(i);
        cnt[d.group[i]] += 1.0;
      }
      if (cnt[0] < 2 || cnt[1] < 2) throw NumericError("exact t CD needs at least 2 observations per group");
      const double m1 = sum[1] / cnt[1], m0 = sum[0] / cnt[0];
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        const double dev = d.y(i) - (d.group[i] ? m1 : m0);
        ss[d.group[i]] += dev * dev;
      }
      double se, df;
      if (welch) {
        const double a = ss[1] / (cnt[1] - 1.0) / cnt[1], b = ss[0] / (cnt[0] - 1.0) / cnt[0];
        se = std::sqrt(a + b);
        df = (a + b) * (a + b) / (a * a / (cnt[1] - 1.0) + b * b / (cnt[0] - 1.0));
      } else {
        const double sp2 = (ss[0] + ss[1]) / (n - 2.0);
        se = std::sqrt(sp2 * (1.0 / cnt[1] + 1.0 / cnt[0]));
        df = n - 2.0;
      }
      if (se == 0.0) return ConfidenceDistribution::empirical({m1 - m0});
      if (!(se > 0.0)) throw NumericError("non-finite standard error");
      return ConfidenceDistribution::student_t(m1 - m0, se, df);
    }
    case DatasetKind::regression: {
      const double p = static_cast<double>(d.p());
      if (n <= p) throw NumericError("exact t CD needs more observations than coefficients");
      const Eigen::MatrixXd XtX = d.X.transpose() * d.X;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(XtX);
      if (!lu.isInvertible()) throw NumericError("design matrix is rank deficient");
      const Eigen::VectorXd beta = lu.solve(d.X.transpose() * d.y);
      const double s2 = (d.y - d.X * beta).squaredNorm() / (n - p);
      if (!(s2 > 0.0)) throw NumericError("zero-spread data: residuals are all zero");
      return ConfidenceDistribution::student_t(beta(0), std::sqrt(s2 * lu.inverse()(0, 0)), n - p);
    }
  }
  throw ArgumentError("unknown dataset kind");
}

namespace {

Dataset append_observation(const Dataset& d, double y, const Eigen::VectorXd& x) {
  if (x.size() != d.p()) throw ArgumentError(fmt::format("design row has length {}, expected {}", x.size(), d.p()));
  Dataset a = d;
  const Eigen::Index n = d.n();
  a.y.conservativeResize(n + 1);
  a.y(n) = y;
  a.X.conservativeResize(n + 1, Eigen::NoChange);
  a.X.row(n) = x.transpose();
  if (d.kind != DatasetKind::one_sample) a.group.push_back(x(0) > 0.5 ? 1 : 0);
  if (d.kind == DatasetKind::regression) {
    a.baseline.conservativeResize(n + 1);
    a.baseline(n) = x(2);
  }
  return a;
}

}  // namespace

double tail_area_influence(PivotKind kind, const EstimatingFunction& ef, const Dataset& d, double psi, double y,
                           const Eigen::VectorXd& x, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw ArgumentError("epsilon must lie in (0, 0.5)");
  const PivotModel base(ef, d);
  const PivotModel& m = is_classic(kind) ? base.classic() : base;
  const GodambeEstimates& ge = m.godambe();
  const double se = is_classic(kind) ? std::sqrt(ge.k_psi) : ge.se_psi();
  const double nu = is_classic(kind) ? 1.0 : ge.nu();
  const Dataset aug = append_observation(d, y, x);
  const double n = static_cast<double>(d.n());

  // Constrained start from the unperturbed fit (only needed off-center).
  Eigen::VectorXd cstart = m.fit().theta;
  const bool needs_constrained = !is_wald(kind);
  if (needs_constrained) cstart = m.constrained(psi).theta;

  auto phi_q = [&](double e) {
    SolveOptions opt;
    opt.tol = 1e-13;
    opt.max_iter = 500;
    opt.weights = Eigen::VectorXd::Constant(aug.n(), 1.0 - e);
    opt.weights(aug.n() - 1) = n * e;
    opt.start = m.fit().theta;
    const EstimatingFunction& f = m.ef();
    const Fit fe = solve(f, aug, opt);
    if (is_wald(kind)) return dist::norm_cdf((fe.psi() - psi) / se);
    SolveOptions co = opt;
    co.start = cstart;
    const Fit ce = solve_constrained(f, aug, psi, co);
    double q = 0.0;
    if (kind == PivotKind::score_robust) {
      q = ge.k_psi * g_sum(f, aug, ce.theta, opt.weights)(0) / std::sqrt(ge.var_psi);
    } else {
      const double W = std::max(0.0, 2.0 * (objective(f, aug, ce.theta, opt.weights) - objective(f, aug, fe.theta, opt.weights)));
      q = sign(fe.psi() - psi) * std::sqrt(W / nu);
    }
    return dist::norm_cdf(q);
  };
  const double up = phi_q(eps);
  try {
    return (up - phi_q(-eps)) / (2.0 * eps);
  } catch (const NumericError&) {
    // Removing mass at a far outlier can leave a signed measure with no
    // valid fit (e.g. a negative ML variance); use the second-order
    // one-sided difference, which only adds mass.
    return (-3.0 * phi_q(0.0) + 4.0 * up - phi_q(2.0 * eps)) / (2.0 * eps);
  }
}

}  // namespace rcd
