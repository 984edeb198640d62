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

#include "rcd/cd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcd/core/dist.hpp"
#include "rcd/core/error.hpp"

namespace rcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTail = 1e-12;
constexpr const char* kNotProper = "not a proper CD; monotonize or use confidence curve";

}  // namespace

const char* to_string(Representation r) {
  switch (r) {
    case Representation::closed_form: return "closed_form";
    case Representation::empirical: return "empirical";
    case Representation::grid: return "grid";
  }
  return "unknown";
}

// ---- ConfidenceDensity ------------------------------------------------------

ConfidenceDensity ConfidenceDensity::from_sample(std::vector<double> sample, std::size_t points) {
  ConfidenceDensity d;
  d.bandwidth = stats::silverman_bandwidth(sample);
  d.grid = stats::kde(sample, points, d.bandwidth);
  d.sample = std::move(sample);
  return d;
}

ConfidenceDensity ConfidenceDensity::from_grid(std::vector<double> psi, std::vector<double> density) {
  if (psi.size() != density.size() || psi.empty()) throw ArgumentError("density grid: length mismatch or empty");
  ConfidenceDensity d;
  d.grid.x = std::move(psi);
  d.grid.y = std::move(density);
  return d;
}

double ConfidenceDensity::mode() const {
  if (grid.y.empty()) throw ArgumentError("density grid is empty");
  // A point mass has no kernel peak on the grid; report the atom itself.
  if (!sample.empty() && std::all_of(sample.begin(), sample.end(), [&](double v) { return v == sample.front(); }))
    return sample.front();
  const auto it = std::max_element(grid.y.begin(), grid.y.end());
  return grid.x[static_cast<std::size_t>(it - grid.y.begin())];
}

double ConfidenceDensity::integral() const { return stats::trapezoid(grid.x, grid.y); }

// ---- ConfidenceDistribution -------------------------------------------------

ConfidenceDistribution ConfidenceDistribution::normal(double loc, double scale) {
  if (!(scale > 0.0) || !std::isfinite(loc)) throw ArgumentError("normal CD needs finite location and positive scale");
  ConfidenceDistribution cd;
  cd.repr_ = Representation::closed_form;
  cd.family_ = ClosedFamily::normal;
  cd.loc_ = loc;
  cd.scale_ = scale;
  return cd;
}

ConfidenceDistribution ConfidenceDistribution::student_t(double loc, double scale, double df) {
  if (!(scale > 0.0) || !(df > 0.0) || !std::isfinite(loc))
    throw ArgumentError("t CD needs finite location, positive scale and degrees of freedom");
  ConfidenceDistribution cd = normal(loc, scale);
  cd.family_ = ClosedFamily::student_t;
  cd.df_ = df;
  return cd;
}

ConfidenceDistribution ConfidenceDistribution::empirical(std::vector<double> sample, bool interpolate) {
  if (sample.empty()) throw NumericError("no accepted draws");
  std::sort(sample.begin(), sample.end());
  ConfidenceDistribution cd;
  cd.repr_ = Representation::empirical;
  cd.interpolate_ = interpolate;
  cd.sample_ = std::move(sample);
  return cd;
}

ConfidenceDistribution ConfidenceDistribution::grid(std::vector<double> psi, std::vector<double> c) {
  if (psi.size() != c.size() || psi.size() < 2) throw ArgumentError("CD grid needs at least two (psi, C) pairs");
  if (!std::is_sorted(psi.begin(), psi.end())) throw ArgumentError("CD grid must be sorted by psi");
  ConfidenceDistribution cd;
  cd.repr_ = Representation::grid;
  for (double& v : c) v = std::clamp(v, 0.0, 1.0);
  cd.monotone_ = std::is_sorted(c.begin(), c.end());
  cd.psi_ = std::move(psi);
  cd.c_ = std::move(c);
  return cd;
}

std::size_t ConfidenceDistribution::size() const noexcept {
  switch (repr_) {
    case Representation::empirical: return sample_.size();
    case Representation::grid: return psi_.size();
    default: return 0;
  }
}

std::pair<double, double> ConfidenceDistribution::support() const {
  switch (repr_) {
    case Representation::closed_form: {
      const double q = family_ == ClosedFamily::normal ? dist::norm_quantile(1.0 - kTail) : dist::t_quantile(1.0 - kTail, df_);
      return {loc_ - scale_ * q, loc_ + scale_ * q};
    }
    case Representation::empirical: return {sample_.front(), sample_.back()};
    case Representation::grid: return {psi_.front(), psi_.back()};
  }
  return {0.0, 0.0};
}

void ConfidenceDistribution::require_monotone() const {
  if (!monotone_) throw NumericError(kNotProper);
}

double ConfidenceDistribution::evaluate(double psi) const {
  if (std::isnan(psi)) throw ArgumentError("cannot evaluate a CD at NaN");
  switch (repr_) {
    case Representation::closed_form: {
      const double z = (psi - loc_) / scale_;
      return family_ == ClosedFamily::normal ? dist::norm_cdf(z) : dist::t_cdf(z, df_);
    }
    case Representation::empirical: {
      const auto it = std::upper_bound(sample_.begin(), sample_.end(), psi);
      return static_cast<double>(it - sample_.begin()) / static_cast<double>(sample_.size());
    }
    case Representation::grid: {
      if (psi < psi_.front()) return 0.0;
      if (psi >= psi_.back()) return 1.0;
      const auto it = std::upper_bound(psi_.begin(), psi_.end(), psi);
      const std::size_t i = static_cast<std::size_t>(it - psi_.begin());
      const double x0 = psi_[i - 1], x1 = psi_[i];
      const double t = x1 > x0 ? (psi - x0) / (x1 - x0) : 1.0;
      return c_[i - 1] + t * (c_[i] - c_[i - 1]);
    }
  }
  return 0.0;
}

double ConfidenceDistribution::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("quantile level must lie in (0, 1)");
  switch (repr_) {
    case Representation::closed_form: {
      const double q = family_ == ClosedFamily::normal ? dist::norm_quantile(alpha) : dist::t_quantile(alpha, df_);
      return loc_ + scale_ * q;
    }
    case Representation::empirical: {
      if (interpolate_) return stats::quantile_sorted_type7(sample_, alpha);
      const double R = static_cast<double>(sample_.size());
      // Guard against alpha * R landing a hair above an integer.
      auto rank = static_cast<std::size_t>(std::ceil(alpha * R - 1e-9));
      rank = std::clamp<std::size_t>(rank, 1, sample_.size());
      return sample_[rank - 1];
    }
    case Representation::grid: {
      require_monotone();
      const auto it = std::lower_bound(c_.begin(), c_.end(), alpha);
      if (it == c_.end()) return psi_.back();
      const std::size_t i = static_cast<std::size_t>(it - c_.begin());
      if (i == 0) return psi_.front();
      const double c0 = c_[i - 1], c1 = c_[i];
      return psi_[i - 1] + (alpha - c0) / (c1 - c0) * (psi_[i] - psi_[i - 1]);
    }
  }
  return 0.0;
}

std::pair<double, double> ConfidenceDistribution::interval(double level) const {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must lie in (0, 1)");
  const double a = 0.5 * (1.0 - level);
  return {quantile(a), quantile(1.0 - a)};
}

double ConfidenceDistribution::evidence(double psi1, double psi2) const {
  if (psi1 > psi2) throw ArgumentError("evidence: psi1 must not exceed psi2");
  const double hi = psi2 == kInf ? 1.0 : evaluate(psi2);
  const double lo = psi1 == -kInf ? 0.0 : evaluate(psi1);
  return hi - lo;
}

double ConfidenceDistribution::p_value(double psi0, Alternative alt) const {
  const double c = evaluate(psi0);
  switch (alt) {
    case Alternative::less: return 1.0 - c;    // H1: psi < psi0
    case Alternative::greater: return c;       // H1: psi > psi0
    case Alternative::two_sided: return std::min(1.0, 2.0 * std::min(c, 1.0 - c));
  }
  return c;
}

double ConfidenceDistribution::median() const {
  if (repr_ == Representation::empirical) return stats::median(sample_);
  return quantile(0.5);
}

double ConfidenceDistribution::mean() const {
  switch (repr_) {
    case Representation::closed_form:
      if (family_ == ClosedFamily::student_t && df_ <= 1.0) throw NumericError("t CD with df <= 1 has no mean");
      return loc_;
    case Representation::empirical: return stats::mean(sample_);
    case Representation::grid: {
      require_monotone();
      // Piecewise-linear C: uniform mass inside each cell plus the jumps at
      // the grid ends.
      double m = c_.front() * psi_.front() + (1.0 - c_.back()) * psi_.back();
      for (std::size_t i = 1; i < psi_.size(); ++i) m += (c_[i] - c_[i - 1]) * 0.5 * (psi_[i] + psi_[i - 1]);
      return m;
    }
  }
  return 0.0;
}

PointEstimates ConfidenceDistribution::point_estimates() const {
  PointEstimates p;
  p.median = median();
  p.mean = mean();
  if (repr_ == Representation::closed_form) {
    p.mode = loc_;
  } else if (density_) {
    p.mode = density_->mode();
  } else if (repr_ == Representation::empirical) {
    p.mode = ConfidenceDensity::from_sample(sample_).mode();
  } else {
    throw NumericError("mode undefined without a density grid; compute the density first");
  }
  return p;
}

ConfidenceDistribution monotonize(std::vector<double> psi, std::vector<double> c, const std::vector<double>& weights) {
  const std::vector<double> raw = c;
  std::vector<double> fit = stats::pava(c, weights);
  double max_adj = 0.0, mass = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const double adj = std::abs(fit[i] - raw[i]);
    max_adj = std::max(max_adj, adj);
    mass += w * adj;
    wsum += w;
  }
  ConfidenceDistribution cd = ConfidenceDistribution::grid(std::move(psi), std::move(fit));
  cd.set_adjustment(max_adj, wsum > 0.0 ? mass / wsum : 0.0);
  return cd;
}

ConfidenceDensity density_from_cd(const ConfidenceDistribution& cd, std::size_t R) {
  if (R < 2) throw ArgumentError("density_from_cd needs R >= 2");
  if (!cd.monotone()) throw NumericError(kNotProper);
  std::vector<double> s(R);
  const double hi = cd.support().second;
  for (std::size_t j = 1; j < R; ++j) s[j - 1] = cd.quantile(static_cast<double>(j) / static_cast<double>(R));
  s[R - 1] = hi;
  return ConfidenceDensity::from_sample(std::move(s));
}

}  // namespace rcd
