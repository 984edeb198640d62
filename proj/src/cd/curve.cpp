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

#include "rcd/cd/curve.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include "rcd/core/dist.hpp"
#include "rcd/core/error.hpp"

namespace rcd {

namespace {

double interp(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + t * (y[i] - y[i - 1]);
}

}  // namespace

ConfidenceCurve ConfidenceCurve::from_cd(const ConfidenceDistribution& cd, const std::vector<double>& psi) {
  if (psi.size() < 2) throw ArgumentError("confidence curve needs at least two grid points");
  ConfidenceCurve out;
  out.psi_ = psi;
  out.cc_.reserve(psi.size());
  for (double p : psi) out.cc_.push_back(std::abs(1.0 - 2.0 * cd.evaluate(p)));
  out.zero_ = cd.median();
  return out;
}

ConfidenceCurve ConfidenceCurve::from_raw(std::vector<double> psi, const std::vector<double>& c) {
  if (psi.size() != c.size() || psi.size() < 2) throw ArgumentError("confidence curve: bad grid");
  ConfidenceCurve out;
  out.psi_ = std::move(psi);
  out.cc_.reserve(c.size());
  for (double v : c) out.cc_.push_back(std::abs(1.0 - 2.0 * std::clamp(v, 0.0, 1.0)));
  const auto it = std::min_element(out.cc_.begin(), out.cc_.end());
  out.zero_ = out.psi_[static_cast<std::size_t>(it - out.cc_.begin())];
  return out;
}

double ConfidenceCurve::evaluate(double psi) const {
  if (psi < psi_.front() || psi > psi_.back()) return 1.0;
  return interp(psi_, cc_, psi);
}

std::pair<double, double> ConfidenceCurve::region(double level) const {
  std::size_t first = psi_.size(), last = 0;
  for (std::size_t i = 0; i < psi_.size(); ++i) {
    if (cc_[i] <= level) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == psi_.size()) return {zero_, zero_};
  auto cross = [&](std::size_t a, std::size_t b) {
    // Linear crossing of cc = level between nodes a and b.
    const double d = cc_[b] - cc_[a];
    if (d == 0.0) return psi_[a];
    return psi_[a] + (level - cc_[a]) / d * (psi_[b] - psi_[a]);
  };
  const double lo = first == 0 ? psi_.front() : cross(first - 1, first);
  const double hi = last + 1 == psi_.size() ? psi_.back() : cross(last, last + 1);
  return {lo, hi};
}

PlotData plot_data(const ConfidenceDistribution& cd, std::size_t points) {
  if (points < 2) throw ArgumentError("plot grid needs at least two points");
  PlotData out;
  double lo, hi;
  if (cd.representation() == Representation::closed_form) {
    // +-6 scale units is where the closed-form tails become visually flat.
    lo = cd.location() - 6.0 * cd.scale();
    hi = cd.location() + 6.0 * cd.scale();
  } else {
    std::tie(lo, hi) = cd.support();
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  std::optional<ConfidenceDensity> kernel;
  if (cd.representation() == Representation::empirical && !cd.density()) kernel = ConfidenceDensity::from_sample(cd.sample());
  if (cd.representation() == Representation::grid && !cd.density() && cd.monotone()) kernel = density_from_cd(cd, 4000);
  const ConfidenceDensity* dens = cd.density() ? &*cd.density() : (kernel ? &*kernel : nullptr);

  for (std::size_t i = 0; i < points; ++i) {
    const double p = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double c = cd.evaluate(p);
    out.psi.push_back(p);
    out.c.push_back(c);
    out.cc.push_back(std::abs(1.0 - 2.0 * c));
    double d = 0.0;
    if (cd.representation() == Representation::closed_form) {
      const double z = (p - cd.location()) / cd.scale();
      d = (cd.family() == ClosedFamily::normal ? dist::norm_pdf(z) : dist::t_pdf(z, cd.df())) / cd.scale();
    } else if (dens != nullptr && p >= dens->grid.x.front() && p <= dens->grid.x.back()) {
      d = interp(dens->grid.x, dens->grid.y, p);
    }
    out.density.push_back(d);
  }
  return out;
}

}  // namespace rcd
