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

#include "rcd/core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcd/core/dist.hpp"
#include "rcd/core/error.hpp"

namespace rcd::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw ArgumentError("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median(std::span<const double> x) {
  if (x.empty()) throw ArgumentError("median of empty sample");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  const double hi = v[h];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + h);
  return 0.5 * (lo + hi);
}

double mad(std::span<const double> x) {
  const double m = median(x);
  std::vector<double> d(x.size());
  std::transform(x.begin(), x.end(), d.begin(), [m](double v) { return std::abs(v - m); });
  return median(d);
}

double quantile_sorted_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double silverman_bandwidth(std::span<const double> x) {
  if (x.size() < 2) return 1.0;
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double iqr = quantile_sorted_type7(s, 0.75) - quantile_sorted_type7(s, 0.25);
  const double sdev = sd(x);
  double spread = std::min(sdev, iqr / 1.34);
  if (spread <= 0.0) spread = sdev > 0.0 ? sdev : (iqr > 0.0 ? iqr / 1.34 : 0.0);
  // All values tied: fall back to a bandwidth tied to the magnitude so the
  // kernel grid is still well defined.
  if (spread <= 0.0) spread = 1e-3 * std::max(1.0, std::abs(s.front()));
  return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

Grid kde(std::span<const double> x, std::size_t points, double bandwidth) {
  if (x.empty()) throw ArgumentError("density of empty sample");
  if (points < 2) throw ArgumentError("density grid needs at least two points");
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(x);
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  Grid g;
  g.x.resize(points);
  g.y.assign(points, 0.0);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g.x[i] = lo + step * static_cast<double>(i);
  const double norm = 1.0 / (static_cast<double>(x.size()) * h);
  // The kernel is negligible beyond 8 bandwidths, so only nearby nodes are touched.
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(8.0 * h / step));
  for (double v : x) {
    const auto centre = static_cast<std::ptrdiff_t>(std::llround((v - lo) / step));
    const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, centre - reach);
    const std::ptrdiff_t b = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(points) - 1, centre + reach);
    for (std::ptrdiff_t i = a; i <= b; ++i) g.y[i] += dist::norm_pdf((g.x[i] - v) / h);
  }
  for (double& y : g.y) y *= norm;
  return g;
}

std::vector<double> pava(std::span<const double> y, std::span<const double> w) {
  const std::size_t n = y.size();
  if (!w.empty() && w.size() != n) throw ArgumentError("pava: weight length mismatch");
  // Blocks kept as (value, weight, length) on a stack.
  std::vector<double> val, wt;
  std::vector<std::size_t> len;
  for (std::size_t i = 0; i < n; ++i) {
    val.push_back(y[i]);
    wt.push_back(w.empty() ? 1.0 : w[i]);
    len.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] > val.back()) {
      const double w2 = wt.back(), v2 = val.back();
      const std::size_t l2 = len.back();
      val.pop_back(), wt.pop_back(), len.pop_back();
      const double wsum = wt.back() + w2;
      val.back() = wsum > 0.0 ? (wt.back() * val.back() + w2 * v2) / wsum : 0.5 * (val.back() + v2);
      wt.back() = wsum;
      len.back() += l2;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < val.size(); ++b) out.insert(out.end(), len[b], val[b]);
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("trapezoid: length mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace rcd::stats
