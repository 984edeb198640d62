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

#include <cstddef>
#include <span>
#include <vector>

namespace rcd::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double sd(std::span<const double> x);

/// Median with the midpoint convention for even sizes.
double median(std::span<const double> x);
/// Raw median absolute deviation about the median (no 1.4826 factor).
double mad(std::span<const double> x);

/// Interpolating quantile on a sorted sample (R type 7).
double quantile_sorted_type7(std::span<const double> sorted, double p);

/// Silverman's rule of thumb 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> x);

struct Grid {
  std::vector<double> x;
  std::vector<double> y;
};

/// Gaussian-kernel density on `points` equally spaced nodes spanning the
/// sample range padded by three bandwidths.
Grid kde(std::span<const double> x, std::size_t points = 512, double bandwidth = 0.0);

/// Weighted pool-adjacent-violators fit (non-decreasing). Empty weights mean
/// unit weights.
std::vector<double> pava(std::span<const double> y, std::span<const double> w = {});

double trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace rcd::stats
