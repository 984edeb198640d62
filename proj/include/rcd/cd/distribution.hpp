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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcd/core/stats.hpp"

namespace rcd {

enum class Representation { closed_form, empirical, grid };
enum class ClosedFamily { normal, student_t };
enum class Alternative { less, greater, two_sided };

const char* to_string(Representation r);

struct PointEstimates {
  double median = 0.0;
  double mean = 0.0;
  double mode = 0.0;
};

/// Confidence density: either a sample of psi values (with a kernel grid for
/// plotting) or a bare grid of (psi, density) pairs.
struct ConfidenceDensity {
  std::vector<double> sample;  // may be empty
  stats::Grid grid;
  double bandwidth = 0.0;  // 0 for grids not built by a kernel

  static ConfidenceDensity from_sample(std::vector<double> sample, std::size_t points = 512);
  static ConfidenceDensity from_grid(std::vector<double> psi, std::vector<double> density);

  /// Argmax of the density grid.
  double mode() const;
  double integral() const;
};

/// A map psi -> C(psi) in [0, 1]. Immutable once built; all queries are const
/// and safe to share between threads.
class ConfidenceDistribution {
 public:
  /// Closed forms: C(psi) = F((psi - loc) / scale) with F normal or Student t.
  static ConfidenceDistribution normal(double loc, double scale);
  static ConfidenceDistribution student_t(double loc, double scale, double df);

  /// Empirical CDF of a sample of psi values (accepted draws, bootstrap
  /// replicates). `interpolate` switches quantiles to R type 7.
  static ConfidenceDistribution empirical(std::vector<double> sample, bool interpolate = false);

  /// Piecewise-linear C on a sorted psi grid. The grid is kept as given;
  /// `monotone()` reports whether it is a proper CD.
  static ConfidenceDistribution grid(std::vector<double> psi, std::vector<double> c);

  Representation representation() const noexcept { return repr_; }
  ClosedFamily family() const noexcept { return family_; }
  double location() const noexcept { return loc_; }
  double scale() const noexcept { return scale_; }
  double df() const noexcept { return df_; }
  bool interpolating() const noexcept { return interpolate_; }
  bool monotone() const noexcept { return monotone_; }

  /// Sample size (empirical) or grid length; 0 for closed forms.
  std::size_t size() const noexcept;
  std::pair<double, double> support() const;

  const std::vector<double>& sample() const noexcept { return sample_; }
  const std::vector<double>& grid_psi() const noexcept { return psi_; }
  const std::vector<double>& grid_c() const noexcept { return c_; }

  double evaluate(double psi) const;
  /// Smallest psi with C(psi) >= alpha.
  double quantile(double alpha) const;
  std::pair<double, double> interval(double level) const;
  /// C(psi2) - C(psi1); infinite endpoints allowed.
  double evidence(double psi1, double psi2) const;
  /// greater: C(psi0), small when the data favour psi > psi0; less: 1 - C(psi0).
  double p_value(double psi0, Alternative alt) const;

  /// Confidence median: quantile(0.5), except that empirical samples use the
  /// midpoint convention for even sizes.
  double median() const;
  double mean() const;
  PointEstimates point_estimates() const;

  /// Density attached by the builder (pivot CDs). Grids without one cannot
  /// report a mode.
  void attach_density(ConfidenceDensity d) { density_ = std::move(d); }
  const std::optional<ConfidenceDensity>& density() const noexcept { return density_; }

  // Diagnostics recorded by monotonize().
  double max_adjustment() const noexcept { return max_adjust_; }
  double adjustment_mass() const noexcept { return adjust_mass_; }
  void set_adjustment(double max_adjust, double mass) noexcept {
    max_adjust_ = max_adjust;
    adjust_mass_ = mass;
  }

 private:
  ConfidenceDistribution() = default;
  void require_monotone() const;

  Representation repr_ = Representation::grid;
  ClosedFamily family_ = ClosedFamily::normal;
  double loc_ = 0.0, scale_ = 1.0, df_ = 0.0;
  bool interpolate_ = false;
  bool monotone_ = true;
  std::vector<double> sample_;
  std::vector<double> psi_, c_;
  std::optional<ConfidenceDensity> density_;
  double max_adjust_ = 0.0, adjust_mass_ = 0.0;
};

/// Isotonic projection of a raw (psi, C) grid. `weights` (optional) are the
/// per-point precision weights used by PAVA and by the adjustment mass.
ConfidenceDistribution monotonize(std::vector<double> psi, std::vector<double> c,
                                  const std::vector<double>& weights = {});

/// Algorithm-3 sample {C^-1(j/R)}, j = 1..R, plus a kernel grid.
ConfidenceDensity density_from_cd(const ConfidenceDistribution& cd, std::size_t R);

}  // namespace rcd
