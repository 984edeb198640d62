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

#include <vector>

#include "rcd/cd/distribution.hpp"

namespace rcd {

/// cc(psi) = |1 - 2 C(psi)| tabulated on a grid. Built either from a proper CD
/// or from a raw, possibly non-monotone, (psi, C) grid.
class ConfidenceCurve {
 public:
  static ConfidenceCurve from_cd(const ConfidenceDistribution& cd, const std::vector<double>& psi);
  static ConfidenceCurve from_raw(std::vector<double> psi, const std::vector<double>& c);

  const std::vector<double>& psi() const noexcept { return psi_; }
  const std::vector<double>& cc() const noexcept { return cc_; }

  /// Zero-confidence point: the CD median when built from a CD, else the
  /// grid argmin of cc.
  double zero_point() const noexcept { return zero_; }

  /// Linear interpolation on the grid; 1 outside it.
  double evaluate(double psi) const;

  /// {psi : cc(psi) <= level}, taken as the outermost grid crossings.
  std::pair<double, double> region(double level) const;

 private:
  std::vector<double> psi_, cc_;
  double zero_ = 0.0;
};

/// Plot-friendly sample of a CD: a psi grid with C, cc and density columns.
struct PlotData {
  std::vector<double> psi, c, cc, density;
};

/// Tabulate a CD on `points` nodes. The density comes from the attached grid
/// when present, from the closed form, or from a kernel estimate otherwise.
PlotData plot_data(const ConfidenceDistribution& cd, std::size_t points = 401);

}  // namespace rcd
