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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcd/models/sampler.hpp"
#include "rcd/simcd/simcd.hpp"

namespace rcd {

enum class DiscrepancyKind { ks, wasserstein1 };

const char* to_string(DiscrepancyKind k);
DiscrepancyKind discrepancy_from_string(const std::string& s);

/// Distance between the empirical CDFs of two samples (any sizes).
double distance(DiscrepancyKind kind, std::span<const double> x, std::span<const double> y);
/// Same, for samples already sorted ascending.
double distance_sorted(DiscrepancyKind kind, std::span<const double> x, std::span<const double> y);

struct ReferenceSpec {
  std::optional<double> theta_ref;  // default: upper end of the proposal range
  std::optional<std::size_t> size;  // default: n
};

/// Semimetric CD for the location of N(theta, sigma^2) data: accept-reject sampling with
/// t(y) = -d(y, y_ref), i.e. theta* is accepted when its pseudo-sample is at
/// least as close to the reference sample as the observed one.
struct NpcdConfig {
  DiscrepancyKind kind = DiscrepancyKind::wasserstein1;
  ReferenceSpec reference;
  Range proposal{-3.0, 3.0};
  double sigma = 1.0;
  std::size_t R = 4000;
  std::size_t bins = 200;
  double threshold = 0.05;       // PAVA adjustment mass above which no proper CD is claimed
  std::size_t density_size = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct NpcdResult {
  SigResult sig;
  std::optional<ConfidenceDensity> density;  // sampled confidence density, when the CD is proper
  double theta_ref = 0.0;
  double d_obs = 0.0;
  std::vector<double> y_ref;
  double saturated_fraction = 0.0;  // proposals whose distance is tied at its maximum
  bool low_discrimination = false;

  const ConfidenceDistribution& cd() const noexcept { return sig.cd; }
};

NpcdResult semimetric_cd(const NpcdConfig& cfg, std::span<const double> y_obs);

struct ShiftRow {
  double theta_ref = 0.0;
  double median_clean = 0.0;
  double median_contaminated = 0.0;
  double shift = 0.0;
};

/// Confidence medians on the clean and contaminated versions of one base
/// sample (shared seeds), for each reference location in the sweep.
std::vector<ShiftRow> contamination_shift(const NpcdConfig& cfg, const DatasetSpec& spec,
                                          const std::vector<double>& theta_refs);

}  // namespace rcd
