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
#include <string>
#include <vector>

#include "rcd/cd/curve.hpp"
#include "rcd/cd/distribution.hpp"
#include "rcd/mest/estimating_function.hpp"
#include "rcd/models/dataset.hpp"

namespace rcd {

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Independent uniform proposals for (psi, nuisance coefficients, sigma).
struct ProposalSpec {
  Range psi{-3.0, 9.0};
  std::vector<Range> nuisance{{110.0, 130.0}};  // one per nuisance coefficient
  std::optional<Range> sigma = Range{1.0, 8.0};  // absent: sigma fixed
  double sigma_fixed = 1.0;
  std::size_t R = 4000;

  void validate(const Dataset& d) const;
};

enum class SummaryKind { m_estimator, profile_estimating_equation, median_difference };

const char* to_string(SummaryKind k);
SummaryKind summary_kind_from_string(const std::string& s);

struct SummaryStatistic {
  SummaryKind kind = SummaryKind::profile_estimating_equation;
  EstimatingFunction ef = EstimatingFunction::huber(1.345);
  /// profile_estimating_equation only: subtract the projection of g_psi on
  /// the nuisance components (g_psi - K_pl K_ll^-1 g_lambda). Off by default,
  /// which uses g_psi itself.
  bool project_nuisance = false;
};

enum class Distance { absolute, scaled_absolute };

struct AbcConfig {
  double tolerance = 0.1;
  Distance distance = Distance::scaled_absolute;
  std::size_t pilot = 1000;  // proposals used for the robust scale of t
};

/// Proposals and their simulated summaries, shared by both accept-reject
/// schemes. t[s][j] is NaN when summary s could not be computed for
/// proposal j (solver failure).
struct ProposalRun {
  Range psi_range;
  std::vector<double> psi;
  std::vector<std::vector<double>> t;
  std::vector<double> t_obs;

  std::size_t dropped(std::size_t s) const;
};

/// Draw R proposals, simulate pseudo-data on the observed design from the
/// normal model, and evaluate each summary. Proposal j uses its own derived
/// seed, so results do not depend on `workers`.
ProposalRun run_proposals(const Dataset& obs, const ProposalSpec& proposal, const std::vector<SummaryStatistic>& summaries,
                          std::uint64_t seed, unsigned workers = 1);

struct AbcResult {
  ConfidenceDistribution cd;     // empirical, over the accepted psi values
  ConfidenceDensity density;
  std::vector<double> accepted;  // sorted
  std::size_t proposals = 0;
  std::size_t dropped = 0;
  double acceptance_rate = 0.0;
  double min_distance = 0.0;
  double scale = 1.0;            // divisor applied to |t* - t_obs|
};

AbcResult abc_from(const ProposalRun& run, std::size_t summary, const AbcConfig& cfg);
AbcResult abc_cd(const Dataset& obs, const ProposalSpec& proposal, const SummaryStatistic& summary, const AbcConfig& cfg,
                 std::uint64_t seed, unsigned workers = 1);

struct SigResult {
  ConfidenceDistribution cd;  // per-bin acceptance frequencies, monotonized
  std::vector<double> accepted;
  std::vector<double> bin_centers, bin_freq, bin_count;  // non-empty bins only
  std::size_t proposals = 0;
  std::size_t dropped = 0;
  double acceptance_rate = 0.0;
  bool non_monotone = false;  // adjustment mass above the threshold
  std::optional<ConfidenceCurve> curve;  // raw curve, set when non_monotone
};

SigResult sig_from(const ProposalRun& run, std::size_t summary, std::size_t bins = 200, double threshold = 0.05);
SigResult sig_cd(const Dataset& obs, const ProposalSpec& proposal, const SummaryStatistic& summary, std::uint64_t seed,
                 unsigned workers = 1, std::size_t bins = 200);

}  // namespace rcd
