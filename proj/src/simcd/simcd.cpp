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

#include "rcd/simcd/simcd.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcd/core/error.hpp"
#include "rcd/core/parallel.hpp"
#include "rcd/core/rng.hpp"
#include "rcd/core/stats.hpp"
#include "rcd/mest/solve.hpp"

namespace rcd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_range(const Range& r, const char* what) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo < r.hi))
    throw ConfigError(fmt::format("{} proposal range [{}, {}] is degenerate", what, r.lo, r.hi));
}

double median_summary(const Dataset& d) {
  switch (d.kind) {
    case DatasetKind::one_sample: return stats::median(std::span<const double>(d.y.data(), d.y.size()));
    case DatasetKind::two_sample: {
      const auto s = group_values(d, 1), n = group_values(d, 0);
      return stats::median(s) - stats::median(n);
    }
    case DatasetKind::regression: return solve(EstimatingFunction::median_sign(), d).psi();
  }
  return kNaN;
}

// One summary statistic, prepared on the observed data.
class Summarizer {
 public:
  Summarizer(const SummaryStatistic& s, const Dataset& obs) : s_(s) {
    switch (s.kind) {
      case SummaryKind::m_estimator: t_obs_ = solve(s.ef, obs).psi(); break;
      case SummaryKind::median_difference: t_obs_ = median_summary(obs); break;
      case SummaryKind::profile_estimating_equation: {
        // g_psi at psi~ of the observed data and the proposed nuisance
        // values, optionally with the nuisance directions projected out.
        const Fit fit = solve(s.ef, obs);
        psi_obs_ = fit.psi();
        const GodambeEstimates ge = godambe(s.ef, obs, fit.theta);
        const Eigen::Index k = ge.K.rows();
        coef_ = Eigen::VectorXd::Zero(k);
        coef_(0) = 1.0;
        if (k > 1 && s.project_nuisance) {
          const Eigen::MatrixXd Kll = ge.K.bottomRightCorner(k - 1, k - 1);
          const Eigen::VectorXd Kpl = ge.K.row(0).tail(k - 1).transpose();
          coef_.tail(k - 1) = -Kll.transpose().fullPivLu().solve(Kpl);
        }
        sqrt_n_ = std::sqrt(static_cast<double>(obs.n()));
        t_obs_ = coef_.dot(g_sum(s.ef, obs, fit.theta)) / sqrt_n_;
        break;
      }
    }
  }

  double t_obs() const noexcept { return t_obs_; }

  // beta_star holds (psi*, lambda*), sigma_star the proposed scale.
  double operator()(const Dataset& ystar, const Eigen::VectorXd& beta_star, double sigma_star) const {
    try {
      switch (s_.kind) {
        case SummaryKind::m_estimator: return solve(s_.ef, ystar).psi();
        case SummaryKind::median_difference: return median_summary(ystar);
        case SummaryKind::profile_estimating_equation: {
          const Eigen::Index p = beta_star.size();
          Eigen::VectorXd theta(s_.ef.dim(p));
          theta.head(p) = beta_star;
          theta(0) = psi_obs_;
          if (s_.ef.has_scale()) theta(p) = sigma_star;
          return coef_.dot(g_sum(s_.ef, ystar, theta)) / sqrt_n_;
        }
      }
    } catch (const Error&) {
      // dropped proposal
    }
    return kNaN;
  }

 private:
  SummaryStatistic s_;
  double t_obs_ = 0.0;
  double psi_obs_ = 0.0;
  double sqrt_n_ = 1.0;
  Eigen::VectorXd coef_;
};

}  // namespace

const char* to_string(SummaryKind k) {
  switch (k) {
    case SummaryKind::m_estimator: return "m_estimator";
    case SummaryKind::profile_estimating_equation: return "profile_estimating_equation";
    case SummaryKind::median_difference: return "median_difference";
  }
  return "?";
}

SummaryKind summary_kind_from_string(const std::string& s) {
  for (SummaryKind k :
       {SummaryKind::m_estimator, SummaryKind::profile_estimating_equation, SummaryKind::median_difference})
    if (s == to_string(k)) return k;
  throw ConfigError(fmt::format("unknown summary statistic '{}'", s));
}

void ProposalSpec::validate(const Dataset& d) const {
  if (R < 1) throw ConfigError("number of proposals must be at least 1");
  check_range(psi, "psi");
  if (static_cast<Eigen::Index>(nuisance.size()) != d.p() - 1)
    throw ConfigError(fmt::format("proposal has {} nuisance ranges, the {} model needs {}", nuisance.size(),
                                  to_string(d.kind), d.p() - 1));
  for (const Range& r : nuisance) check_range(r, "nuisance");
  if (sigma) {
    check_range(*sigma, "sigma");
    if (!(sigma->lo > 0.0)) throw ConfigError("sigma proposal range must be positive");
  } else if (!(sigma_fixed > 0.0)) {
    throw ConfigError("fixed sigma must be positive");
  }
}

std::size_t ProposalRun::dropped(std::size_t s) const {
  return static_cast<std::size_t>(std::count_if(t.at(s).begin(), t.at(s).end(), [](double v) { return std::isnan(v); }));
}

ProposalRun run_proposals(const Dataset& obs, const ProposalSpec& proposal, const std::vector<SummaryStatistic>& summaries,
                          std::uint64_t seed, unsigned workers) {
  proposal.validate(obs);
  std::vector<Summarizer> sums;
  for (const auto& s : summaries) sums.emplace_back(s, obs);

  ProposalRun run;
  run.psi_range = proposal.psi;
  run.psi.assign(proposal.R, 0.0);
  run.t.assign(sums.size(), std::vector<double>(proposal.R, kNaN));
  for (const auto& s : sums) run.t_obs.push_back(s.t_obs());

  const Eigen::Index p = obs.p();
  parallel_for(proposal.R, workers, [&](std::size_t j) {
    Rng rng(derive_seed(seed, {0xabc0, j}));
    Eigen::VectorXd beta(p);
    beta(0) = rng.uniform(proposal.psi.lo, proposal.psi.hi);
    for (Eigen::Index k = 1; k < p; ++k) beta(k) = rng.uniform(proposal.nuisance[k - 1].lo, proposal.nuisance[k - 1].hi);
    const double sigma = proposal.sigma ? rng.uniform(proposal.sigma->lo, proposal.sigma->hi) : proposal.sigma_fixed;
    Eigen::VectorXd y = obs.X * beta;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * rng.normal();
    const Dataset ystar = with_response(obs, std::move(y));
    run.psi[j] = beta(0);
    for (std::size_t s = 0; s < sums.size(); ++s) run.t[s][j] = sums[s](ystar, beta, sigma);
  });
  return run;
}

AbcResult abc_from(const ProposalRun& run, std::size_t summary, const AbcConfig& cfg) {
  if (!(cfg.tolerance > 0.0)) throw ConfigError("ABC tolerance must be positive");
  const std::vector<double>& t = run.t.at(summary);
  const double t_obs = run.t_obs.at(summary);

  double scale = 1.0;
  if (cfg.distance == Distance::scaled_absolute) {
    std::vector<double> pilot;
    for (std::size_t j = 0; j < t.size() && pilot.size() < std::max<std::size_t>(cfg.pilot, 2); ++j)
      if (!std::isnan(t[j])) pilot.push_back(t[j]);
    double s = pilot.size() >= 2 ? 1.4826 * stats::mad(pilot) : 0.0;
    if (!(s > 0.0) && pilot.size() >= 2) s = stats::sd(pilot);
    if (s > 0.0) scale = s;
  }

  std::vector<double> accepted;
  double min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (std::isnan(t[j])) continue;
    const double dist = std::abs(t[j] - t_obs) / scale;
    min_distance = std::min(min_distance, dist);
    if (dist <= cfg.tolerance) accepted.push_back(run.psi[j]);
  }
  if (accepted.empty())
    throw NumericError(fmt::format("no proposal accepted: tolerance too tight or proposal mis-centered (min distance {})",
                                   min_distance));
  // Uniform proposals: the 1/p resampling step leaves the accepted set as is.
  std::sort(accepted.begin(), accepted.end());
  const double rate = static_cast<double>(accepted.size()) / static_cast<double>(t.size());
  return AbcResult{ConfidenceDistribution::empirical(accepted),
                   ConfidenceDensity::from_sample(accepted),
                   accepted,
                   t.size(),
                   run.dropped(summary),
                   rate,
                   min_distance,
                   scale};
}

AbcResult abc_cd(const Dataset& obs, const ProposalSpec& proposal, const SummaryStatistic& summary, const AbcConfig& cfg,
                 std::uint64_t seed, unsigned workers) {
  return abc_from(run_proposals(obs, proposal, {summary}, seed, workers), 0, cfg);
}

SigResult sig_from(const ProposalRun& run, std::size_t summary, std::size_t bins, double threshold) {
  if (bins < 2) throw ConfigError("significance CD needs at least 2 bins");
  const std::vector<double>& t = run.t.at(summary);
  const double t_obs = run.t_obs.at(summary);
  const double lo = run.psi_range.lo, hi = run.psi_range.hi;
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<double> accepted, acc(bins, 0.0), cnt(bins, 0.0);
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (std::isnan(t[j])) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, (run.psi[j] - lo) / width)));
    cnt[b] += 1.0;
    if (t[j] >= t_obs) {
      acc[b] += 1.0;
      accepted.push_back(run.psi[j]);
    }
  }
  if (accepted.empty()) throw NumericError("no proposal accepted: proposal range lies below the observed summary");
  std::sort(accepted.begin(), accepted.end());

  std::vector<double> centers, freq, count;
  for (std::size_t b = 0; b < bins; ++b) {
    if (cnt[b] == 0.0) continue;
    centers.push_back(lo + (static_cast<double>(b) + 0.5) * width);
    freq.push_back(acc[b] / cnt[b]);
    count.push_back(cnt[b]);
  }
  if (centers.size() < 2) throw NumericError("significance CD needs at least 2 populated bins");
  ConfidenceDistribution cd = monotonize(centers, freq, count);
  const bool flagged = cd.adjustment_mass() > threshold;
  std::optional<ConfidenceCurve> curve;
  if (flagged) curve = ConfidenceCurve::from_raw(centers, freq);
  const double rate = static_cast<double>(accepted.size()) / static_cast<double>(t.size());
  return SigResult{std::move(cd), std::move(accepted), std::move(centers), std::move(freq), std::move(count),
                   t.size(), run.dropped(summary), rate, flagged, std::move(curve)};
}

SigResult sig_cd(const Dataset& obs, const ProposalSpec& proposal, const SummaryStatistic& summary, std::uint64_t seed,
                 unsigned workers, std::size_t bins) {
  return sig_from(run_proposals(obs, proposal, {summary}, seed, workers), 0, bins);
}

}  // namespace rcd
