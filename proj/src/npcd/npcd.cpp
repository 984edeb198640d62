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

#include "rcd/npcd/npcd.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "rcd/core/error.hpp"
#include "rcd/core/parallel.hpp"
#include "rcd/core/rng.hpp"

namespace rcd {

const char* to_string(DiscrepancyKind k) { return k == DiscrepancyKind::ks ? "ks" : "wasserstein1"; }

DiscrepancyKind discrepancy_from_string(const std::string& s) {
  if (s == "ks") return DiscrepancyKind::ks;
  if (s == "wasserstein1" || s == "wasserstein") return DiscrepancyKind::wasserstein1;
  throw ConfigError(fmt::format("unknown discrepancy '{}'", s));
}

double distance_sorted(DiscrepancyKind kind, std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ArgumentError("distance needs two non-empty samples");
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  if (kind == DiscrepancyKind::wasserstein1 && x.size() == y.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s / nx;
  }
  // Sweep the merged breakpoints; between consecutive ones both CDFs are flat.
  // CDF gaps as |i ny - j nx| / (nx ny) in integers, so equal-size ties are exact.
  const double nxy = nx * ny;
  auto gap = [&](std::size_t i, std::size_t j) {
    const std::size_t a = i * y.size(), b = j * x.size();
    return static_cast<double>(a > b ? a - b : b - a) / nxy;
  };
  std::size_t i = 0, j = 0;
  double ks = 0.0, w1 = 0.0;
  double prev = std::min(x[0], y[0]);
  while (i < x.size() || j < y.size()) {
    const double next = j >= y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    w1 += (next - prev) * gap(i, j);
    while (i < x.size() && x[i] == next) ++i;
    while (j < y.size() && y[j] == next) ++j;
    ks = std::max(ks, gap(i, j));
    prev = next;
  }
  return kind == DiscrepancyKind::ks ? ks : w1;
}

double distance(DiscrepancyKind kind, std::span<const double> x, std::span<const double> y) {
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return distance_sorted(kind, a, b);
}

NpcdResult semimetric_cd(const NpcdConfig& cfg, std::span<const double> y_obs) {
  if (y_obs.empty()) throw ArgumentError("semimetric CD needs observations");
  if (!(cfg.proposal.lo < cfg.proposal.hi)) throw ConfigError("proposal range is degenerate");
  if (!(cfg.sigma > 0.0)) throw ConfigError("model sigma must be positive");
  if (cfg.R < 1) throw ConfigError("number of proposals must be at least 1");
  const std::size_t n = y_obs.size();

  const double theta_ref = cfg.reference.theta_ref.value_or(cfg.proposal.hi);
  const std::size_t m = cfg.reference.size.value_or(n);
  if (m < 1) throw ConfigError("reference sample size must be positive");
  Rng ref_rng(derive_seed(cfg.seed, {0x7ef}));
  std::vector<double> y_ref(m);
  for (double& v : y_ref) v = ref_rng.normal(theta_ref, cfg.sigma);
  std::sort(y_ref.begin(), y_ref.end());

  std::vector<double> obs(y_obs.begin(), y_obs.end());
  std::sort(obs.begin(), obs.end());
  const double d_obs = distance_sorted(cfg.kind, obs, y_ref);

  ProposalRun run;
  run.psi_range = cfg.proposal;
  run.psi.assign(cfg.R, 0.0);
  run.t.assign(1, std::vector<double>(cfg.R, 0.0));
  run.t_obs = {-d_obs};
  parallel_for(cfg.R, cfg.workers, [&](std::size_t j) {
    Rng rng(derive_seed(cfg.seed, {0xabc0, j}));
    const double theta = rng.uniform(cfg.proposal.lo, cfg.proposal.hi);
    std::vector<double> ys(n);
    for (double& v : ys) v = rng.normal(theta, cfg.sigma);
    std::sort(ys.begin(), ys.end());
    run.psi[j] = theta;
    run.t[0][j] = -distance_sorted(cfg.kind, ys, y_ref);
  });

  // Ties at the largest distance carry no information about theta.
  const double dmax = -*std::min_element(run.t[0].begin(), run.t[0].end());
  const auto tied = std::count_if(run.t[0].begin(), run.t[0].end(), [&](double t) { return -t >= dmax - 1e-12; });
  const double saturated = static_cast<double>(tied) / static_cast<double>(cfg.R);

  SigResult sig = sig_from(run, 0, cfg.bins, cfg.threshold);
  std::optional<ConfidenceDensity> density;
  if (!sig.non_monotone) density = density_from_cd(sig.cd, cfg.density_size);
  return NpcdResult{std::move(sig), std::move(density), theta_ref, d_obs, std::move(y_ref), saturated, saturated > 0.5};
}

std::vector<ShiftRow> contamination_shift(const NpcdConfig& cfg, const DatasetSpec& spec,
                                          const std::vector<double>& theta_refs) {
  DatasetSpec clean_spec = spec;
  clean_spec.contamination.fraction = 0.0;
  clean_spec.contamination.mechanism = ContaminationMechanism::none;
  const Dataset clean = sample(clean_spec);
  const Dataset dirty = sample(spec);
  std::vector<ShiftRow> rows;
  for (double ref : theta_refs) {
    NpcdConfig c = cfg;
    c.reference.theta_ref = ref;
    const double mc = semimetric_cd(c, std::span<const double>(clean.y.data(), clean.y.size())).cd().median();
    const double md = semimetric_cd(c, std::span<const double>(dirty.y.data(), dirty.y.size())).cd().median();
    rows.push_back({ref, mc, md, md - mc});
  }
  return rows;
}

}  // namespace rcd
