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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcd/cd/distribution.hpp"
#include "rcd/models/dataset.hpp"
#include "rcd/models/sampler.hpp"
#include "rcd/simcd/simcd.hpp"

namespace rcd {

enum class Method {
  wald_mean,     // exact t CD for the mean difference (OLS coefficient)
  wald_mtest,    // Wald pivot of the Huber M-estimator
  abc_median,
  abc_mee,
  abc_mest,
  sig_median,    // "CDensity": significance-based simulation CD
  sig_mee,
  sig_mest,
  boot_basic,
  boot_norm,
  boot_perc,
};

/// Display names as in the tables: "Wald/Mean", "ABC/M-EE", "CDensity/M-est",
/// "Boot/Perc", ...
const char* to_string(Method m);
/// snake_case name, used in file names.
const char* slug(Method m);
/// Accepts display names and snake_case names, case-insensitively. Unknown
/// names raise ConfigError listing the valid ones.
Method method_from_string(const std::string& s);
std::vector<Method> parse_methods(const std::string& comma_list);
const std::vector<Method>& all_methods();
bool regression_capable(Method m);
std::vector<Method> regression_methods();

struct MethodConfig {
  double huber_c = 1.345;
  bool welch = false;             // Wald/Mean on two-sample data
  bool project_nuisance = false;  // M-EE summary variant
  std::optional<ProposalSpec> proposal;  // absent: default_proposal()
  std::size_t proposals = 4000;   // R when `proposal` is absent
  AbcConfig abc;
  std::size_t bins = 200;
  double nonmonotone_threshold = 0.05;
  std::size_t boot_B = 1000;
  unsigned workers = 1;
};

/// Two-sample data: the study's ranges psi in [-3, 9], mu_N in [110, 130],
/// sigma in [1, 8]. Other layouts: centered on the ML fit, psi~ +- 6 se for
/// every coefficient and sigma in [sigma~/3, 2 sigma~].
ProposalSpec default_proposal(const Dataset& d, std::size_t R = 4000);

struct MethodOutcome {
  Method method;
  std::optional<ConfidenceDistribution> cd;
  std::string error;  // set when cd is empty
  double acceptance_rate = -1.0;  // simulation methods only
  bool non_monotone = false;
};

/// Build the CD of every requested method on one dataset. Simulation methods
/// share one proposal run, bootstrap methods one set of replicates. Failures
/// are captured per method, never thrown.
std::vector<MethodOutcome> build_cds(const Dataset& d, const std::vector<Method>& methods, const MethodConfig& cfg,
                                     std::uint64_t seed);

// ---- simulation study ------------------------------------------------------

struct Scenario {
  std::size_t n_total = 40;
  double contamination = 0.0;
};

std::string to_string(const Scenario& s);

struct StudySpec {
  std::vector<Scenario> scenarios{{40, 0.0}, {80, 0.0}, {40, 0.1}, {80, 0.1}};
  std::vector<Method> methods = all_methods();
  std::size_t replicates = 2000;
  double psi0 = 2.6;
  double delta = 4.0;
  double alpha = 0.05;
  double mu_N = 120.0;
  double sigma = 4.0;
  double contamination_scale = 10.0;
  double contamination_direction = -1.0;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // replicates in parallel; 0 = all cores
  MethodConfig method;

  void validate() const;
};

/// Data of replicate `r` in scenario `s`; clean and contaminated scenarios
/// with the same n and replicate share their base draws.
DatasetSpec replicate_spec(const StudySpec& spec, const Scenario& s, std::size_t r);
std::uint64_t replicate_seed(const StudySpec& spec, std::size_t scenario, std::size_t r);

struct MethodStats {
  Method method;
  std::size_t scenario = 0;
  std::size_t replicates = 0;  // attempted
  std::size_t failures = 0;
  std::size_t non_monotone = 0;
  double coverage90 = 0.0, coverage95 = 0.0;
  double bias = 0.0;      // mean of (median - psi0)
  double abs_bias = 0.0;  // |bias|
  double po = 0.0, pu = 0.0;
  double type1 = 0.0;     // psi0 outside the equi-tailed 1 - alpha interval
  double reject_ni = 0.0; // 1 - C(delta) < alpha: rejection of H0 psi >= delta
  double evidence = 0.0;  // mean of 1 - C(delta)

  std::size_t used() const { return replicates - failures; }
  double failure_rate() const { return replicates ? static_cast<double>(failures) / static_cast<double>(replicates) : 0.0; }
};

struct StudyReport {
  StudySpec spec;
  std::vector<MethodStats> cells;  // scenario-major, methods in spec order

  const MethodStats& at(Method m, std::size_t scenario) const;
};

using Progress = std::function<void(std::size_t done, std::size_t total)>;

StudyReport run_study(const StudySpec& spec, const Progress& progress = {});

/// One row per method x scenario, proportions throughout.
void write_study_csv(std::ostream& os, const StudyReport& r);
/// Sample sizes present in the report, in scenario order.
std::vector<std::size_t> study_sizes(const StudyReport& r);
/// Coverage (percent, 95% then 90%) for the scenarios with total size n,
/// one column block per contamination level.
void write_coverage_table(std::ostream& os, const StudyReport& r, std::size_t n);
/// |b|, PU, PO and type-I error per contamination level at total size n.
void write_stability_table(std::ostream& os, const StudyReport& r, std::size_t n);

// ---- evidence --------------------------------------------------------------

struct EvidenceCell {
  std::optional<double> value;  // 1 - C(delta)
  std::string error;
};

struct EvidenceTable {
  std::vector<std::string> datasets;
  std::vector<double> deltas;
  std::vector<Method> methods;
  std::vector<EvidenceCell> cells;  // [method][dataset][delta], row-major

  const EvidenceCell& at(std::size_t method, std::size_t dataset, std::size_t delta) const;
  const EvidenceCell& at(Method m, std::size_t dataset, std::size_t delta = 0) const;
};

/// 1 - C(delta) for every method on every dataset; failures leave the cell
/// unavailable. Dataset k uses seed derive_seed(seed, {k}).
EvidenceTable evidence_table(const std::vector<std::pair<std::string, Dataset>>& data, const std::vector<Method>& methods,
                             const std::vector<double>& deltas, const MethodConfig& cfg, std::uint64_t seed);

/// Clean and contaminated datasets sharing base draws, as in the study.
std::pair<Dataset, Dataset> evidence_pair(const StudySpec& spec, const Scenario& contaminated, std::uint64_t seed);

inline const std::vector<double>& default_margins() {
  static const std::vector<double> m{-3.5, -4.0, -4.5, -5.0, -5.3};
  return m;
}

/// Evidence for beta2 > delta on regression data. Methods must be
/// regression-capable (ConfigError otherwise).
EvidenceTable superiority_analysis(const Dataset& d, const std::vector<double>& margins = default_margins(),
                                   const std::vector<Method>& methods = regression_methods(), const MethodConfig& cfg = {},
                                   std::uint64_t seed = 1);

void write_evidence_csv(std::ostream& os, const EvidenceTable& t);
void write_evidence_table(std::ostream& os, const EvidenceTable& t);

}  // namespace rcd
