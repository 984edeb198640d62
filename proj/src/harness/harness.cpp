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

#include "rcd/harness/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <mutex>
#include <ostream>

#include "rcd/bootcd/bootcd.hpp"
#include "rcd/core/error.hpp"
#include "rcd/core/parallel.hpp"
#include "rcd/core/rng.hpp"
#include "rcd/mest/solve.hpp"
#include "rcd/pivots/pivots.hpp"

namespace rcd {

namespace {

struct MethodName {
  Method m;
  const char* display;
  const char* snake;
};

constexpr MethodName kNames[] = {
    {Method::wald_mean, "Wald/Mean", "wald_mean"},
    {Method::wald_mtest, "Wald/M-test", "wald_mtest"},
    {Method::abc_median, "ABC/Median", "abc_median"},
    {Method::abc_mee, "ABC/M-EE", "abc_mee"},
    {Method::abc_mest, "ABC/M-est", "abc_mest"},
    {Method::sig_median, "CDensity/Median", "cdensity_median"},
    {Method::sig_mee, "CDensity/M-EE", "cdensity_mee"},
    {Method::sig_mest, "CDensity/M-est", "cdensity_mest"},
    {Method::boot_basic, "Boot/Basic", "boot_basic"},
    {Method::boot_norm, "Boot/Norm", "boot_norm"},
    {Method::boot_perc, "Boot/Perc", "boot_perc"},
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool is_abc(Method m) { return m == Method::abc_median || m == Method::abc_mee || m == Method::abc_mest; }
bool is_sig(Method m) { return m == Method::sig_median || m == Method::sig_mee || m == Method::sig_mest; }
bool is_boot(Method m) { return m == Method::boot_basic || m == Method::boot_norm || m == Method::boot_perc; }

SummaryKind summary_of(Method m) {
  switch (m) {
    case Method::abc_median:
    case Method::sig_median: return SummaryKind::median_difference;
    case Method::abc_mee:
    case Method::sig_mee: return SummaryKind::profile_estimating_equation;
    default: return SummaryKind::m_estimator;
  }
}

BootVariant variant_of(Method m) {
  if (m == Method::boot_basic) return BootVariant::basic;
  if (m == Method::boot_norm) return BootVariant::normal;
  return BootVariant::percentile;
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& n : kNames)
    if (n.m == m) return n.display;
  return "?";
}

const char* slug(Method m) {
  for (const auto& n : kNames)
    if (n.m == m) return n.snake;
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> all = [] {
    std::vector<Method> v;
    for (const auto& n : kNames) v.push_back(n.m);
    return v;
  }();
  return all;
}

Method method_from_string(const std::string& s) {
  const std::string key = lower(trim(s));
  for (const auto& n : kNames)
    if (key == lower(n.display) || key == n.snake) return n.m;
  std::string valid;
  for (const auto& n : kNames) valid += fmt::format("{}{}", valid.empty() ? "" : ", ", n.display);
  throw ConfigError(fmt::format("unknown method '{}'; valid methods: {}", s, valid));
}

std::vector<Method> parse_methods(const std::string& comma_list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= comma_list.size()) {
    const auto end = std::min(comma_list.find(',', start), comma_list.size());
    const std::string item = trim(comma_list.substr(start, end - start));
    if (!item.empty()) {
      const Method m = method_from_string(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("method list is empty");
  return out;
}

bool regression_capable(Method m) {
  return m == Method::wald_mean || m == Method::wald_mtest || m == Method::abc_mest || m == Method::abc_mee ||
         m == Method::sig_mest || m == Method::sig_mee;
}

std::vector<Method> regression_methods() {
  std::vector<Method> v;
  for (Method m : all_methods())
    if (regression_capable(m)) v.push_back(m);
  return v;
}

ProposalSpec default_proposal(const Dataset& d, std::size_t R) {
  ProposalSpec p;
  p.R = R;
  if (d.kind == DatasetKind::two_sample) return p;
  const EstimatingFunction ml = EstimatingFunction::ml_score();
  const Fit fit = solve(ml, d);
  const GodambeEstimates ge = godambe(ml, d, fit.theta);
  auto span = [&](Eigen::Index j) {
    const double se = std::sqrt(ge.V(j, j) / ge.n);
    return Range{fit.theta(j) - 6.0 * se, fit.theta(j) + 6.0 * se};
  };
  p.psi = span(0);
  p.nuisance.clear();
  for (Eigen::Index j = 1; j < d.p(); ++j) p.nuisance.push_back(span(j));
  p.sigma = Range{fit.sigma() / 3.0, 2.0 * fit.sigma()};
  return p;
}

std::vector<MethodOutcome> build_cds(const Dataset& d, const std::vector<Method>& methods, const MethodConfig& cfg,
                                     std::uint64_t seed) {
  std::vector<MethodOutcome> out;
  out.reserve(methods.size());
  for (Method m : methods) out.push_back(MethodOutcome{m, std::nullopt, {}});

  auto capture = [](MethodOutcome& o, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      o.cd.reset();
      o.error = e.what();
    }
  };

  // Summaries needed by the simulation methods, in first-use order.
  std::vector<SummaryKind> kinds;
  for (Method m : methods)
    if ((is_abc(m) || is_sig(m)) && std::find(kinds.begin(), kinds.end(), summary_of(m)) == kinds.end())
      kinds.push_back(summary_of(m));
  std::optional<ProposalRun> run;
  std::string run_error;
  if (!kinds.empty()) {
    try {
      std::vector<SummaryStatistic> summaries;
      for (SummaryKind k : kinds)
        summaries.push_back(SummaryStatistic{k, EstimatingFunction::huber(cfg.huber_c), cfg.project_nuisance});
      const ProposalSpec prop = cfg.proposal ? *cfg.proposal : default_proposal(d, cfg.proposals);
      run = run_proposals(d, prop, summaries, derive_seed(seed, {1}), cfg.workers);
    } catch (const std::exception& e) {
      run_error = e.what();
    }
  }

  std::optional<BootReplicates> reps;
  std::string boot_error;
  if (std::any_of(methods.begin(), methods.end(), is_boot)) {
    try {
      BootstrapConfig bc;
      bc.B = cfg.boot_B;
      bc.seed = derive_seed(seed, {2});
      bc.workers = cfg.workers;
      reps = boot_replicates(bc, d);
    } catch (const std::exception& e) {
      boot_error = e.what();
    }
  }

  for (MethodOutcome& o : out) {
    const Method m = o.method;
    capture(o, [&] {
      if (m == Method::wald_mean) {
        o.cd = exact_t_cd(d, cfg.welch);
      } else if (m == Method::wald_mtest) {
        o.cd = cd_from_pivot(PivotKind::wald_robust, EstimatingFunction::huber(cfg.huber_c), d);
      } else if (is_abc(m) || is_sig(m)) {
        if (!run) throw NumericError(run_error);
        const std::size_t s = static_cast<std::size_t>(
            std::find(kinds.begin(), kinds.end(), summary_of(m)) - kinds.begin());
        if (is_abc(m)) {
          AbcResult r = abc_from(*run, s, cfg.abc);
          o.acceptance_rate = r.acceptance_rate;
          o.cd = std::move(r.cd);
        } else {
          SigResult r = sig_from(*run, s, cfg.bins, cfg.nonmonotone_threshold);
          o.acceptance_rate = r.acceptance_rate;
          o.non_monotone = r.non_monotone;
          o.cd = std::move(r.cd);
        }
      } else {
        if (!reps) throw NumericError(boot_error);
        o.cd = boot_cd_from(*reps, variant_of(m));
      }
    });
  }
  return out;
}

// ---- study -------------------------------------------------------------------

std::string to_string(const Scenario& s) {
  return fmt::format("n={}, {}%", s.n_total, std::round(s.contamination * 1000.0) / 10.0);
}

void StudySpec::validate() const {
  if (scenarios.empty()) throw ConfigError("study needs at least one scenario");
  for (const Scenario& s : scenarios) {
    if (s.n_total < 4 || s.n_total % 2) throw ConfigError(fmt::format("scenario n={} must be even and at least 4", s.n_total));
    if (!(s.contamination >= 0.0 && s.contamination < 1.0))
      throw ConfigError(fmt::format("contamination {} outside [0, 1)", s.contamination));
  }
  if (methods.empty()) throw ConfigError("study needs at least one method");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("alpha must lie in (0, 0.5)");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  if (!(contamination_scale > 0.0)) throw ConfigError("contamination scale must be positive");
  if (method.boot_B < 100) throw ConfigError("bootstrap needs B >= 100");
  if (method.proposals < 1) throw ConfigError("proposals must be at least 1");
  if (!(method.abc.tolerance > 0.0)) throw ConfigError("ABC tolerance must be positive");
  if (method.bins < 1) throw ConfigError("bins must be at least 1");
}

DatasetSpec replicate_spec(const StudySpec& spec, const Scenario& s, std::size_t r) {
  DatasetSpec ds;
  TwoSampleModel tm;
  tm.mu_N = spec.mu_N;
  tm.psi = spec.psi0;
  tm.sigma = spec.sigma;
  tm.n_per_group = s.n_total / 2;
  ds.model = tm;
  if (s.contamination > 0.0) {
    ds.contamination.fraction = s.contamination;
    ds.contamination.mechanism = ContaminationMechanism::half_cauchy_new_group;
    ds.contamination.scale = spec.contamination_scale;
    ds.contamination.direction = spec.contamination_direction;
  }
  ds.seed = derive_seed(spec.seed, {0xda7a, s.n_total, r});
  return ds;
}

std::uint64_t replicate_seed(const StudySpec& spec, std::size_t scenario, std::size_t r) {
  return derive_seed(spec.seed, {0x5eed, scenario, r});
}

const MethodStats& StudyReport::at(Method m, std::size_t scenario) const {
  for (const MethodStats& c : cells)
    if (c.method == m && c.scenario == scenario) return c;
  throw ArgumentError(fmt::format("no study cell for {} in scenario {}", to_string(m), scenario));
}

namespace {

struct Record {
  bool ok = false;
  bool nonmono = false;
  bool cov90 = false, cov95 = false, cov_alpha = false;
  double median = 0.0;
  double evidence = 0.0;
};

bool covers(const ConfidenceDistribution& cd, double level, double psi0) {
  const auto [lo, hi] = cd.interval(level);
  return lo <= psi0 && psi0 <= hi;
}

}  // namespace

StudyReport run_study(const StudySpec& spec, const Progress& progress) {
  spec.validate();
  const std::size_t S = spec.scenarios.size(), R = spec.replicates, M = spec.methods.size();
  std::vector<Record> rec(S * R * M);
  MethodConfig mc = spec.method;
  mc.workers = 1;  // parallelism is over replicates

  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(S * R, spec.workers, [&](std::size_t job) {
    const std::size_t s = job / R, r = job % R;
    const Dataset d = sample(replicate_spec(spec, spec.scenarios[s], r));
    const auto outcomes = build_cds(d, spec.methods, mc, replicate_seed(spec, s, r));
    for (std::size_t k = 0; k < M; ++k) {
      Record& x = rec[job * M + k];
      const MethodOutcome& o = outcomes[k];
      if (!o.cd) continue;
      try {
        const ConfidenceDistribution& cd = *o.cd;
        x.cov90 = covers(cd, 0.90, spec.psi0);
        x.cov95 = covers(cd, 0.95, spec.psi0);
        x.cov_alpha = covers(cd, 1.0 - spec.alpha, spec.psi0);
        x.median = cd.median();
        x.evidence = 1.0 - cd.evaluate(spec.delta);
        x.nonmono = o.non_monotone;
        x.ok = std::isfinite(x.median);
      } catch (const std::exception&) {
        x.ok = false;
      }
    }
    const std::size_t count = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(count, S * R);
    }
  });

  StudyReport report;
  report.spec = spec;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t k = 0; k < M; ++k) {
      MethodStats st;
      st.method = spec.methods[k];
      st.scenario = s;
      st.replicates = R;
      double n90 = 0, n95 = 0, nalpha = 0, sum_dev = 0, po = 0, pu = 0, ni = 0, ev = 0;
      for (std::size_t r = 0; r < R; ++r) {
        const Record& x = rec[(s * R + r) * M + k];
        if (!x.ok) {
          ++st.failures;
          continue;
        }
        st.non_monotone += x.nonmono;
        n90 += x.cov90;
        n95 += x.cov95;
        nalpha += x.cov_alpha;
        sum_dev += x.median - spec.psi0;
        po += x.median > spec.psi0;
        pu += x.median < spec.psi0;
        ni += x.evidence < spec.alpha;
        ev += x.evidence;
      }
      const double u = static_cast<double>(st.used());
      if (u > 0) {
        st.coverage90 = n90 / u;
        st.coverage95 = n95 / u;
        st.type1 = 1.0 - nalpha / u;
        st.bias = sum_dev / u;
        st.abs_bias = std::abs(st.bias);
        st.po = po / u;
        st.pu = pu / u;
        st.reject_ni = ni / u;
        st.evidence = ev / u;
      } else {
        const double nan = std::nan("");
        st.coverage90 = st.coverage95 = st.type1 = st.bias = st.abs_bias = st.po = st.pu = st.reject_ni = st.evidence = nan;
      }
      report.cells.push_back(st);
    }
  }
  return report;
}

namespace {

std::string num(double v, int digits = 6) {
  if (!std::isfinite(v)) return "NA";
  return fmt::format("{:.{}f}", v, digits);
}

std::size_t name_width(const std::vector<Method>& methods) {
  std::size_t w = 6;
  for (Method m : methods) w = std::max(w, std::string(to_string(m)).size());
  return w + 2;
}

}  // namespace

void write_study_csv(std::ostream& os, const StudyReport& r) {
  os << "method,n,contamination,replicates,failures,non_monotone,coverage90,coverage95,bias,abs_bias,po,pu,type1,"
        "reject_ni,evidence\n";
  for (const MethodStats& c : r.cells) {
    const Scenario& sc = r.spec.scenarios[c.scenario];
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(c.method), sc.n_total, sc.contamination,
                      c.replicates, c.failures, c.non_monotone, num(c.coverage90), num(c.coverage95), num(c.bias),
                      num(c.abs_bias), num(c.po), num(c.pu), num(c.type1), num(c.reject_ni), num(c.evidence));
  }
}

std::vector<std::size_t> study_sizes(const StudyReport& r) {
  std::vector<std::size_t> out;
  for (const Scenario& s : r.spec.scenarios)
    if (std::find(out.begin(), out.end(), s.n_total) == out.end()) out.push_back(s.n_total);
  return out;
}

namespace {

std::vector<std::size_t> scenarios_of(const StudyReport& r, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < r.spec.scenarios.size(); ++s)
    if (r.spec.scenarios[s].n_total == n) out.push_back(s);
  if (out.empty()) throw ArgumentError(fmt::format("no scenario with n={}", n));
  return out;
}

std::string pct(double contamination) { return fmt::format("{}%", std::round(contamination * 1000.0) / 10.0); }

}  // namespace

void write_coverage_table(std::ostream& os, const StudyReport& r, std::size_t n) {
  const auto sc = scenarios_of(r, n);
  const std::size_t w = name_width(r.spec.methods);
  os << fmt::format("Empirical coverage (%), n={}, {} replicates\n", n, r.spec.replicates);
  os << fmt::format("{:<{}}", "Contamination", w);
  for (std::size_t s : sc) os << fmt::format("{:>16}", pct(r.spec.scenarios[s].contamination));
  os << '\n' << fmt::format("{:<{}}", "Method", w);
  for (std::size_t i = 0; i < sc.size(); ++i) os << fmt::format("{:>8}{:>8}", "95% CI", "90% CI");
  os << '\n';
  for (Method m : r.spec.methods) {
    os << fmt::format("{:<{}}", to_string(m), w);
    for (std::size_t s : sc) {
      const MethodStats& c = r.at(m, s);
      os << fmt::format("{:>8}{:>8}", num(100.0 * c.coverage95, 1), num(100.0 * c.coverage90, 1));
    }
    os << '\n';
  }
}

void write_stability_table(std::ostream& os, const StudyReport& r, std::size_t n) {
  const auto sc = scenarios_of(r, n);
  const std::size_t w = name_width(r.spec.methods);
  os << fmt::format("Stability of confidence medians, n={}, {} replicates (type-I at alpha={})\n", n, r.spec.replicates,
                    r.spec.alpha);
  os << fmt::format("{:<{}}", "Contamination", w);
  for (std::size_t s : sc) os << fmt::format("{:>32}", pct(r.spec.scenarios[s].contamination));
  os << '\n' << fmt::format("{:<{}}", "Method", w);
  for (std::size_t i = 0; i < sc.size(); ++i) os << fmt::format("{:>8}{:>8}{:>8}{:>8}", "|b|", "PU", "PO", "type-I");
  os << '\n';
  for (Method m : r.spec.methods) {
    os << fmt::format("{:<{}}", to_string(m), w);
    for (std::size_t s : sc) {
      const MethodStats& c = r.at(m, s);
      os << fmt::format("{:>8}{:>8}{:>8}{:>8}", num(c.abs_bias, 2), num(c.pu, 2), num(c.po, 2), num(c.type1, 2));
    }
    os << '\n';
  }
}

// ---- evidence ------------------------------------------------------------------

const EvidenceCell& EvidenceTable::at(std::size_t method, std::size_t dataset, std::size_t delta) const {
  return cells.at((method * datasets.size() + dataset) * deltas.size() + delta);
}

const EvidenceCell& EvidenceTable::at(Method m, std::size_t dataset, std::size_t delta) const {
  const auto it = std::find(methods.begin(), methods.end(), m);
  if (it == methods.end()) throw ArgumentError(fmt::format("method {} not in the evidence table", to_string(m)));
  return at(static_cast<std::size_t>(it - methods.begin()), dataset, delta);
}

EvidenceTable evidence_table(const std::vector<std::pair<std::string, Dataset>>& data, const std::vector<Method>& methods,
                             const std::vector<double>& deltas, const MethodConfig& cfg, std::uint64_t seed) {
  if (data.empty()) throw ConfigError("evidence table needs at least one dataset");
  if (methods.empty()) throw ConfigError("method list is empty");
  if (deltas.empty()) throw ConfigError("evidence table needs at least one margin");
  EvidenceTable t;
  t.methods = methods;
  t.deltas = deltas;
  for (const auto& [label, d] : data) t.datasets.push_back(label);
  t.cells.resize(methods.size() * data.size() * deltas.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto outcomes = build_cds(data[k].second, methods, cfg, derive_seed(seed, {k}));
    for (std::size_t m = 0; m < methods.size(); ++m) {
      for (std::size_t j = 0; j < deltas.size(); ++j) {
        EvidenceCell& cell = t.cells[(m * data.size() + k) * deltas.size() + j];
        if (!outcomes[m].cd) {
          cell.error = outcomes[m].error;
          continue;
        }
        try {
          cell.value = 1.0 - outcomes[m].cd->evaluate(deltas[j]);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
    }
  }
  return t;
}

std::pair<Dataset, Dataset> evidence_pair(const StudySpec& spec, const Scenario& contaminated, std::uint64_t seed) {
  StudySpec s = spec;
  s.seed = seed;
  const Scenario clean{contaminated.n_total, 0.0};
  return {sample(replicate_spec(s, clean, 0)), sample(replicate_spec(s, contaminated, 0))};
}

EvidenceTable superiority_analysis(const Dataset& d, const std::vector<double>& margins, const std::vector<Method>& methods,
                                   const MethodConfig& cfg, std::uint64_t seed) {
  if (d.kind != DatasetKind::regression) throw ConfigError("superiority analysis needs regression data (y_fu,y_bl,p)");
  for (Method m : methods)
    if (!regression_capable(m)) throw ConfigError(fmt::format("method {} is not available for regression data", to_string(m)));
  return evidence_table({{"data", d}}, methods, margins, cfg, seed);
}

void write_evidence_csv(std::ostream& os, const EvidenceTable& t) {
  os << "method,dataset,delta,evidence,error\n";
  for (std::size_t m = 0; m < t.methods.size(); ++m)
    for (std::size_t k = 0; k < t.datasets.size(); ++k)
      for (std::size_t j = 0; j < t.deltas.size(); ++j) {
        const EvidenceCell& c = t.at(m, k, j);
        std::string err = c.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << fmt::format("{},{},{},{},{}\n", to_string(t.methods[m]), t.datasets[k], t.deltas[j],
                          c.value ? num(*c.value) : "NA", err);
      }
}

void write_evidence_table(std::ostream& os, const EvidenceTable& t) {
  const std::size_t w = name_width(t.methods);
  os << "Evidence 1 - C(delta)\n" << fmt::format("{:<{}}", "Method", w);
  for (const auto& ds : t.datasets)
    for (double delta : t.deltas) os << fmt::format("{:>14}", t.datasets.size() > 1 ? fmt::format("{} {}", ds, delta) : fmt::format("d={}", delta));
  os << '\n';
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    os << fmt::format("{:<{}}", to_string(t.methods[m]), w);
    for (std::size_t k = 0; k < t.datasets.size(); ++k)
      for (std::size_t j = 0; j < t.deltas.size(); ++j) {
        const EvidenceCell& c = t.at(m, k, j);
        os << fmt::format("{:>14}", c.value ? num(*c.value, 3) : "n/a");
      }
    os << '\n';
  }
}

}  // namespace rcd
