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

// Acceptance suite: one PASS/FAIL line per criterion. `acceptance N...` runs
// the listed criteria, otherwise all of them. `--known-failure N` marks a
// criterion that is documented as unattainable: it still runs and prints its
// FAIL line but does not count toward the exit status, which is the number
// of other failed criteria.

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "rcd/core/rng.hpp"
#include "rcd/harness/harness.hpp"
#include "rcd/mest/solve.hpp"
#include "rcd/models/sampler.hpp"
#include "rcd/npcd/npcd.hpp"
#include "rcd/pivots/pivots.hpp"
#include "rcd/simcd/simcd.hpp"

namespace {

using namespace rcd;

struct Outcome {
  bool pass;
  std::string detail;
};

StudySpec study(std::vector<Method> methods, Scenario sc, std::size_t reps) {
  StudySpec s;
  s.methods = std::move(methods);
  s.scenarios = {sc};
  s.replicates = reps;
  s.seed = 20240607;
  s.workers = 0;
  return s;
}

Outcome coverage_reproduction() {
  const StudyReport r = run_study(study({Method::wald_mean, Method::wald_mtest}, {40, 0.0}, 500));
  const double a = 100 * r.at(Method::wald_mean, 0).coverage95, b = 100 * r.at(Method::wald_mtest, 0).coverage95;
  return {std::abs(a - 93.9) <= 2.5 && std::abs(b - 93.7) <= 2.5,
          fmt::format("Wald/Mean 95% {:.1f} (93.9 +- 2.5), Wald/M-test 95% {:.1f} (93.7 +- 2.5)", a, b)};
}

Outcome robustness_ordering() {
  const StudyReport r = run_study(study({Method::wald_mean, Method::wald_mtest}, {40, 0.1}, 500));
  const double a = r.at(Method::wald_mean, 0).abs_bias, b = r.at(Method::wald_mtest, 0).abs_bias;
  return {a >= 5.0 * b, fmt::format("|b| Wald/Mean {:.3f}, Wald/M-test {:.3f}, ratio {:.1f} (>= 5)", a, b, a / b)};
}

Outcome simulation_coverage() {
  StudySpec s = study({Method::sig_median, Method::sig_mest, Method::sig_mee}, {40, 0.0}, 500);
  s.method.proposals = 4000;
  const StudyReport r = run_study(s);
  const double med = r.at(Method::sig_median, 0).coverage95, mest = r.at(Method::sig_mest, 0).coverage95,
               mee = r.at(Method::sig_mee, 0).coverage95;
  return {med > 0.95 && mest > 0.95 && med > mee && mest > mee,
          fmt::format("CDensity 95% coverage: Median {:.1f}, M-est {:.1f}, M-EE {:.1f}", 100 * med, 100 * mest, 100 * mee)};
}

Outcome evidence_pattern() {
  StudySpec s;
  const auto [clean, dirty] = evidence_pair(s, {80, 0.1}, 4);
  const std::vector<Method> methods{Method::wald_mean, Method::wald_mtest, Method::sig_mee};
  const EvidenceTable t = evidence_table({{"clean", clean}, {"contaminated", dirty}}, methods, {4.0}, {}, 4);
  auto v = [&](Method m, std::size_t k) { return t.at(m, k).value.value_or(std::nan("")); };
  const bool pass = v(Method::wald_mean, 1) > 0.30 && v(Method::wald_mtest, 0) < 0.15 && v(Method::wald_mtest, 1) < 0.15 &&
                    v(Method::sig_mee, 0) < 0.15 && v(Method::sig_mee, 1) < 0.15;
  return {pass, fmt::format("clean/contaminated: Wald/Mean {:.2f}/{:.2f}, Wald/M-test {:.2f}/{:.2f}, CDensity/M-EE {:.2f}/{:.2f}",
                            v(Method::wald_mean, 0), v(Method::wald_mean, 1), v(Method::wald_mtest, 0),
                            v(Method::wald_mtest, 1), v(Method::sig_mee, 0), v(Method::sig_mee, 1))};
}

// Two-sided Kolmogorov p-value, asymptotic series.
double kolmogorov_pvalue(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

Outcome pivot_uniformity() {
  StudySpec s;
  s.seed = 55;
  std::vector<double> u;
  for (std::size_t r = 0; r < 2000; ++r) {
    const Dataset d = sample(replicate_spec(s, {80, 0.0}, r));
    u.push_back(cd_from_pivot(PivotKind::wald_classic, EstimatingFunction::ml_score(), d).evaluate(s.psi0));
  }
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) ks = std::max({ks, (i + 1) / n - u[i], u[i] - i / n});
  const double p = kolmogorov_pvalue(ks, u.size());
  return {p > 0.01, fmt::format("KS {:.4f}, p-value {:.3f} (> 0.01)", ks, p)};
}

// Pooled two-sample t interval computed from scratch.
std::pair<double, double> pooled_t_interval(const Dataset& d, double level) {
  const auto a = group_values(d, 1), b = group_values(d, 0);
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  const double ma = mean(a), mb = mean(b);
  double ss = 0;
  for (double x : a) ss += (x - ma) * (x - ma);
  for (double x : b) ss += (x - mb) * (x - mb);
  const double df = a.size() + b.size() - 2.0;
  const double se = std::sqrt(ss / df * (1.0 / a.size() + 1.0 / b.size()));
  const double q = boost::math::quantile(boost::math::students_t(df), 0.5 + level / 2);
  return {ma - mb - q * se, ma - mb + q * se};
}

double w1_quadrature(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<double> pts(x);
  pts.insert(pts.end(), y.begin(), y.end());
  std::sort(pts.begin(), pts.end());
  auto ecdf = [](const std::vector<double>& s, double t) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) / s.size();
  };
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    w += (pts[i + 1] - pts[i]) * std::abs(ecdf(x, mid) - ecdf(y, mid));
  }
  return w;
}

Outcome oracle_equivalences() {
  std::vector<std::string> notes;
  bool pass = true;
  StudySpec s;
  s.seed = 66;
  for (auto [n, tol] : {std::pair<std::size_t, double>{40, 0.05}, {400, 0.01}}) {
    const Dataset d = sample(replicate_spec(s, {n, 0.0}, 0));
    const auto outcomes = build_cds(d, {Method::wald_mean}, {}, 1);
    const auto [lo, hi] = outcomes[0].cd->interval(0.95);
    const auto [tlo, thi] = pooled_t_interval(d, 0.95);
    const double rel = std::abs((hi - lo) - (thi - tlo)) / (thi - tlo);
    pass = pass && rel <= tol;
    notes.push_back(fmt::format("(a) n={} width diff {:.2e}", n, rel));
  }

  Rng rng(2);
  Eigen::VectorXd y(20);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
  const Dataset d = make_one_sample(y);
  const double ybar = y.mean(), se = 1.0 / std::sqrt(20.0);
  ProposalSpec p;
  p.psi = {ybar - 1.5, ybar + 1.5};
  p.nuisance.clear();
  p.sigma.reset();
  p.sigma_fixed = 1.0;
  p.R = 100000;
  const AbcResult r = abc_cd(d, p, {SummaryKind::m_estimator, EstimatingFunction::ml_score().with_known_sigma(1.0)},
                             {0.05, Distance::absolute}, 5);
  const ConfidenceDistribution wald = ConfidenceDistribution::normal(ybar, se);
  double ks = 0.0;
  const double m = static_cast<double>(r.accepted.size());
  for (std::size_t i = 0; i < r.accepted.size(); ++i) {
    const double f = wald.evaluate(r.accepted[i]);
    ks = std::max({ks, (i + 1) / m - f, f - i / m});
  }
  pass = pass && ks < 0.05;
  notes.push_back(fmt::format("(b) ABC vs Wald KS {:.4f}", ks));

  double worst = 0.0;
  Rng g(3);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(1 + g.index(40)), b(1 + g.index(40));
    for (double& v : a) v = g.normal();
    for (double& v : b) v = g.normal(0.5, 2.0);
    worst = std::max(worst, std::abs(distance(DiscrepancyKind::wasserstein1, a, b) - w1_quadrature(a, b)));
  }
  pass = pass && worst <= 1e-10;
  notes.push_back(fmt::format("(c) W1 max error {:.1e}", worst));
  std::string all;
  for (const auto& s2 : notes) all += (all.empty() ? "" : "; ") + s2;
  return {pass, all};
}

Outcome unit_oracles() {
  // Huber oracle: with c = 1.345 the point 10 is clipped, so
  // (-1 - mu) + (-mu) + c = 0 gives mu = (c - 1) / 2.
  const double oracle = (1.345 - 1.0) / 2.0;
  Eigen::VectorXd y(3);
  y << -1, 0, 10;
  const Fit f = solve(EstimatingFunction::huber(1.345).with_known_sigma(1.0), make_one_sample(y));
  const std::vector<double> a{1, 2, 3}, b{1.5, 2.5, 3.5};
  const double ks = distance(DiscrepancyKind::ks, a, b), w = distance(DiscrepancyKind::wasserstein1, a, b);
  return {std::abs(f.psi() - 0.1725) <= 1e-6 && std::abs(oracle - 0.1725) < 1e-12 && ks == 1.0 / 3.0 && w == 0.5,
          fmt::format("Huber {:.9f}, KS {}, W1 {}", f.psi(), ks, w)};
}

Outcome taif_boundedness() {
  Rng rng(17);
  Eigen::VectorXd y(30);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
  const Dataset d = make_one_sample(y);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
  const auto hub = EstimatingFunction::huber(1.345);
  const PivotModel hm(hub, d);
  const double psi = hm.psi_hat() + 0.5 * hm.se();
  const double h3 = tail_area_influence(PivotKind::wald_robust, hub, d, psi, 1e3, x);
  const double h6 = tail_area_influence(PivotKind::wald_robust, hub, d, psi, 1e6, x);
  const auto ml = EstimatingFunction::ml_score();
  const PivotModel mm(ml, d);
  const double pm = mm.psi_hat() + 0.5 * mm.se();
  const double m3 = std::abs(tail_area_influence(PivotKind::wald_robust, ml, d, pm, 1e3, x));
  const double m6 = std::abs(tail_area_influence(PivotKind::wald_robust, ml, d, pm, 1e6, x));
  return {std::abs(h3 - h6) <= 1e-6 && m6 > m3,
          fmt::format("Huber TAIF {:.8f} vs {:.8f}; ML |TAIF| {:.4g} -> {:.4g}", h3, h6, m3, m6)};
}

Outcome npcd_stability() {
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    DatasetSpec ds;
    OneSampleModel om;
    om.theta = 1.0;
    om.sigma = 1.0;
    om.n = 100;
    ds.model = om;
    ds.contamination = {0.15, ContaminationMechanism::cauchy_extreme};
    ds.seed = derive_seed(9, {rep});
    const Dataset d = sample(ds);
    NpcdConfig cfg;
    cfg.seed = derive_seed(10, {rep});
    const std::vector<double> yv(d.y.data(), d.y.data() + d.n());
    const NpcdResult r = semimetric_cd(cfg, yv);
    const double med = r.cd().median();
    worst = std::max(worst, std::abs(med - 1.0));
    good += std::abs(med - 1.0) <= 0.25 && d.y.mean() > 1.5;
  }
  return {good >= 18, fmt::format("{} of 20 repetitions with |median - 1| <= 0.25 and mean > 1.5 (need 18); worst |median - 1| {:.2f}",
                                  good, worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome manifest_determinism();

const std::map<int, std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<const char*, std::function<Outcome()>>> c{
      {1, {"coverage reproduction", coverage_reproduction}},
      {2, {"contamination robustness ordering", robustness_ordering}},
      {3, {"simulation-CD coverage pattern", simulation_coverage}},
      {4, {"evidence-table pattern", evidence_pattern}},
      {5, {"pivot uniformity", pivot_uniformity}},
      {6, {"oracle equivalences", oracle_equivalences}},
      {7, {"M-estimation unit oracles", unit_oracles}},
      {8, {"TAIF boundedness", taif_boundedness}},
      {9, {"semimetric CD stability", npcd_stability}},
      {10, {"determinism from manifest", manifest_determinism}},
  };
  return c;
}

}  // namespace

namespace {

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

// Every regular file of `a` must exist in `b` with the same bytes.
bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why) {
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = b / e.path().filename();
    if (!std::filesystem::exists(other) || slurp(e.path()) != slurp(other)) {
      why = e.path().filename().string();
      return false;
    }
  }
  if (files < 2) {
    why = "no outputs";
    return false;
  }
  return true;
}

Outcome manifest_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / fmt::format("rcd_accept_{}", static_cast<long>(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string tool = RCD_TOOL_PATH;

  StudySpec s;
  const auto [clean, dirty] = evidence_pair(s, {40, 0.1}, 8);
  {
    std::ofstream os(root / "trial.csv");
    write_csv(os, dirty);
  }
  const std::vector<std::pair<std::string, std::string>> jobs{
      {"analyze", fmt::format("analyze {} --margins 4,3 --set proposal.R=800 --set boot.B=200", (root / "trial.csv").string())},
      {"simulate", "simulate --set study.replicates=4 --set study.methods=Wald/Mean,ABC/M-est,CDensity/Median,Boot/Perc "
                   "--set proposal.R=300 --set boot.B=100"},
      {"npcd", "npcd --set npcd.R=500 --set npcd.levels=0.05,0.15"},
      {"boot", fmt::format("boot {} --set boot.B=200", (root / "trial.csv").string())},
      {"abc", fmt::format("abc {} --set proposal.R=800", (root / "trial.csv").string())},
  };
  std::vector<std::string> failed;
  for (const auto& [name, args] : jobs) {
    const fs::path first = root / (name + "_1"), second = root / (name + "_2");
    if (run(fmt::format("{} {} --workers 2 --out {}", tool, args, first.string())) != 0) {
      failed.push_back(name + " (run failed)");
      continue;
    }
    if (run(fmt::format("{} rerun {} --workers 1 --out {}", tool, (first / "manifest.ini").string(), second.string())) != 0) {
      failed.push_back(name + " (rerun failed)");
      continue;
    }
    std::string why;
    if (!same_tree(first, second, why)) failed.push_back(name + " (" + why + " differs)");
  }
  fs::remove_all(root);
  std::string detail = fmt::format("{} of {} subcommands byte-identical on rerun", jobs.size() - failed.size(), jobs.size());
  for (const auto& f : failed) detail += "; " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which, known;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--known-failure" && i + 1 < argc) {
      known.push_back(std::atoi(argv[++i]));
    } else {
      which.push_back(std::atoi(argv[i]));
    }
  }
  if (which.empty())
    for (const auto& [k, v] : criteria()) which.push_back(k);
  int failures = 0;
  for (int k : which) {
    const auto it = criteria().find(k);
    if (it == criteria().end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 64;
    }
    Outcome o{false, ""};
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool is_known = std::find(known.begin(), known.end(), k) != known.end();
    failures += !o.pass && !is_known;
    std::printf("criterion %2d [%s] %s: %s%s\n", k, o.pass ? "PASS" : "FAIL", it->second.first, o.detail.c_str(),
                !o.pass && is_known ? " (known failure, see README)" : "");
    std::fflush(stdout);
  }
  return failures;
}
