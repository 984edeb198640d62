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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "rcd/core/error.hpp"
#include "rcd/harness/harness.hpp"

namespace rcd {
namespace {

StudySpec small_spec(std::vector<Method> methods, std::size_t reps) {
  StudySpec s;
  s.methods = std::move(methods);
  s.replicates = reps;
  s.method.proposals = 400;
  s.method.boot_B = 200;
  s.workers = 1;
  return s;
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(method_from_string(to_string(m)), m);
  EXPECT_EQ(method_from_string("cdensity/m-est"), Method::sig_mest);
  EXPECT_EQ(method_from_string("boot_perc"), Method::boot_perc);
  EXPECT_EQ(all_methods().size(), 11u);
  EXPECT_EQ(regression_methods().size(), 6u);
  try {
    method_from_string("Bayes/Flat");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("Wald/M-test"), std::string::npos);
  }
  EXPECT_EQ(parse_methods("Wald/Mean, ABC/M-EE,Wald/Mean").size(), 2u);
  EXPECT_THROW(parse_methods(" , "), ConfigError);
}

TEST(Study, DegenerateExactCdCoversWithZeroBias) {
  StudySpec s = small_spec({Method::wald_mean}, 1);
  s.sigma = 0.0;
  s.mu_N = 0.0;
  s.psi0 = 2.5;  // group means are then exact in floating point
  s.scenarios = {{40, 0.0}};
  const StudyReport r = run_study(s);
  const MethodStats& c = r.at(Method::wald_mean, 0);
  EXPECT_EQ(c.failures, 0u);
  EXPECT_EQ(c.coverage95, 1.0);
  EXPECT_EQ(c.coverage90, 1.0);
  EXPECT_EQ(c.abs_bias, 0.0);
  EXPECT_EQ(c.po + c.pu, 0.0);
}

TEST(Study, ProportionsAndDeterminism) {
  StudySpec s = small_spec({Method::wald_mean, Method::wald_mtest, Method::abc_mest, Method::sig_median, Method::boot_perc}, 12);
  s.scenarios = {{40, 0.0}, {40, 0.1}};
  const StudyReport a = run_study(s);
  s.workers = 3;
  const StudyReport b = run_study(s);
  std::ostringstream ca, cb;
  write_study_csv(ca, a);
  write_study_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
  ASSERT_EQ(a.cells.size(), 10u);
  for (const MethodStats& c : a.cells) {
    EXPECT_EQ(c.replicates, 12u);
    for (double p : {c.coverage90, c.coverage95, c.po, c.pu, c.type1, c.reject_ni, c.evidence}) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
    EXPECT_LE(c.po + c.pu, 1.0 + 1e-12);
    EXPECT_LE(c.coverage90, c.coverage95);
    EXPECT_NEAR(c.type1, 1.0 - c.coverage95, 1e-12);  // alpha = 0.05
  }
  ASSERT_EQ(study_sizes(a), std::vector<std::size_t>{40});
  std::ostringstream cov, stab;
  write_coverage_table(cov, a, 40);
  write_stability_table(stab, a, 40);
  EXPECT_NE(cov.str().find("CDensity/Median"), std::string::npos);
  EXPECT_NE(cov.str().find("10%"), std::string::npos);
  EXPECT_NE(stab.str().find("type-I"), std::string::npos);
  EXPECT_THROW(write_coverage_table(cov, a, 80), ArgumentError);
}

TEST(Study, CleanAndContaminatedShareDraws) {
  StudySpec s;
  const Dataset clean = sample(replicate_spec(s, {40, 0.0}, 7));
  const Dataset dirty = sample(replicate_spec(s, {40, 0.1}, 7));
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(sorted(group_values(clean, 1)), sorted(group_values(dirty, 1)));
  auto a = sorted(group_values(clean, 0)), b = sorted(group_values(dirty, 0));
  std::vector<double> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  EXPECT_EQ(common.size(), 18u);
  const auto [c2, d2] = evidence_pair(s, {40, 0.1}, s.seed);
  EXPECT_EQ(c2.y, sample(replicate_spec(s, {40, 0.0}, 0)).y);
  EXPECT_NE(c2.y, d2.y);
}

TEST(Study, Validation) {
  StudySpec s;
  s.replicates = 0;
  EXPECT_THROW(run_study(s), ConfigError);
  s = StudySpec{};
  s.scenarios = {{41, 0.0}};
  EXPECT_THROW(s.validate(), ConfigError);
  s = StudySpec{};
  s.methods.clear();
  EXPECT_THROW(s.validate(), ConfigError);
  s = StudySpec{};
  s.method.boot_B = 50;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Evidence, ExtremeMarginsAndShape) {
  StudySpec s;
  const auto [clean, dirty] = evidence_pair(s, {80, 0.1}, 11);
  MethodConfig mc;
  mc.proposals = 1000;
  mc.boot_B = 200;
  const EvidenceTable t = evidence_table({{"clean", clean}, {"contaminated", dirty}}, all_methods(), {-1e6, 4.0, 1e6}, mc, 3);
  ASSERT_EQ(t.cells.size(), 11u * 2 * 3);
  for (std::size_t m = 0; m < t.methods.size(); ++m)
    for (std::size_t k = 0; k < 2; ++k) {
      const EvidenceCell& lo = t.at(m, k, 0);
      if (!lo.value) continue;
      EXPECT_EQ(*lo.value, 1.0) << to_string(t.methods[m]);
      EXPECT_EQ(*t.at(m, k, 2).value, 0.0);
      EXPECT_GE(*t.at(m, k, 1).value, 0.0);
    }
  EXPECT_TRUE(t.at(Method::wald_mean, 0).value.has_value());
  std::ostringstream os;
  write_evidence_table(os, t);
  EXPECT_NE(os.str().find("CDensity/M-EE"), std::string::npos);
}

TEST(Evidence, FailedMethodMarkedUnavailable) {
  StudySpec s;
  const auto [clean, dirty] = evidence_pair(s, {40, 0.1}, 5);
  MethodConfig mc;
  mc.proposals = 50;
  mc.abc.tolerance = 1e-9;  // nothing accepted
  const EvidenceTable t = evidence_table({{"clean", clean}}, {Method::wald_mean, Method::abc_mest}, {4.0}, mc, 1);
  EXPECT_TRUE(t.at(Method::wald_mean, 0).value.has_value());
  EXPECT_FALSE(t.at(Method::abc_mest, 0).value.has_value());
  EXPECT_NE(t.at(Method::abc_mest, 0).error.find("no proposal accepted"), std::string::npos);
  std::ostringstream os;
  write_evidence_table(os, t);
  EXPECT_NE(os.str().find("n/a"), std::string::npos);
}

TEST(Superiority, RestrictsToRegression) {
  StudySpec s;
  const auto [clean, dirty] = evidence_pair(s, {40, 0.0}, 5);
  EXPECT_THROW(superiority_analysis(clean), ConfigError);
  Eigen::VectorXd yb = Eigen::VectorXd::LinSpaced(30, 5, 25), yf(30);
  std::vector<int> p(30);
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    p[i] = i % 2;
    yf(i) = 1.0 + yb(i) - 5.0 * p[i] + rng.normal();
  }
  const Dataset reg = make_regression(yf, yb, p);
  EXPECT_THROW(superiority_analysis(reg, default_margins(), {Method::abc_median}), ConfigError);
  MethodConfig mc;
  mc.proposals = 1000;
  const EvidenceTable t = superiority_analysis(reg, {-1e6, -5.0}, regression_methods(), mc, 2);
  EXPECT_EQ(*t.at(Method::wald_mean, 0, 0).value, 1.0);
  EXPECT_EQ(*t.at(Method::wald_mtest, 0, 0).value, 1.0);
  EXPECT_NEAR(*t.at(Method::wald_mean, 0, 1).value, 0.5, 0.45);
}

}  // namespace
}  // namespace rcd
