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

#include <cmath>
#include <sstream>

#include "rcd/core/error.hpp"
#include "rcd/models/dataset.hpp"
#include "rcd/models/sampler.hpp"

namespace rcd {
namespace {

DatasetSpec two_sample_spec(double sigma, std::size_t m, double frac, std::uint64_t seed) {
  DatasetSpec s;
  TwoSampleModel tm;
  tm.sigma = sigma;
  tm.n_per_group = m;
  s.model = tm;
  s.contamination.fraction = frac;
  s.contamination.mechanism = frac > 0 ? ContaminationMechanism::half_cauchy_new_group : ContaminationMechanism::none;
  s.seed = seed;
  return s;
}

TEST(Sampler, ZeroNoiseTwoSample) {
  const Dataset d = sample(two_sample_spec(0.0, 3, 0.0, 1));
  ASSERT_EQ(d.n(), 6);
  for (double v : group_values(d, 1)) EXPECT_DOUBLE_EQ(v, 122.6);
  for (double v : group_values(d, 0)) EXPECT_DOUBLE_EQ(v, 120.0);
}

TEST(Sampler, ContaminatedCountIsDeterministic) {
  EXPECT_EQ(contaminated_count(0.10, 40), 4u);
  EXPECT_EQ(contaminated_count(0.10, 20), 2u);
  EXPECT_EQ(contaminated_count(0.15, 100), 15u);
  EXPECT_EQ(contaminated_count(0.05, 10), 1u);  // floor(0.5 + 0.5)
  EXPECT_EQ(contaminated_count(0.0, 10), 0u);
  EXPECT_THROW(contaminated_count(1.0, 10), ArgumentError);

  const Dataset d = sample(two_sample_spec(0.0, 40, 0.10, 9));
  int touched = 0;
  for (double v : group_values(d, 0)) touched += v != 120.0;
  EXPECT_EQ(touched, 4);
  for (double v : group_values(d, 1)) EXPECT_DOUBLE_EQ(v, 122.6);
}

TEST(Sampler, SameSeedSameData) {
  for (double frac : {0.0, 0.1}) {
    const Dataset a = sample(two_sample_spec(4.0, 20, frac, 77));
    const Dataset b = sample(two_sample_spec(4.0, 20, frac, 77));
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.group, b.group);
    const Dataset c = sample(two_sample_spec(4.0, 20, frac, 78));
    EXPECT_NE(a.y, c.y);
  }
}

TEST(Sampler, CleanAndContaminatedShareBaseDraws) {
  const Dataset clean = sample(two_sample_spec(4.0, 20, 0.0, 5));
  const Dataset dirty = sample(two_sample_spec(4.0, 20, 0.1, 5));
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(sorted(group_values(clean, 1)), sorted(group_values(dirty, 1)));
  // 18 of 20 new-group values are shared.
  auto a = sorted(group_values(clean, 0)), b = sorted(group_values(dirty, 0));
  std::vector<double> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  EXPECT_EQ(common.size(), 18u);
}

TEST(Sampler, MeanDifferenceConverges) {
  const int reps = 100000;
  const std::size_t m = 5;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const Dataset d = sample(two_sample_spec(4.0, m, 0.0, static_cast<std::uint64_t>(r)));
    double s = 0, nn = 0;
    for (double v : group_values(d, 1)) s += v;
    for (double v : group_values(d, 0)) nn += v;
    sum += (s - nn) / static_cast<double>(m);
  }
  const double n_total = 2.0 * static_cast<double>(m);
  EXPECT_NEAR(sum / reps, 2.6, 3.0 * 4.0 / std::sqrt(reps * n_total) * 2.0);
}

TEST(Sampler, CauchyExtremeOneSample) {
  DatasetSpec s;
  OneSampleModel om;
  om.sigma = 0.0;
  s.model = om;
  s.contamination = {0.15, ContaminationMechanism::cauchy_extreme};
  s.seed = 3;
  const Dataset d = sample(s);
  int at_one = 0, shared = 0;
  double extreme = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    if (d.y(i) == 1.0) {
      ++at_one;
    } else {
      extreme = d.y(i);
      ++shared;
    }
  }
  EXPECT_EQ(at_one, 85);
  EXPECT_EQ(shared, 15);
  for (Eigen::Index i = 0; i < d.n(); ++i) EXPECT_TRUE(d.y(i) == 1.0 || d.y(i) == extreme);
  EXPECT_GT(extreme, 0.0);
}

TEST(Sampler, RegressionZeroNoise) {
  DatasetSpec s;
  RegressionModel rm;
  rm.beta0 = 1;
  rm.beta1 = 1;
  rm.beta2 = -5;
  rm.sigma = 0;
  rm.baseline = Eigen::VectorXd::LinSpaced(57, 5, 25);
  rm.baseline(0) = 10;
  for (int i = 0; i < 57; ++i) rm.p.push_back(i % 2 == 0);
  s.model = rm;
  const Dataset d = sample(s);
  EXPECT_EQ(d.n(), 57);
  EXPECT_DOUBLE_EQ(d.y(0), 6.0);
  RegressionModel other = rm;
  other.beta2 = 100;
  s.model = other;
  const Dataset d2 = sample(s);
  for (int i = 0; i < 57; ++i)
    if (rm.p[i] == 0) EXPECT_DOUBLE_EQ(d.y(i), d2.y(i));
}

TEST(Dataset, RegressionDesignValidation) {
  Eigen::VectorXd y(3), b(3);
  y << 1, 2, 3;
  b << 1, 2, 3;
  EXPECT_THROW(make_regression(y, b, {0, 1, 1}), ArgumentError);
  Eigen::VectorXd y4(4), b4(4);
  y4 << 1, 2, 3, 4;
  b4 << 1, 2, 3, 4;
  EXPECT_THROW(make_regression(y4, b4, {1, 1, 1, 1}), ArgumentError);
  EXPECT_NO_THROW(make_regression(y4, b4, {1, 0, 1, 0}));
}

TEST(Csv, TwoSampleLabels) {
  std::istringstream is("y,group\n1.5,S\n2.5,standard\n3,1\n0.5,N\n0.25,new\n-1,0\n");
  const Dataset d = read_csv(is);
  EXPECT_EQ(d.kind, DatasetKind::two_sample);
  EXPECT_EQ(d.group, (std::vector<int>{1, 1, 1, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(d.X(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.X(3, 0), 0.0);
}

TEST(Csv, RegressionAndOneSample) {
  std::istringstream r("y_fu,y_bl,p\n10,12,1\n11,13,0\n9,10,1\n8,9,0\n");
  const Dataset d = read_csv(r);
  EXPECT_EQ(d.kind, DatasetKind::regression);
  EXPECT_DOUBLE_EQ(d.X(2, 2), 10.0);
  std::istringstream o("y\n1\n2\n");
  EXPECT_EQ(read_csv(o).kind, DatasetKind::one_sample);
}

TEST(Csv, ErrorsCarryLineNumbers) {
  std::istringstream bad("y,group\n1,S\n2,S\nabc,N\n3,N\n");
  try {
    read_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::istringstream label("y,group\n1,S\n2,X\n");
  try {
    read_csv(label);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream noheader("1,S\n2,N\n");
  EXPECT_THROW(read_csv(noheader), ParseError);
}

TEST(Csv, RoundTrip) {
  const Dataset d = sample(two_sample_spec(4.0, 20, 0.1, 12));
  std::stringstream ss;
  write_csv(ss, d);
  const Dataset back = read_csv(ss);
  EXPECT_EQ(back.y, d.y);
  EXPECT_EQ(back.group, d.group);
}

}  // namespace
}  // namespace rcd
