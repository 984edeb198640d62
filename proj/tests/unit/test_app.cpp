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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcd/app/config.hpp"
#include "rcd/app/jobs.hpp"
#include "rcd/core/error.hpp"
#include "rcd/harness/harness.hpp"
#include "rcd/models/dataset.hpp"
#include "rcd/pivots/pivots.hpp"

namespace rcd {
namespace {

namespace fs = std::filesystem;

TEST(Config, DefaultsAndTypedGetters) {
  Config c;
  EXPECT_EQ(c.count("proposal.R"), 4000u);
  EXPECT_DOUBLE_EQ(c.real("estimation.huber_c"), 1.345);
  EXPECT_FALSE(c.flag("run.plots"));
  EXPECT_TRUE(c.is_auto("estimation.margins"));
  EXPECT_FALSE(c.reals("estimation.margins").has_value());
  EXPECT_EQ(*c.reals("estimation.levels"), (std::vector<double>{0.9, 0.95}));
  EXPECT_EQ(c.list("boot.variants").size(), 4u);
  EXPECT_TRUE(c.is_default("proposal.R"));
  c.set("proposal.R=250");
  EXPECT_FALSE(c.is_default("proposal.R"));
  EXPECT_EQ(c.count("proposal.R"), 250u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  Config c;
  try {
    c.set("abc.tolerence", "0.1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("abc.tolerance"), std::string::npos);
  }
  EXPECT_THROW(c.set("nosection"), ConfigError);
  EXPECT_THROW(c.get("boot.nothing"), ConfigError);
  c.set("proposal.R", "lots");
  EXPECT_THROW(c.count("proposal.R"), ConfigError);
  c.set("proposal.R", "-3");
  EXPECT_THROW(c.count("proposal.R"), ConfigError);
  c.set("run.plots", "maybe");
  EXPECT_THROW(c.flag("run.plots"), ConfigError);
}

TEST(Config, WriteParseRoundTripCoversEveryKey) {
  Config c;
  c.set("study.scenarios", "20:0,20:0.2");
  c.set("npcd.sweep", "true");
  std::stringstream ss;
  c.write(ss);
  const Config back = Config::parse(ss);
  for (const std::string& k : Config::keys()) EXPECT_EQ(back.get(k), c.get(k)) << k;
  std::stringstream again;
  back.write(again);
  EXPECT_EQ(again.str(), ss.str());
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  std::istringstream bad("[proposal]\nR = 10\n[broken\n");
  try {
    Config::parse(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream unknown("[mystery]\nx = 1\n");
  EXPECT_THROW(Config::parse(unknown), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/rcd.ini"), IoError);
}

TEST(Config, MethodConfigReadsSections) {
  Config c;
  c.set("estimation.huber_c", "2");
  c.set("proposal.R", "123");
  c.set("proposal.psi", "-1,4");
  c.set("proposal.sigma", "fixed:2.5");
  c.set("boot.B", "500");
  const MethodConfig m = method_config(c, nullptr);
  EXPECT_DOUBLE_EQ(m.huber_c, 2.0);
  EXPECT_EQ(m.boot_B, 500u);
  ASSERT_TRUE(m.proposal.has_value());
  EXPECT_EQ(m.proposal->R, 123u);
  EXPECT_DOUBLE_EQ(m.proposal->psi.lo, -1.0);
  EXPECT_DOUBLE_EQ(m.proposal->psi.hi, 4.0);
  EXPECT_FALSE(m.proposal->sigma.has_value());
  EXPECT_DOUBLE_EQ(m.proposal->sigma_fixed, 2.5);

  c.set("proposal.psi", "4,-1");
  EXPECT_THROW(method_config(c, nullptr), ConfigError);
}

// Regression example shipped in data/: ML and Huber fits of the treatment
// effect and the superiority evidence at the reference margins.
TEST(TrialData, FitsAndEvidence) {
  const Dataset d = read_csv_file(RCD_DATA_DIR "/synthetic_trial.csv");
  ASSERT_EQ(d.kind, DatasetKind::regression);
  ASSERT_EQ(d.n(), 57);
  int treated = 0;
  for (Eigen::Index i = 0; i < d.n(); ++i) treated += d.X(i, 0) == 1.0;
  EXPECT_EQ(treated, 30);

  const ConfidenceDistribution t = exact_t_cd(d);
  EXPECT_NEAR(t.median(), -5.32, 0.03);

  const EvidenceTable tab = superiority_analysis(d, default_margins(), {Method::wald_mean, Method::wald_mtest});
  const std::size_t last = default_margins().size() - 1;  // delta = -5.3
  ASSERT_TRUE(tab.at(0, 0, last).value && tab.at(1, 0, last).value);
  EXPECT_NEAR(*tab.at(0, 0, last).value, 0.49, 0.02);
  EXPECT_NEAR(*tab.at(1, 0, last).value, 0.26, 0.02);
  // Evidence grows as the margin moves away from the estimate.
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t j = 1; j <= last; ++j) EXPECT_GE(*tab.at(m, 0, j).value, *tab.at(m, 0, j - 1).value);
}

TEST(Jobs, FingerprintIsFnv1a) {
  const fs::path p = fs::temp_directory_path() / "rcd_fnv_probe.txt";
  {
    std::ofstream f(p, std::ios::binary);
    f << "a";
  }
  EXPECT_EQ(file_fingerprint(p.string()), "af63dc4c8601ec8c");
  fs::remove(p);
}

TEST(Jobs, RerunRefusesChangedInput) {
  const fs::path dir = fs::temp_directory_path() / "rcd_job_probe";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path csv = dir / "in.csv";
  {
    std::ofstream f(csv);
    f << "y,group\n1,S\n2,S\n3,S\n1.5,N\n2.5,N\n3.5,N\n";
  }
  Config c;
  c.set("run.input", csv.string());
  c.set("estimation.methods", "Wald/Mean");
  JobContext ctx;
  ctx.out_dir = (dir / "out").string();
  ctx.workers = 1;
  run_job(c, ctx);
  Config m = Config::load((dir / "out" / "manifest.ini").string());
  EXPECT_EQ(m.get("run.input_fnv1a").size(), 16u);
  {
    std::ofstream f(csv, std::ios::app);
    f << "9,N\n";
  }
  ctx.out_dir = (dir / "out2").string();
  EXPECT_THROW(run_job(m, ctx), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace rcd
