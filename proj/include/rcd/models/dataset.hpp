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

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace rcd {

enum class DatasetKind { one_sample, two_sample, regression };

const char* to_string(DatasetKind k);

/// Observations of a normal linear model y = X theta_beta + sigma u. Column 0
/// of X carries the interest parameter:
///   one_sample:  X = [1]                theta = (theta)
///   two_sample:  X = [1{standard}, 1]   theta = (psi, mu_N)
///   regression:  X = [P, 1, y_BL]       theta = (beta2, beta0, beta1)
struct Dataset {
  DatasetKind kind = DatasetKind::one_sample;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<int> group;    // 1 = standard / P=1, 0 = new / P=0; empty for one_sample
  Eigen::VectorXd baseline;  // regression only
  std::vector<std::string> names;

  Eigen::Index n() const noexcept { return y.size(); }
  Eigen::Index p() const noexcept { return X.cols(); }
};

Dataset make_one_sample(const Eigen::VectorXd& y);
/// Observations listed in the given order with their group labels.
Dataset make_two_sample(const Eigen::VectorXd& y, const std::vector<int>& group);
Dataset make_regression(const Eigen::VectorXd& y_fu, const Eigen::VectorXd& y_bl, const std::vector<int>& p);

/// Same design, new responses.
Dataset with_response(const Dataset& d, Eigen::VectorXd y);

/// Observations of one group of a two-sample or regression dataset.
std::vector<double> group_values(const Dataset& d, int label);

/// CSV ingestion. The header decides the layout: `y,group` (two-sample;
/// labels S/N, standard/new or 1/0 with 1 = standard), `y_fu,y_bl,p`
/// (regression) or `y` (one-sample). Throws ParseError with a line number.
Dataset read_csv(std::istream& is);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& os, const Dataset& d);

}  // namespace rcd
