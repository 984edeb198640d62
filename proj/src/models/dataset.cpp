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

#include "rcd/models/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rcd/cd/io.hpp"
#include "rcd/core/error.hpp"

namespace rcd {

const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::one_sample: return "one_sample";
    case DatasetKind::two_sample: return "two_sample";
    case DatasetKind::regression: return "regression";
  }
  return "unknown";
}

Dataset make_one_sample(const Eigen::VectorXd& y) {
  if (y.size() < 1) throw ArgumentError("one-sample data is empty");
  Dataset d;
  d.kind = DatasetKind::one_sample;
  d.y = y;
  d.X = Eigen::MatrixXd::Ones(y.size(), 1);
  d.names = {"theta"};
  return d;
}

Dataset make_two_sample(const Eigen::VectorXd& y, const std::vector<int>& group) {
  if (static_cast<std::size_t>(y.size()) != group.size()) throw ArgumentError("two-sample data: group length mismatch");
  const auto n_std = std::count(group.begin(), group.end(), 1);
  const auto n_new = std::count(group.begin(), group.end(), 0);
  if (n_std + n_new != y.size()) throw ArgumentError("two-sample labels must be 0 (new) or 1 (standard)");
  if (n_std < 2 || n_new < 2) throw ArgumentError("two-sample data needs at least two observations per group");
  Dataset d;
  d.kind = DatasetKind::two_sample;
  d.y = y;
  d.group = group;
  d.X.resize(y.size(), 2);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    d.X(i, 0) = group[static_cast<std::size_t>(i)];
    d.X(i, 1) = 1.0;
  }
  d.names = {"psi", "mu_new"};
  return d;
}

Dataset make_regression(const Eigen::VectorXd& y_fu, const Eigen::VectorXd& y_bl, const std::vector<int>& p) {
  const auto n = y_fu.size();
  if (y_bl.size() != n || static_cast<Eigen::Index>(p.size()) != n) throw ArgumentError("regression data: column length mismatch");
  if (n < 4) throw ArgumentError("regression design needs at least 4 subjects");
  const auto ones = std::count(p.begin(), p.end(), 1);
  if (ones + std::count(p.begin(), p.end(), 0) != n) throw ArgumentError("regression group indicator must be 0 or 1");
  if (ones == 0 || ones == n) throw ArgumentError("regression design needs both groups present");
  Dataset d;
  d.kind = DatasetKind::regression;
  d.y = y_fu;
  d.baseline = y_bl;
  d.group = p;
  d.X.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.X(i, 0) = p[static_cast<std::size_t>(i)];
    d.X(i, 1) = 1.0;
    d.X(i, 2) = y_bl(i);
  }
  d.names = {"beta2", "beta0", "beta1"};
  return d;
}

Dataset with_response(const Dataset& d, Eigen::VectorXd y) {
  if (y.size() != d.y.size()) throw ArgumentError("with_response: length mismatch");
  Dataset out = d;
  out.y = std::move(y);
  return out;
}

std::vector<double> group_values(const Dataset& d, int label) {
  std::vector<double> out;
  for (std::size_t i = 0; i < d.group.size(); ++i)
    if (d.group[i] == label) out.push_back(d.y(static_cast<Eigen::Index>(i)));
  return out;
}

namespace {

std::string trim_lower(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  const auto e = s.find_last_not_of(" \t\r\"");
  s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(trim_lower(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double cell_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

int group_label(const std::string& s, std::size_t line) {
  if (s == "s" || s == "standard" || s == "1") return 1;
  if (s == "n" || s == "new" || s == "0") return 0;
  throw ParseError("unknown group label '" + s + "' (expected S/N, standard/new or 1/0)", line);
}

int indicator(const std::string& s, std::size_t line) {
  const double v = cell_double(s, line);
  if (v != 0.0 && v != 1.0) throw ParseError("group indicator must be 0 or 1", line);
  return static_cast<int>(v);
}

}  // namespace

Dataset read_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim_lower(line).empty()) continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw ParseError("empty CSV: header row required", lineno);
  auto col = [&](const std::string& name) -> long {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<long>(it - header.begin());
  };
  DatasetKind kind;
  if (col("y_fu") >= 0 && col("y_bl") >= 0 && col("p") >= 0) {
    kind = DatasetKind::regression;
  } else if (col("y") >= 0 && col("group") >= 0) {
    kind = DatasetKind::two_sample;
  } else if (col("y") >= 0) {
    kind = DatasetKind::one_sample;
  } else {
    throw ParseError("header must be 'y,group', 'y_fu,y_bl,p' or 'y'", lineno);
  }

  std::vector<double> a, b;
  std::vector<int> g;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim_lower(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()), lineno);
    switch (kind) {
      case DatasetKind::regression:
        a.push_back(cell_double(cells[col("y_fu")], lineno));
        b.push_back(cell_double(cells[col("y_bl")], lineno));
        g.push_back(indicator(cells[col("p")], lineno));
        break;
      case DatasetKind::two_sample:
        a.push_back(cell_double(cells[col("y")], lineno));
        g.push_back(group_label(cells[col("group")], lineno));
        break;
      case DatasetKind::one_sample:
        a.push_back(cell_double(cells[col("y")], lineno));
        break;
    }
  }
  const Eigen::Map<const Eigen::VectorXd> ya(a.data(), static_cast<Eigen::Index>(a.size()));
  try {
    switch (kind) {
      case DatasetKind::regression: {
        const Eigen::Map<const Eigen::VectorXd> yb(b.data(), static_cast<Eigen::Index>(b.size()));
        return make_regression(ya, yb, g);
      }
      case DatasetKind::two_sample: return make_two_sample(ya, g);
      case DatasetKind::one_sample: return make_one_sample(ya);
    }
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), 0);
  }
  return {};
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_csv(is);
}

void write_csv(std::ostream& os, const Dataset& d) {
  switch (d.kind) {
    case DatasetKind::regression:
      os << "y_fu,y_bl,p\n";
      for (Eigen::Index i = 0; i < d.n(); ++i)
        os << fmt_double(d.y(i)) << ',' << fmt_double(d.baseline(i)) << ',' << d.group[static_cast<std::size_t>(i)] << '\n';
      break;
    case DatasetKind::two_sample:
      os << "y,group\n";
      for (Eigen::Index i = 0; i < d.n(); ++i) os << fmt_double(d.y(i)) << ',' << (d.group[static_cast<std::size_t>(i)] ? 'S' : 'N') << '\n';
      break;
    case DatasetKind::one_sample:
      os << "y\n";
      for (Eigen::Index i = 0; i < d.n(); ++i) os << fmt_double(d.y(i)) << '\n';
      break;
  }
}

}  // namespace rcd
