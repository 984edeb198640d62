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

#include "rcd/cd/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rcd/core/error.hpp"

namespace rcd {

std::string fmt_double(double v) { return fmt::format("{}", v); }

void write_cd(std::ostream& os, const ConfidenceDistribution& cd) {
  os << "# rcd-cd kind=" << to_string(cd.representation()) << " n=" << cd.size();
  if (cd.representation() == Representation::closed_form) {
    os << " family=" << (cd.family() == ClosedFamily::normal ? "normal" : "student_t") << " loc=" << fmt_double(cd.location())
       << " scale=" << fmt_double(cd.scale()) << " df=" << fmt_double(cd.df());
  }
  if (cd.representation() == Representation::empirical && cd.interpolating()) os << " interpolate=1";
  os << "\npsi,C\n";
  switch (cd.representation()) {
    case Representation::closed_form: {
      const PlotData pd = plot_data(cd, 401);
      for (std::size_t i = 0; i < pd.psi.size(); ++i) os << fmt_double(pd.psi[i]) << ',' << fmt_double(pd.c[i]) << '\n';
      break;
    }
    case Representation::empirical: {
      const auto& s = cd.sample();
      for (std::size_t i = 0; i < s.size(); ++i)
        os << fmt_double(s[i]) << ',' << fmt_double(static_cast<double>(i + 1) / static_cast<double>(s.size())) << '\n';
      break;
    }
    case Representation::grid:
      for (std::size_t i = 0; i < cd.size(); ++i) os << fmt_double(cd.grid_psi()[i]) << ',' << fmt_double(cd.grid_c()[i]) << '\n';
      break;
  }
}

namespace {

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

}  // namespace

ConfidenceDistribution read_cd(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# rcd-cd", 0) != 0) throw ParseError("missing '# rcd-cd' header", 1);
  std::map<std::string, std::string> kv;
  std::istringstream hs(line.substr(8));
  for (std::string tok; hs >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("bad header token '" + tok + "'", 1);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  const std::string kind = kv["kind"];
  if (kind == "closed_form") {
    const double loc = to_double(kv["loc"], 1), scale = to_double(kv["scale"], 1);
    if (kv["family"] == "student_t") return ConfidenceDistribution::student_t(loc, scale, to_double(kv["df"], 1));
    return ConfidenceDistribution::normal(loc, scale);
  }
  if (kind != "empirical" && kind != "grid") throw ParseError("unknown CD kind '" + kind + "'", 1);

  std::vector<double> psi, c;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "psi,C") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'psi,C'", lineno);
    psi.push_back(to_double(line.substr(0, comma), lineno));
    c.push_back(to_double(line.substr(comma + 1), lineno));
  }
  if (kind == "empirical") return ConfidenceDistribution::empirical(std::move(psi), kv["interpolate"] == "1");
  return ConfidenceDistribution::grid(std::move(psi), std::move(c));
}

void save_cd(const std::string& path, const ConfidenceDistribution& cd) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_cd(os, cd);
}

ConfidenceDistribution load_cd(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_cd(is);
}

void write_plot_csv(std::ostream& os, const PlotData& pd) {
  os << "psi,C,cc,density\n";
  for (std::size_t i = 0; i < pd.psi.size(); ++i)
    os << fmt_double(pd.psi[i]) << ',' << fmt_double(pd.c[i]) << ',' << fmt_double(pd.cc[i]) << ','
       << fmt_double(pd.density[i]) << '\n';
}

}  // namespace rcd
