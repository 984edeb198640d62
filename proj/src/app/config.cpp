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

#include "rcd/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rcd/core/error.hpp"

namespace rcd {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;
};

// Section order here is the manifest order.
constexpr KeyDefault kDefaults[] = {
    {"run.subcommand", "analyze"},
    {"run.input", ""},
    {"run.input_fnv1a", ""},
    {"run.seed", "1"},
    {"run.plots", "false"},
    {"run.version", RCD_VERSION_STRING},

    {"estimation.methods", "auto"},
    {"estimation.margins", "auto"},
    {"estimation.levels", "0.9,0.95"},
    {"estimation.null", "0"},
    {"estimation.huber_c", "1.345"},
    {"estimation.welch", "false"},
    {"estimation.project_nuisance", "false"},

    {"proposal.R", "4000"},
    {"proposal.psi", "auto"},
    {"proposal.nuisance", "auto"},
    {"proposal.sigma", "auto"},

    {"abc.tolerance", "0.1"},
    {"abc.distance", "scaled_absolute"},
    {"abc.pilot", "1000"},
    {"abc.bins", "200"},
    {"abc.threshold", "0.05"},
    {"abc.summaries", "median_difference,profile_estimating_equation,m_estimator"},

    {"boot.B", "1000"},
    {"boot.variants", "basic,normal,percentile,t_boot"},
    {"boot.estimator", "ml"},
    {"boot.transform", "identity"},

    {"study.replicates", "2000"},
    {"study.scenarios", "40:0,80:0,40:0.1,80:0.1"},
    {"study.methods", "all"},
    {"study.psi0", "2.6"},
    {"study.delta", "4"},
    {"study.alpha", "0.05"},
    {"study.mu_N", "120"},
    {"study.sigma", "4"},
    {"study.contamination_scale", "10"},
    {"study.contamination_direction", "-1"},

    {"npcd.theta0", "1"},
    {"npcd.n", "100"},
    {"npcd.levels", "0.05,0.1,0.15"},
    {"npcd.kinds", "ks,wasserstein1"},
    {"npcd.theta_ref", "auto"},
    {"npcd.reference_size", "auto"},
    {"npcd.proposal", "-3,3"},
    {"npcd.R", "4000"},
    {"npcd.bins", "200"},
    {"npcd.threshold", "0.05"},
    {"npcd.density_size", "1000"},
    {"npcd.independent_extremes", "false"},
    {"npcd.sweep", "false"},
    {"npcd.sweep_level", "0.2"},
    {"npcd.sweep_refs", "3,4,5,6,10,20,40,100"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> v;
    for (const auto& d : kDefaults) v.emplace_back(d.key);
    return v;
  }();
  return k;
}

Config::Config() {
  for (const auto& d : kDefaults) values_[d.key] = d.value;
}

void Config::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  const auto it = values_.find(k);
  if (it == values_.end()) {
    std::string known;
    const auto dot = k.find('.');
    const std::string section = k.substr(0, dot);
    for (const auto& d : kDefaults)
      if (std::string(d.key).rfind(section + ".", 0) == 0) known += fmt::format("{}{}", known.empty() ? "" : ", ", d.key);
    throw ConfigError(known.empty() ? fmt::format("unknown config key '{}'", k)
                                    : fmt::format("unknown config key '{}'; keys in [{}]: {}", k, section, known));
  }
  if (k == "run.version") return;  // recorded, not configurable
  it->second = trim(value);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(fmt::format("expected section.key=value, got '{}'", assignment));
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  return it->second;
}

bool Config::is_default(const std::string& key) const {
  for (const auto& d : kDefaults)
    if (key == d.key) return get(key) == d.value;
  return false;
}

double Config::real(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
  return x;
}

long long Config::integer(const std::string& key) const {
  const std::string& v = get(key);
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return x;
}

std::size_t Config::count(const std::string& key) const {
  const long long x = integer(key);
  if (x < 0) throw ConfigError(fmt::format("{}: must be non-negative", key));
  return static_cast<std::size_t>(x);
}

bool Config::flag(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::optional<std::vector<double>> Config::reals(const std::string& key) const {
  if (is_auto(key)) return std::nullopt;
  std::vector<double> out;
  for (const std::string& item : list(key)) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (*end != '\0') throw ConfigError(fmt::format("{}: '{}' is not a number", key, item));
    out.push_back(x);
  }
  return out;
}

Config Config::parse(std::istream& is) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(fmt::format("config: {}", e.message()), e.line());
  }
  Config c;
  for (const auto& [section, body] : pt) {
    if (body.empty()) throw ConfigError(fmt::format("config key '{}' outside a section", section));
    for (const auto& [key, value] : body) c.set(section + "." + key, value.data());
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path));
  return parse(in);
}

void Config::write(std::ostream& os) const {
  std::string section;
  for (const auto& d : kDefaults) {
    const std::string key = d.key;
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      if (!section.empty()) os << '\n';
      section = key.substr(0, dot);
      os << '[' << section << "]\n";
    }
    os << key.substr(dot + 1) << " = " << get(key) << '\n';
  }
}

void Config::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  write(out);
}

}  // namespace rcd
