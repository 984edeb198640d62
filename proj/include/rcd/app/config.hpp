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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rcd {

/// Sectioned key=value configuration. Every known key has a default; the
/// manifest written next to job outputs lists all of them, so loading it
/// reproduces the job. Unknown keys are rejected.
class Config {
 public:
  Config();

  static Config load(const std::string& path);
  static Config parse(std::istream& is);

  /// "section.key=value" (the --set form).
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool is_default(const std::string& key) const;

  std::string str(const std::string& key) const { return get(key); }
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;  // non-negative integer
  bool flag(const std::string& key) const;
  /// Comma-separated reals; "auto" gives nullopt.
  std::optional<std::vector<double>> reals(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  bool is_auto(const std::string& key) const { return get(key) == "auto"; }

  /// INI text with every key, sections in a fixed order.
  void write(std::ostream& os) const;
  void save(const std::string& path) const;

  static const std::vector<std::string>& keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace rcd
