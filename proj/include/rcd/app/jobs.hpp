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
#include <functional>
#include <string>
#include <vector>

#include "rcd/app/config.hpp"
#include "rcd/harness/harness.hpp"

namespace rcd {

struct JobContext {
  std::string out_dir;
  unsigned workers = 0;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct JobResult {
  std::vector<std::string> files;  // written, relative to out_dir
  std::size_t failures = 0;        // failed methods (or study cells)
};

const std::vector<std::string>& subcommands();

/// Run the job named by run.subcommand and write its outputs plus
/// manifest.ini into ctx.out_dir. Rerunning from that manifest writes
/// byte-identical files.
JobResult run_job(Config cfg, const JobContext& ctx);

/// Method settings from [estimation], [proposal], [abc] and [boot]. With a
/// dataset, partially specified proposals are completed from
/// default_proposal(d).
MethodConfig method_config(const Config& cfg, const Dataset* d);

/// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_fingerprint(const std::string& path);

}  // namespace rcd
