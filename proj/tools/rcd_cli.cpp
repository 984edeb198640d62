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

// rcdtool: command-line front end over the C interface.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rcd/rcd.h"

namespace {

struct Options {
  std::string config, out, input, manifest, methods, margins;
  std::vector<std::string> sets;
  unsigned workers = 0;
  std::optional<long long> seed, replicates;
  bool methods_given = false;
  bool plots = false;
  bool quiet = false;
};

int exit_code(rcd_status s) {
  switch (s) {
    case RCD_OK: return 0;
    case RCD_ERR_PARSE: return 2;
    case RCD_ERR_CONFIG:
    case RCD_ERR_ARGUMENT: return 3;
    case RCD_ERR_NUMERIC: return 4;
    default: return 1;
  }
}

int report(rcd_status s) {
  if (s != RCD_OK) std::fprintf(stderr, "rcdtool: %s: %s\n", rcd_status_name(s), rcd_last_error());
  return exit_code(s);
}

void progress(size_t done, size_t total, void* user) {
  auto* last = static_cast<size_t*>(user);
  const size_t pct = total ? 100 * done / total : 100;
  if (pct / 10 != *last / 10 || done == total) {
    std::fprintf(stderr, "  %zu/%zu replicate jobs\n", done, total);
    *last = pct;
  }
}

// Config file, then --set assignments, then dedicated flags.
rcd_status build_config(const std::string& sub, const Options& o, rcd_config** cfg) {
  rcd_status s = o.config.empty() ? rcd_config_new(cfg) : rcd_config_load(o.config.c_str(), cfg);
  if (s != RCD_OK) return s;
  auto set = [&](const char* key, const std::string& value) {
    if (s == RCD_OK) s = rcd_config_set(*cfg, key, value.c_str());
  };
  set("run.subcommand", sub);
  for (const std::string& a : o.sets)
    if (s == RCD_OK) s = rcd_config_assign(*cfg, a.c_str());
  if (!o.input.empty()) set("run.input", o.input);
  if (o.seed) set("run.seed", std::to_string(*o.seed));
  if (o.plots) set("run.plots", "true");
  if (o.methods_given) set(sub == "simulate" ? "study.methods" : "estimation.methods", o.methods);
  if (!o.margins.empty()) set("estimation.margins", o.margins);
  if (o.replicates) set("study.replicates", std::to_string(*o.replicates));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence distributions from robust estimating functions"};
  app.set_version_flag("--version", std::string(rcd_version()));
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sc) {
    sc->add_option("-c,--config", o.config, "INI config file (sections [run], [estimation], [proposal], ...)");
    sc->add_option("--set", o.sets, "Override a config key: section.key=value (repeatable)");
    sc->add_option("-o,--out", o.out, "Output directory (default: $RCD_OUTPUT_DIR, else ./rcd_out)");
    sc->add_option("-w,--workers", o.workers, "Worker threads (0 = all cores)");
    sc->add_option("--seed", o.seed, "Master seed");
    sc->add_flag("--plots", o.plots, "Also write SVG plots");
    sc->add_flag("-q,--quiet", o.quiet, "No progress output");
  };

  auto* analyze = app.add_subcommand("analyze", "CDs, intervals, p-values and evidence for every method on a CSV");
  analyze->add_option("input", o.input, "CSV: y,group | y_fu,y_bl,p | y")->required();
  analyze->add_option("--methods", o.methods, std::string("Comma list of methods: ") + rcd_methods());
  analyze->add_option("--margins", o.margins, "Comma list of margins delta for evidence 1 - C(delta)");
  common(analyze);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage and stability study");
  simulate->add_option("--methods", o.methods, "Comma list of methods, or 'all'");
  simulate->add_option("--replicates", o.replicates, "Replicates per scenario");
  common(simulate);

  auto* npcd = app.add_subcommand("npcd", "Kolmogorov-Smirnov and Wasserstein CDs under contamination");
  npcd->add_option("input", o.input, "Optional one-sample CSV (column y); synthetic study when absent");
  common(npcd);

  auto* boot = app.add_subcommand("boot", "Parametric bootstrap CDs");
  boot->add_option("input", o.input, "CSV input")->required();
  common(boot);

  auto* abc = app.add_subcommand("abc", "Accept-reject ABC and significance CDs for each summary");
  abc->add_option("input", o.input, "CSV input")->required();
  common(abc);

  auto* rerun = app.add_subcommand("rerun", "Repeat a job from its manifest.ini");
  rerun->add_option("manifest", o.manifest, "manifest.ini written by an earlier job")->required();
  rerun->add_option("-o,--out", o.out, "Output directory");
  rerun->add_option("-w,--workers", o.workers, "Worker threads (0 = all cores)");
  rerun->add_flag("-q,--quiet", o.quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  size_t last = 0;
  rcd_progress_fn cb = o.quiet ? nullptr : progress;
  const char* out = o.out.empty() ? nullptr : o.out.c_str();
  if (rerun->parsed()) return report(rcd_rerun(o.manifest.c_str(), out, o.workers, cb, &last));

  CLI::App* chosen = app.get_subcommands().front();
  const std::string sub = chosen->get_name();
  if (auto* m = chosen->get_option_no_throw("--methods")) o.methods_given = m->count() > 0;
  rcd_config* cfg = nullptr;
  rcd_status s = build_config(sub, o, &cfg);
  if (s == RCD_OK) s = rcd_run(cfg, out, o.workers, cb, &last);
  rcd_config_free(cfg);
  return report(s);
}
