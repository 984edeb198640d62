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

#include "rcd/rcd.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <tuple>

#include "rcd/app/config.hpp"
#include "rcd/app/jobs.hpp"
#include "rcd/cd/io.hpp"
#include "rcd/core/error.hpp"
#include "rcd/harness/harness.hpp"
#include "rcd/models/dataset.hpp"

struct rcd_config {
  rcd::Config cfg;
};

struct rcd_dataset {
  rcd::Dataset d;
};

struct rcd_cd {
  rcd::ConfidenceDistribution cd;
};

namespace {

thread_local std::string last_error;

rcd_status fail(rcd_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Run fn, mapping exceptions to status codes.
template <class F>
rcd_status guard(F&& fn) {
  try {
    fn();
    last_error.clear();
    return RCD_OK;
  } catch (const rcd::Error& e) {
    return fail(static_cast<rcd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RCD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RCD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RCD_ERR_INTERNAL, "unknown error");
  }
}

#define RCD_REQUIRE(p)                                             \
  do {                                                             \
    if (!(p)) return fail(RCD_ERR_ARGUMENT, "null argument: " #p); \
  } while (0)

std::string out_dir_or_default(const char* out_dir) {
  if (out_dir && *out_dir) return out_dir;
  if (const char* env = std::getenv("RCD_OUTPUT_DIR"); env && *env) return env;
  return "rcd_out";
}

}  // namespace

extern "C" {

const char* rcd_version(void) { return RCD_VERSION_STRING; }

const char* rcd_last_error(void) { return last_error.c_str(); }

const char* rcd_status_name(rcd_status s) {
  switch (s) {
    case RCD_OK: return "ok";
    case RCD_ERR_ARGUMENT: return "argument error";
    case RCD_ERR_PARSE: return "parse error";
    case RCD_ERR_CONFIG: return "config error";
    case RCD_ERR_NUMERIC: return "numeric error";
    case RCD_ERR_IO: return "io error";
    case RCD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rcd_status rcd_config_new(rcd_config** out) {
  RCD_REQUIRE(out);
  return guard([&] { *out = new rcd_config{}; });
}

rcd_status rcd_config_load(const char* path, rcd_config** out) {
  RCD_REQUIRE(path);
  RCD_REQUIRE(out);
  return guard([&] { *out = new rcd_config{rcd::Config::load(path)}; });
}

rcd_status rcd_config_set(rcd_config* cfg, const char* key, const char* value) {
  RCD_REQUIRE(cfg);
  RCD_REQUIRE(key);
  RCD_REQUIRE(value);
  return guard([&] { cfg->cfg.set(key, value); });
}

rcd_status rcd_config_assign(rcd_config* cfg, const char* assignment) {
  RCD_REQUIRE(cfg);
  RCD_REQUIRE(assignment);
  return guard([&] { cfg->cfg.set(std::string(assignment)); });
}

rcd_status rcd_config_get(const rcd_config* cfg, const char* key, char* buf, size_t len, size_t* needed) {
  RCD_REQUIRE(cfg);
  RCD_REQUIRE(key);
  return guard([&] {
    const std::string& v = cfg->cfg.get(key);
    if (needed) *needed = v.size() + 1;
    if (buf && len > 0) {
      const size_t n = std::min(len - 1, v.size());
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
  });
}

rcd_status rcd_config_save(const rcd_config* cfg, const char* path) {
  RCD_REQUIRE(cfg);
  RCD_REQUIRE(path);
  return guard([&] { cfg->cfg.save(path); });
}

void rcd_config_free(rcd_config* cfg) { delete cfg; }

const char* rcd_config_keys(void) {
  static const std::string keys = [] {
    std::string s;
    for (const auto& k : rcd::Config::keys()) s += k + "\n";
    return s;
  }();
  return keys.c_str();
}

const char* rcd_methods(void) {
  static const std::string names = [] {
    std::string s;
    for (rcd::Method m : rcd::all_methods()) s += (s.empty() ? "" : ",") + std::string(rcd::to_string(m));
    return s;
  }();
  return names.c_str();
}

rcd_status rcd_dataset_read_csv(const char* path, rcd_dataset** out) {
  RCD_REQUIRE(path);
  RCD_REQUIRE(out);
  return guard([&] { *out = new rcd_dataset{rcd::read_csv_file(path)}; });
}

rcd_status rcd_dataset_size(const rcd_dataset* d, size_t* n) {
  RCD_REQUIRE(d);
  RCD_REQUIRE(n);
  *n = static_cast<size_t>(d->d.n());
  last_error.clear();
  return RCD_OK;
}

const char* rcd_dataset_kind(const rcd_dataset* d) { return d ? rcd::to_string(d->d.kind) : ""; }

void rcd_dataset_free(rcd_dataset* d) { delete d; }

rcd_status rcd_cd_build(const rcd_dataset* d, const char* method, const rcd_config* cfg, rcd_cd** out) {
  RCD_REQUIRE(d);
  RCD_REQUIRE(method);
  RCD_REQUIRE(out);
  return guard([&] {
    const rcd::Config defaults;
    const rcd::Config& c = cfg ? cfg->cfg : defaults;
    const rcd::Method m = rcd::method_from_string(method);
    const long long seed = c.integer("run.seed");
    const auto outcomes = rcd::build_cds(d->d, {m}, rcd::method_config(c, &d->d), static_cast<std::uint64_t>(seed));
    if (!outcomes[0].cd) throw rcd::NumericError(outcomes[0].error);
    *out = new rcd_cd{*outcomes[0].cd};
  });
}

rcd_status rcd_cd_evaluate(const rcd_cd* cd, double psi, double* c) {
  RCD_REQUIRE(cd);
  RCD_REQUIRE(c);
  return guard([&] { *c = cd->cd.evaluate(psi); });
}

rcd_status rcd_cd_quantile(const rcd_cd* cd, double alpha, double* psi) {
  RCD_REQUIRE(cd);
  RCD_REQUIRE(psi);
  return guard([&] { *psi = cd->cd.quantile(alpha); });
}

rcd_status rcd_cd_interval(const rcd_cd* cd, double level, double* lo, double* hi) {
  RCD_REQUIRE(cd);
  RCD_REQUIRE(lo);
  RCD_REQUIRE(hi);
  return guard([&] { std::tie(*lo, *hi) = cd->cd.interval(level); });
}

rcd_status rcd_cd_median(const rcd_cd* cd, double* median) {
  RCD_REQUIRE(cd);
  RCD_REQUIRE(median);
  return guard([&] { *median = cd->cd.median(); });
}

rcd_status rcd_cd_evidence_above(const rcd_cd* cd, double delta, double* evidence) {
  RCD_REQUIRE(cd);
  RCD_REQUIRE(evidence);
  return guard([&] { *evidence = 1.0 - cd->cd.evaluate(delta); });
}

rcd_status rcd_cd_save(const rcd_cd* cd, const char* path) {
  RCD_REQUIRE(cd);
  RCD_REQUIRE(path);
  return guard([&] { rcd::save_cd(path, cd->cd); });
}

void rcd_cd_free(rcd_cd* cd) { delete cd; }

rcd_status rcd_run(const rcd_config* cfg, const char* out_dir, unsigned workers, rcd_progress_fn progress, void* user) {
  RCD_REQUIRE(cfg);
  return guard([&] {
    rcd::JobContext ctx;
    ctx.out_dir = out_dir_or_default(out_dir);
    ctx.workers = workers;
    if (progress) ctx.progress = [progress, user](std::size_t done, std::size_t total) { progress(done, total, user); };
    rcd::run_job(cfg->cfg, ctx);
  });
}

rcd_status rcd_rerun(const char* manifest, const char* out_dir, unsigned workers, rcd_progress_fn progress, void* user) {
  RCD_REQUIRE(manifest);
  rcd_config* cfg = nullptr;
  if (const rcd_status s = rcd_config_load(manifest, &cfg); s != RCD_OK) return s;
  const rcd_status s = rcd_run(cfg, out_dir, workers, progress, user);
  rcd_config_free(cfg);
  return s;
}

}  // extern "C"
