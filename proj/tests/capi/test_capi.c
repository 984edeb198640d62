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

// Exercises the C interface from C, linking librcd only.

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "rcd/rcd.h"

static int failures = 0;

#define CHECK(cond)                                                 \
  do {                                                              \
    if (!(cond)) {                                                  \
      fprintf(stderr, "%s:%d: CHECK(%s) failed: %s\n", __FILE__,    \
              __LINE__, #cond, rcd_last_error());                   \
      ++failures;                                                   \
    }                                                               \
  } while (0)

static const char* tmpdir(void) {
  const char* t = getenv("TMPDIR");
  return t && *t ? t : "/tmp";
}

static void write_file(const char* path, const char* text) {
  FILE* f = fopen(path, "w");
  fputs(text, f);
  fclose(f);
}

static char* slurp(const char* path) {
  FILE* f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  fseek(f, 0, SEEK_SET);
  char* s = malloc((size_t)n + 1);
  size_t got = fread(s, 1, (size_t)n, f);
  s[got] = 0;
  fclose(f);
  return s;
}

static void test_config(void) {
  rcd_config* cfg = NULL;
  CHECK(rcd_config_new(&cfg) == RCD_OK);
  char buf[64];
  size_t need = 0;
  CHECK(rcd_config_get(cfg, "proposal.R", buf, sizeof buf, &need) == RCD_OK);
  CHECK(strcmp(buf, "4000") == 0 && need == 5);

  CHECK(rcd_config_set(cfg, "proposal.R", "123") == RCD_OK);
  CHECK(rcd_config_assign(cfg, "study.replicates=7") == RCD_OK);
  CHECK(rcd_config_get(cfg, "study.replicates", buf, sizeof buf, NULL) == RCD_OK);
  CHECK(strcmp(buf, "7") == 0);

  // Truncation still reports the full length.
  char tiny[3];
  CHECK(rcd_config_get(cfg, "study.scenarios", tiny, sizeof tiny, &need) == RCD_OK);
  CHECK(strlen(tiny) == 2 && need > 2);

  CHECK(rcd_config_set(cfg, "proposal.nope", "1") == RCD_ERR_CONFIG);
  CHECK(strstr(rcd_last_error(), "proposal.R") != NULL);
  CHECK(rcd_config_assign(cfg, "no_equals_sign") == RCD_ERR_CONFIG);
  CHECK(rcd_config_get(cfg, "bogus.key", buf, sizeof buf, NULL) == RCD_ERR_CONFIG);
  CHECK(rcd_config_set(NULL, "proposal.R", "1") == RCD_ERR_ARGUMENT);

  char path[512];
  snprintf(path, sizeof path, "%s/rcd_capi_cfg.ini", tmpdir());
  CHECK(rcd_config_save(cfg, path) == RCD_OK);
  rcd_config* back = NULL;
  CHECK(rcd_config_load(path, &back) == RCD_OK);
  CHECK(rcd_config_get(back, "proposal.R", buf, sizeof buf, NULL) == RCD_OK);
  CHECK(strcmp(buf, "123") == 0);
  rcd_config_free(back);

  write_file(path, "[proposal]\nR = 10\n[mystery]\nx = 1\n");
  CHECK(rcd_config_load(path, &back) == RCD_ERR_CONFIG);
  write_file(path, "[proposal\nR = 10\n");
  CHECK(rcd_config_load(path, &back) == RCD_ERR_PARSE);
  CHECK(rcd_config_load("/nonexistent/rcd.ini", &back) == RCD_ERR_IO);

  CHECK(strstr(rcd_config_keys(), "abc.tolerance") != NULL);
  CHECK(strstr(rcd_methods(), "CDensity/M-EE") != NULL);
  CHECK(strlen(rcd_version()) > 0);
  CHECK(strcmp(rcd_status_name(RCD_ERR_NUMERIC), "numeric error") == 0);
  rcd_config_free(cfg);
}

static void test_dataset_and_cd(void) {
  char path[512];
  snprintf(path, sizeof path, "%s/rcd_capi_data.csv", tmpdir());
  write_file(path, "y,group\n1,S\n2,S\n3,S\n1.5,N\n2.5,N\n3.5,N\n");
  rcd_dataset* d = NULL;
  CHECK(rcd_dataset_read_csv(path, &d) == RCD_OK);
  size_t n = 0;
  CHECK(rcd_dataset_size(d, &n) == RCD_OK && n == 6);
  CHECK(strcmp(rcd_dataset_kind(d), "two_sample") == 0);

  // Pooled t: estimate -0.5 (standard minus new), se = sqrt(2/3).
  rcd_cd* cd = NULL;
  CHECK(rcd_cd_build(d, "Wald/Mean", NULL, &cd) == RCD_OK);
  double m = 0, lo = 0, hi = 0, c = 0, e = 0, q = 0;
  CHECK(rcd_cd_median(cd, &m) == RCD_OK && fabs(m + 0.5) < 1e-12);
  CHECK(rcd_cd_evaluate(cd, m, &c) == RCD_OK && fabs(c - 0.5) < 1e-9);
  CHECK(rcd_cd_interval(cd, 0.95, &lo, &hi) == RCD_OK);
  CHECK(fabs((m - lo) - (hi - m)) < 1e-9 && lo < m && m < hi);
  CHECK(rcd_cd_quantile(cd, 0.975, &q) == RCD_OK && fabs(q - hi) < 1e-9);
  CHECK(rcd_cd_evidence_above(cd, m, &e) == RCD_OK && fabs(e - 0.5) < 1e-9);
  CHECK(rcd_cd_quantile(cd, 1.5, &q) == RCD_ERR_ARGUMENT);
  char out[512];
  snprintf(out, sizeof out, "%s/rcd_capi_cd.csv", tmpdir());
  CHECK(rcd_cd_save(cd, out) == RCD_OK);
  rcd_cd_free(cd);

  CHECK(rcd_cd_build(d, "Wald/Nothing", NULL, &cd) == RCD_ERR_CONFIG);
  CHECK(strstr(rcd_last_error(), "Wald/Mean") != NULL);

  rcd_config* cfg = NULL;
  rcd_config_new(&cfg);
  rcd_config_set(cfg, "proposal.R", "2000");
  rcd_config_set(cfg, "run.seed", "5");
  CHECK(rcd_cd_build(d, "ABC/Median", cfg, &cd) == RCD_OK);
  rcd_cd* again = NULL;
  CHECK(rcd_cd_build(d, "ABC/Median", cfg, &again) == RCD_OK);
  double a = 0, b = 0;
  rcd_cd_median(cd, &a);
  rcd_cd_median(again, &b);
  CHECK(a == b);
  rcd_cd_free(cd);
  rcd_cd_free(again);
  rcd_config_free(cfg);
  rcd_dataset_free(d);

  write_file(path, "y,group\n1,S\nabc,N\n");
  CHECK(rcd_dataset_read_csv(path, &d) == RCD_ERR_PARSE);
  CHECK(strstr(rcd_last_error(), "line 3") != NULL);
  CHECK(rcd_dataset_read_csv("/nonexistent/x.csv", &d) == RCD_ERR_IO);
}

static size_t ticks = 0;
static void on_progress(size_t done, size_t total, void* user) {
  (void)done;
  (void)total;
  ++*(size_t*)user;
}

static void test_run_and_rerun(void) {
  char dir[512], dir2[512], manifest[600], a[600], b[600];
  snprintf(dir, sizeof dir, "%s/rcd_capi_run", tmpdir());
  snprintf(dir2, sizeof dir2, "%s/rcd_capi_rerun", tmpdir());
  rcd_config* cfg = NULL;
  rcd_config_new(&cfg);
  CHECK(rcd_config_set(cfg, "run.subcommand", "simulate") == RCD_OK);
  rcd_config_set(cfg, "study.replicates", "3");
  rcd_config_set(cfg, "study.scenarios", "20:0,20:0.1");
  rcd_config_set(cfg, "study.methods", "Wald/Mean,Wald/M-test,Boot/Perc");
  rcd_config_set(cfg, "boot.B", "199");
  CHECK(rcd_run(cfg, dir, 1, on_progress, &ticks) == RCD_OK);
  CHECK(ticks > 0);

  snprintf(manifest, sizeof manifest, "%s/manifest.ini", dir);
  CHECK(rcd_rerun(manifest, dir2, 2, NULL, NULL) == RCD_OK);
  snprintf(a, sizeof a, "%s/study.csv", dir);
  snprintf(b, sizeof b, "%s/study.csv", dir2);
  char* sa = slurp(a);
  char* sb = slurp(b);
  CHECK(sa && sb && strcmp(sa, sb) == 0);
  free(sa);
  free(sb);

  rcd_config_set(cfg, "run.subcommand", "analyze");
  rcd_config_set(cfg, "run.input", "/nonexistent/data.csv");
  CHECK(rcd_run(cfg, dir, 1, NULL, NULL) == RCD_ERR_IO);
  CHECK(strlen(rcd_last_error()) > 0);
  rcd_config_free(cfg);
  CHECK(rcd_rerun("/nonexistent/manifest.ini", dir2, 1, NULL, NULL) == RCD_ERR_IO);
}

int main(void) {
  test_config();
  test_dataset_and_cd();
  test_run_and_rerun();
  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  else printf("all C API checks passed\n");
  return failures ? 1 : 0;
}
