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

/* C interface to rcd. All handles are opaque; every call that can fail
 * returns an rcd_status and leaves a message for rcd_last_error() on the
 * calling thread. */

#ifndef RCD_RCD_H
#define RCD_RCD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define RCD_API __attribute__((visibility("default")))
#else
#define RCD_API
#endif

typedef enum rcd_status {
  RCD_OK = 0,
  RCD_ERR_ARGUMENT = 1,
  RCD_ERR_PARSE = 2,
  RCD_ERR_CONFIG = 3,
  RCD_ERR_NUMERIC = 4,
  RCD_ERR_IO = 5,
  RCD_ERR_INTERNAL = 6
} rcd_status;

typedef struct rcd_config rcd_config;
typedef struct rcd_dataset rcd_dataset;
typedef struct rcd_cd rcd_cd;

typedef void (*rcd_progress_fn)(size_t done, size_t total, void* user);

RCD_API const char* rcd_version(void);
/* Message of the last failed call on this thread ("" if none). */
RCD_API const char* rcd_last_error(void);
RCD_API const char* rcd_status_name(rcd_status s);

/* Configuration: sectioned keys such as "proposal.R" with defaults. */
RCD_API rcd_status rcd_config_new(rcd_config** out);
RCD_API rcd_status rcd_config_load(const char* path, rcd_config** out);
RCD_API rcd_status rcd_config_set(rcd_config* cfg, const char* key, const char* value);
/* "section.key=value" form. */
RCD_API rcd_status rcd_config_assign(rcd_config* cfg, const char* assignment);
/* Copies the value into buf (truncating); *needed gets the buffer size
 * required, terminator included. */
RCD_API rcd_status rcd_config_get(const rcd_config* cfg, const char* key, char* buf, size_t len, size_t* needed);
RCD_API rcd_status rcd_config_save(const rcd_config* cfg, const char* path);
RCD_API void rcd_config_free(rcd_config* cfg);
/* Newline-separated list of every key; static storage. */
RCD_API const char* rcd_config_keys(void);
/* Comma-separated method names; static storage. */
RCD_API const char* rcd_methods(void);

RCD_API rcd_status rcd_dataset_read_csv(const char* path, rcd_dataset** out);
RCD_API rcd_status rcd_dataset_size(const rcd_dataset* d, size_t* n);
/* "one_sample", "two_sample" or "regression"; static storage. */
RCD_API const char* rcd_dataset_kind(const rcd_dataset* d);
RCD_API void rcd_dataset_free(rcd_dataset* d);

/* CD of one method ("Wald/Mean", "CDensity/M-EE", ...) on a dataset, using
 * the estimation, proposal, abc and boot settings of cfg (NULL: defaults). */
RCD_API rcd_status rcd_cd_build(const rcd_dataset* d, const char* method, const rcd_config* cfg, rcd_cd** out);
RCD_API rcd_status rcd_cd_evaluate(const rcd_cd* cd, double psi, double* c);
RCD_API rcd_status rcd_cd_quantile(const rcd_cd* cd, double alpha, double* psi);
RCD_API rcd_status rcd_cd_interval(const rcd_cd* cd, double level, double* lo, double* hi);
RCD_API rcd_status rcd_cd_median(const rcd_cd* cd, double* median);
/* 1 - C(delta): evidence for psi > delta. */
RCD_API rcd_status rcd_cd_evidence_above(const rcd_cd* cd, double delta, double* evidence);
RCD_API rcd_status rcd_cd_save(const rcd_cd* cd, const char* path);
RCD_API void rcd_cd_free(rcd_cd* cd);

/* Run the job named by run.subcommand, writing outputs and manifest.ini to
 * out_dir (NULL: $RCD_OUTPUT_DIR, else "rcd_out"). workers = 0 uses every
 * core. progress may be NULL. */
RCD_API rcd_status rcd_run(const rcd_config* cfg, const char* out_dir, unsigned workers, rcd_progress_fn progress,
                           void* user);
/* Load a manifest and run it again. */
RCD_API rcd_status rcd_rerun(const char* manifest, const char* out_dir, unsigned workers, rcd_progress_fn progress,
                             void* user);

#ifdef __cplusplus
}
#endif

#endif /* RCD_RCD_H */
