// Copyright 2026 The ddoslab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef DDOSLAB_DDOSLAB_H_
#define DDOSLAB_DDOSLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DDOSLAB_BUILDING_LIBRARY)
#define DDL_API __attribute__((visibility("default")))
#else
#define DDL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command line tool. */
typedef enum ddl_status {
  DDL_OK = 0,
  DDL_ERROR = 1,        /* anything not covered below */
  DDL_CONFIG_ERROR = 2, /* bad or missing configuration */
  DDL_DATA_ERROR = 3,   /* missing, malformed or stale input data */
  DDL_INVALID_ARGUMENT = 4
} ddl_status;

/* Message of the last failure on the calling thread ("" if none). */
DDL_API const char* ddl_last_error(void);
DDL_API const char* ddl_version(void);

/* log_level: trace, debug, info, warn, error, off */
DDL_API ddl_status ddl_set_log_level(const char* level);

/* ---- metrics; labels are 0 = benign, 1 = ddos ---- */
DDL_API ddl_status ddl_roc_auc(const double* scores, const int* labels, size_t n, double* out);
DDL_API ddl_status ddl_f1(const int* predictions, const int* labels, size_t n, double* out);
/* Linear-interpolation quantile, q in [0, 1]. */
DDL_API ddl_status ddl_quantile(const double* values, size_t n, double q, double* out);

/* ---- processed flow tables ---- */
typedef struct ddl_table ddl_table;

DDL_API ddl_status ddl_table_read_csv(const char* path, ddl_table** out);
DDL_API void ddl_table_free(ddl_table* table);
DDL_API size_t ddl_table_rows(const ddl_table* table);
DDL_API size_t ddl_table_cols(const ddl_table* table);
/* Copies the labels (0/1) into out, which holds ddl_table_rows() ints. */
DDL_API ddl_status ddl_table_labels(const ddl_table* table, int* out, size_t n);

/* ---- calibrated GANomaly detectors ---- */
typedef struct ddl_detector ddl_detector;

/* model_dir is a train-local / federate output directory; silo picks the
   calibration (scaler, normalisation, threshold) to use. */
DDL_API ddl_status ddl_detector_load(const char* model_dir, const char* silo, ddl_detector** out);
DDL_API void ddl_detector_free(ddl_detector* detector);
DDL_API double ddl_detector_threshold(const ddl_detector* detector);
/* Writes one normalised score per row into scores (capacity n). */
DDL_API ddl_status ddl_detector_score(const ddl_detector* detector, const ddl_table* table, double* scores, size_t n);

/* ---- pipeline commands ---- */
typedef struct ddl_cmd_options {
  const char* config;   /* JSON config path; may be NULL for maketoy/crosseval */
  const char* out;      /* output directory override; NULL keeps the config's */
  int has_seed;         /* non-zero: seed overrides config and environment */
  uint64_t seed;
  const char* bind;     /* federate serve: host:port */
  const char* server;   /* federate client: host:port */
  const char* models;   /* crosseval */
  const char* datasets; /* crosseval */
  const char* preset;   /* maketoy */
} ddl_cmd_options;

DDL_API void ddl_cmd_options_init(ddl_cmd_options* options);

/* command: "preprocess", "train-local", "federate simulate", "federate serve",
   "federate client", "generate", "audit", "crosseval", "external pretrain",
   "external finetune", "external eval", "maketoy" or "report". */
DDL_API ddl_status ddl_cmd_run(const char* command, const ddl_cmd_options* options);

/* Output fingerprint of the last successful ddl_cmd_run on this thread. */
DDL_API const char* ddl_cmd_last_fingerprint(void);

#ifdef __cplusplus
}
#endif

#endif /* DDOSLAB_DDOSLAB_H_ */
