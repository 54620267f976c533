/*
 Copyright 2026 The tautset Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

/* C interface to the admissible-set library. All handles are opaque; every call
 * returns a status code and leaves a message in tautset_last_error() on failure.
 * The message buffer is thread-local and valid until the next failing call on the
 * same thread. */

#ifndef TAUTSET_TAUTSET_H
#define TAUTSET_TAUTSET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define TAUTSET_API __attribute__((visibility("default")))
#else
#define TAUTSET_API
#endif

typedef enum tautset_status {
    TAUTSET_OK = 0,
    TAUTSET_E_INVALID_ARGUMENT = 1,
    TAUTSET_E_CONFIG = 2,
    TAUTSET_E_EMPTY_CONTROL_SET = 3,
    TAUTSET_E_SINGULAR_MULTIPLIER = 4,
    TAUTSET_E_SYMMETRY_VALIDATION = 5,
    TAUTSET_E_SPURIOUS_ROOT = 6,
    TAUTSET_E_VERIFICATION = 7,
    TAUTSET_E_STEP_FAILURE = 8,
    TAUTSET_E_STITCH_GAP = 9,
    TAUTSET_E_WINDOW_EXCEEDED = 10,
    TAUTSET_E_ORACLE_DISAGREEMENT = 11,
    TAUTSET_E_IO = 12,
    TAUTSET_E_INTERNAL = 13
} tautset_status;

typedef enum tautset_verdict {
    TAUTSET_INTERIOR = 0,
    TAUTSET_BOUNDARY = 1,
    TAUTSET_INADMISSIBLE = 2,
    TAUTSET_OUTSIDE_G = 3
} tautset_verdict;

typedef struct tautset_config tautset_config;
typedef struct tautset_model tautset_model;

typedef struct tautset_summary {
    size_t endpoints;
    size_t arcs;
    size_t stopping_points;
    size_t transversal_stopping_points;
    size_t inadmissible_cells;
    size_t components;
    size_t bounded_components;
    double max_hamiltonian_drift;
    double seconds;
} tautset_summary;

typedef struct tautset_oracle_summary {
    size_t points;
    size_t policies;
    size_t disagreements;
    size_t reverse_disagreements;
    double band;
} tautset_oracle_summary;

TAUTSET_API const char* tautset_version(void);
TAUTSET_API const char* tautset_last_error(void);
TAUTSET_API const char* tautset_status_name(tautset_status status);
TAUTSET_API const char* tautset_verdict_name(tautset_verdict verdict);

/* Verbosity of the library log on stderr: 0 off, 1 warnings, 2 info, 3 debug. */
TAUTSET_API void tautset_set_log_level(int level);

TAUTSET_API tautset_status tautset_config_create(tautset_config** out);
TAUTSET_API void tautset_config_destroy(tautset_config* cfg);
TAUTSET_API tautset_status tautset_config_load_file(tautset_config* cfg, const char* path);
TAUTSET_API tautset_status tautset_config_set(tautset_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated). *needed receives the required size including the NUL. */
TAUTSET_API tautset_status tautset_config_get(const tautset_config* cfg, const char* key, char* buf, size_t len,
                                              size_t* needed);
TAUTSET_API tautset_status tautset_config_render(const tautset_config* cfg, char* buf, size_t len, size_t* needed);
TAUTSET_API tautset_status tautset_config_validate(const tautset_config* cfg);

/* Endpoints with residuals as CSV; *all_valid is 0 if a tangentiality check fails. */
TAUTSET_API tautset_status tautset_write_endpoints(const tautset_config* cfg, const char* csv_path,
                                                   const char* log_path, int* all_valid);

TAUTSET_API tautset_status tautset_model_build(const tautset_config* cfg, tautset_model** out);
TAUTSET_API void tautset_model_destroy(tautset_model* model);
TAUTSET_API tautset_status tautset_model_summary(const tautset_model* model, tautset_summary* out);
/* Thread-safe on a shared model. */
TAUTSET_API tautset_status tautset_model_query(const tautset_model* model, double theta1, double theta2,
                                               tautset_verdict* verdict, double* distance);
/* Arc CSVs, events, stopping points, JSON model and SVG under dir. */
TAUTSET_API tautset_status tautset_model_export(const tautset_model* model, const char* dir);
TAUTSET_API tautset_status tautset_model_write_stopping_points(const tautset_model* model, const char* path);
TAUTSET_API tautset_status tautset_model_write_svg(const tautset_model* model, const char* path);
TAUTSET_API tautset_status tautset_model_write_json(const tautset_model* model, const char* path);
/* Brute-force oracle on the configured grid; csv_path may be NULL. */
TAUTSET_API tautset_status tautset_model_oracle(const tautset_model* model, const char* csv_path,
                                                tautset_oracle_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* TAUTSET_TAUTSET_H */
