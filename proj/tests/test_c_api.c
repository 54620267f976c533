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

/* Exercises the C interface from a C translation unit. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "tautset/tautset.h"

static int failures = 0;

#define EXPECT(cond)                                                       \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, \
                    __LINE__, #cond);                                      \
            ++failures;                                                    \
        }                                                                  \
    } while (0)

static int file_exists(const char* path) {
    FILE* f = fopen(path, "rb");
    if (!f) return 0;
    fclose(f);
    return 1;
}

int main(void) {
    tautset_config* cfg = NULL;
    tautset_model* model = NULL;
    char buf[4096];
    size_t needed = 0;
    int valid = 0;
    tautset_verdict v;
    double d = -1.0;
    tautset_summary s;
    tautset_oracle_summary o;

    tautset_set_log_level(0);
    EXPECT(strlen(tautset_version()) > 0);
    EXPECT(tautset_config_create(NULL) == TAUTSET_E_INVALID_ARGUMENT);
    EXPECT(strlen(tautset_last_error()) > 0);

    EXPECT(tautset_config_create(&cfg) == TAUTSET_OK);
    EXPECT(tautset_config_set(cfg, "M", "0.1") == TAUTSET_OK);
    EXPECT(tautset_config_set(cfg, "no_such_key", "1") == TAUTSET_E_CONFIG);
    EXPECT(strstr(tautset_last_error(), "no_such_key") != NULL);
    EXPECT(tautset_config_set(cfg, "M", "-1") == TAUTSET_OK);
    EXPECT(tautset_config_validate(cfg) == TAUTSET_E_CONFIG);
    EXPECT(tautset_model_build(cfg, &model) == TAUTSET_E_CONFIG);
    EXPECT(model == NULL);
    EXPECT(tautset_config_set(cfg, "M", "0.1") == TAUTSET_OK);
    EXPECT(tautset_config_validate(cfg) == TAUTSET_OK);

    EXPECT(tautset_config_get(cfg, "M", buf, sizeof buf, &needed) == TAUTSET_OK);
    EXPECT(strcmp(buf, "0.10000000000000001") == 0);
    EXPECT(tautset_config_get(cfg, "M", buf, 2, &needed) == TAUTSET_E_INVALID_ARGUMENT);
    EXPECT(needed == strlen("0.10000000000000001") + 1);
    EXPECT(tautset_config_render(cfg, NULL, 0, &needed) == TAUTSET_OK);
    EXPECT(needed > 100 && needed < sizeof buf);
    EXPECT(tautset_config_render(cfg, buf, sizeof buf, &needed) == TAUTSET_OK);
    EXPECT(strstr(buf, "tol_abs = ") != NULL);

    EXPECT(tautset_write_endpoints(cfg, "capi_out/endpoints.csv", "capi_out/roots.log", &valid) == TAUTSET_OK);
    EXPECT(valid == 1);
    EXPECT(file_exists("capi_out/endpoints.csv"));
    EXPECT(file_exists("capi_out/roots.log"));

    EXPECT(tautset_model_build(cfg, &model) == TAUTSET_OK);
    EXPECT(model != NULL);
    EXPECT(tautset_model_summary(model, &s) == TAUTSET_OK);
    EXPECT(s.arcs == 12);
    EXPECT(s.transversal_stopping_points >= 1);
    EXPECT(s.components == 1);
    EXPECT(s.bounded_components == 0);
    EXPECT(s.max_hamiltonian_drift <= 1e-6);

    EXPECT(tautset_model_query(model, 0.0, 0.0, &v, &d) == TAUTSET_OK);
    EXPECT(v == TAUTSET_OUTSIDE_G);
    EXPECT(tautset_model_query(model, 3.14159, 0.0, &v, &d) == TAUTSET_OK);
    EXPECT(v == TAUTSET_INTERIOR);
    EXPECT(tautset_model_query(model, -1.2, 3.5, &v, &d) == TAUTSET_OK);
    EXPECT(v == TAUTSET_INADMISSIBLE);
    EXPECT(d > 0.0);
    EXPECT(tautset_model_query(model, 0.0, 500.0, &v, &d) == TAUTSET_E_WINDOW_EXCEEDED);
    EXPECT(strcmp(tautset_verdict_name(TAUTSET_BOUNDARY), "Boundary") == 0);
    EXPECT(strcmp(tautset_status_name(TAUTSET_E_WINDOW_EXCEEDED), "window exceeded") == 0);

    EXPECT(tautset_model_export(model, "capi_out/barrier") == TAUTSET_OK);
    EXPECT(file_exists("capi_out/barrier/model.json"));
    EXPECT(file_exists("capi_out/barrier/barrier.svg"));
    EXPECT(file_exists("capi_out/barrier/arcs/arc_00.csv"));
    EXPECT(tautset_model_write_svg(model, "/proc/forbidden/x.svg") == TAUTSET_E_IO);

    EXPECT(tautset_config_set(cfg, "oracle_grid_theta1", "6") == TAUTSET_OK);
    tautset_model_destroy(model);
    model = NULL;
    EXPECT(tautset_config_set(cfg, "oracle_grid_theta2", "6") == TAUTSET_OK);
    EXPECT(tautset_model_build(cfg, &model) == TAUTSET_OK);
    EXPECT(tautset_model_oracle(model, NULL, &o) == TAUTSET_OK);
    EXPECT(o.points == 36);
    EXPECT(o.disagreements == 0);

    tautset_model_destroy(model);
    tautset_config_destroy(cfg);
    tautset_model_destroy(NULL);
    tautset_config_destroy(NULL);

    if (failures) {
        fprintf(stderr, "%d expectation(s) failed\n", failures);
        return EXIT_FAILURE;
    }
    printf("C API checks passed\n");
    return EXIT_SUCCESS;
}
