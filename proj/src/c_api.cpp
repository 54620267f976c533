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

#include "tautset/tautset.h"

#include <chrono>
#include <cstring>
#include <fstream>
#include <algorithm>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "tautset/config.hpp"
#include "tautset/error.hpp"
#include "tautset/export.hpp"
#include "tautset/pipeline.hpp"

struct tautset_config {
    tautset::RunConfig cfg;
};

struct tautset_model {
    tautset::PipelineResult result;
    double seconds = 0.0;
};

namespace {

thread_local std::string g_last_error;

tautset_status map_code(tautset::ErrorCode c) {
    using tautset::ErrorCode;
    switch (c) {
        case ErrorCode::InvalidArgument: return TAUTSET_E_INVALID_ARGUMENT;
        case ErrorCode::Config: return TAUTSET_E_CONFIG;
        case ErrorCode::EmptyControlSet: return TAUTSET_E_EMPTY_CONTROL_SET;
        case ErrorCode::SingularMultiplier: return TAUTSET_E_SINGULAR_MULTIPLIER;
        case ErrorCode::SymmetryValidationFailed: return TAUTSET_E_SYMMETRY_VALIDATION;
        case ErrorCode::SpuriousRootFound: return TAUTSET_E_SPURIOUS_ROOT;
        case ErrorCode::VerificationFailed: return TAUTSET_E_VERIFICATION;
        case ErrorCode::StepFailure: return TAUTSET_E_STEP_FAILURE;
        case ErrorCode::StitchGap: return TAUTSET_E_STITCH_GAP;
        case ErrorCode::WindowExceeded: return TAUTSET_E_WINDOW_EXCEEDED;
        case ErrorCode::OracleDisagreement: return TAUTSET_E_ORACLE_DISAGREEMENT;
        case ErrorCode::Io: return TAUTSET_E_IO;
    }
    return TAUTSET_E_INTERNAL;
}

tautset_status fail(tautset_status s, std::string msg) {
    g_last_error = std::move(msg);
    return s;
}

template <typename F>
tautset_status guarded(F&& f) {
    try {
        return f();
    } catch (const tautset::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(TAUTSET_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TAUTSET_E_INTERNAL, e.what());
    } catch (...) {
        return fail(TAUTSET_E_INTERNAL, "unknown exception");
    }
}

tautset_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
    if (needed) *needed = s.size() + 1;
    if (!buf) return len == 0 ? TAUTSET_OK : fail(TAUTSET_E_INVALID_ARGUMENT, "null buffer");
    if (len < s.size() + 1) return fail(TAUTSET_E_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return TAUTSET_OK;
}

#define TAUTSET_REQUIRE(cond, what) \
    if (!(cond)) return fail(TAUTSET_E_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* tautset_version(void) { return "1.0.0"; }

const char* tautset_last_error(void) { return g_last_error.c_str(); }

const char* tautset_status_name(tautset_status s) {
    switch (s) {
        case TAUTSET_OK: return "ok";
        case TAUTSET_E_INVALID_ARGUMENT: return "invalid argument";
        case TAUTSET_E_CONFIG: return "configuration error";
        case TAUTSET_E_EMPTY_CONTROL_SET: return "empty control set";
        case TAUTSET_E_SINGULAR_MULTIPLIER: return "singular multiplier";
        case TAUTSET_E_SYMMETRY_VALIDATION: return "symmetry validation failed";
        case TAUTSET_E_SPURIOUS_ROOT: return "spurious root found";
        case TAUTSET_E_VERIFICATION: return "verification failed";
        case TAUTSET_E_STEP_FAILURE: return "integrator step failure";
        case TAUTSET_E_STITCH_GAP: return "stitch gap";
        case TAUTSET_E_WINDOW_EXCEEDED: return "window exceeded";
        case TAUTSET_E_ORACLE_DISAGREEMENT: return "oracle disagreement";
        case TAUTSET_E_IO: return "i/o error";
        case TAUTSET_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* tautset_verdict_name(tautset_verdict v) {
    switch (v) {
        case TAUTSET_INTERIOR: return "Interior";
        case TAUTSET_BOUNDARY: return "Boundary";
        case TAUTSET_INADMISSIBLE: return "Inadmissible";
        case TAUTSET_OUTSIDE_G: return "OutsideG";
    }
    return "Unknown";
}

void tautset_set_log_level(int level) {
    switch (level) {
        case 0: spdlog::set_level(spdlog::level::off); break;
        case 1: spdlog::set_level(spdlog::level::warn); break;
        case 2: spdlog::set_level(spdlog::level::info); break;
        default: spdlog::set_level(spdlog::level::debug); break;
    }
}

tautset_status tautset_config_create(tautset_config** out) {
    TAUTSET_REQUIRE(out, "null output pointer");
    return guarded([&] {
        *out = new tautset_config{};
        return TAUTSET_OK;
    });
}

void tautset_config_destroy(tautset_config* cfg) { delete cfg; }

tautset_status tautset_config_load_file(tautset_config* cfg, const char* path) {
    TAUTSET_REQUIRE(cfg && path, "null argument");
    return guarded([&] {
        cfg->cfg = tautset::load_config_file(path, cfg->cfg);
        return TAUTSET_OK;
    });
}

tautset_status tautset_config_set(tautset_config* cfg, const char* key, const char* value) {
    TAUTSET_REQUIRE(cfg && key && value, "null argument");
    return guarded([&] {
        tautset::set_config_value(cfg->cfg, key, value);
        return TAUTSET_OK;
    });
}

tautset_status tautset_config_get(const tautset_config* cfg, const char* key, char* buf, size_t len, size_t* needed) {
    TAUTSET_REQUIRE(cfg && key, "null argument");
    return guarded([&] { return copy_out(tautset::get_config_value(cfg->cfg, key), buf, len, needed); });
}

tautset_status tautset_config_render(const tautset_config* cfg, char* buf, size_t len, size_t* needed) {
    TAUTSET_REQUIRE(cfg, "null config");
    return guarded([&] { return copy_out(tautset::render_config(cfg->cfg), buf, len, needed); });
}

tautset_status tautset_config_validate(const tautset_config* cfg) {
    TAUTSET_REQUIRE(cfg, "null config");
    return guarded([&] {
        cfg->cfg.validate();
        return TAUTSET_OK;
    });
}

tautset_status tautset_write_endpoints(const tautset_config* cfg, const char* csv_path, const char* log_path,
                                       int* all_valid) {
    TAUTSET_REQUIRE(cfg && csv_path, "null argument");
    return guarded([&] {
        const auto run = tautset::run_endpoints(cfg->cfg);
        std::ostringstream s;
        tautset::write_endpoints_csv(s, run);
        tautset::write_text_file(csv_path, s.str());
        if (log_path) tautset::write_text_file(log_path, run.spurious.log);
        if (all_valid) *all_valid = run.all_valid ? 1 : 0;
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_build(const tautset_config* cfg, tautset_model** out) {
    TAUTSET_REQUIRE(cfg && out, "null argument");
    *out = nullptr;
    return guarded([&] {
        const auto t0 = std::chrono::steady_clock::now();
        auto m = std::make_unique<tautset_model>();
        m->result = tautset::run_pipeline(cfg->cfg);
        m->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *out = m.release();
        return TAUTSET_OK;
    });
}

void tautset_model_destroy(tautset_model* model) { delete model; }

tautset_status tautset_model_summary(const tautset_model* model, tautset_summary* out) {
    TAUTSET_REQUIRE(model && out, "null argument");
    return guarded([&] {
        const auto& m = model->result.model;
        tautset_summary s{};
        s.endpoints = m.endpoints.size();
        s.arcs = m.arcs.size();
        s.stopping_points = m.stopping_points.size();
        for (const auto& sp : m.stopping_points) s.transversal_stopping_points += sp.transversal ? 1 : 0;
        s.inadmissible_cells = m.cells.size();
        s.components = m.components.size();
        s.bounded_components = m.bounded_components();
        for (const auto& arc : m.arcs) s.max_hamiltonian_drift = std::max(s.max_hamiltonian_drift, tautset::hamiltonian_drift(arc));
        s.seconds = model->seconds;
        *out = s;
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_query(const tautset_model* model, double theta1, double theta2, tautset_verdict* verdict,
                                   double* distance) {
    TAUTSET_REQUIRE(model && verdict, "null argument");
    return guarded([&] {
        const auto v = tautset::membership(model->result.model, {theta1, theta2});
        switch (v.tag) {
            case tautset::Verdict::Interior: *verdict = TAUTSET_INTERIOR; break;
            case tautset::Verdict::Boundary: *verdict = TAUTSET_BOUNDARY; break;
            case tautset::Verdict::Inadmissible: *verdict = TAUTSET_INADMISSIBLE; break;
            case tautset::Verdict::OutsideG: *verdict = TAUTSET_OUTSIDE_G; break;
        }
        if (distance) *distance = v.distance_estimate;
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_export(const tautset_model* model, const char* dir) {
    TAUTSET_REQUIRE(model && dir, "null argument");
    return guarded([&] {
        tautset::export_barrier(model->result, dir);
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_write_stopping_points(const tautset_model* model, const char* path) {
    TAUTSET_REQUIRE(model && path, "null argument");
    return guarded([&] {
        std::ostringstream s;
        tautset::write_stopping_points_csv(s, model->result.model.stopping_points);
        tautset::write_text_file(path, s.str());
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_write_svg(const tautset_model* model, const char* path) {
    TAUTSET_REQUIRE(model && path, "null argument");
    return guarded([&] {
        tautset::write_text_file(path, tautset::render_svg(model->result.model));
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_write_json(const tautset_model* model, const char* path) {
    TAUTSET_REQUIRE(model && path, "null argument");
    return guarded([&] {
        tautset::write_text_file(path, tautset::model_to_json(model->result.model));
        return TAUTSET_OK;
    });
}

tautset_status tautset_model_oracle(const tautset_model* model, const char* csv_path, tautset_oracle_summary* out) {
    TAUTSET_REQUIRE(model && out, "null argument");
    return guarded([&] {
        const auto report = tautset::membership_oracle(model->result.model, model->result.config.oracle_options());
        if (csv_path) {
            std::ostringstream s;
            tautset::write_oracle_csv(s, report);
            tautset::write_text_file(csv_path, s.str());
        }
        *out = {report.points.size(), report.policies, report.disagreements, report.reverse_disagreements,
                report.band};
        return TAUTSET_OK;
    });
}

}  // extern "C"
