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

// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tautset/tautset.h"

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kVerification = 3, kOracle = 4 };

int exit_for(tautset_status s) {
    switch (s) {
        case TAUTSET_OK: return kOk;
        case TAUTSET_E_CONFIG:
        case TAUTSET_E_INVALID_ARGUMENT: return kConfig;
        case TAUTSET_E_VERIFICATION:
        case TAUTSET_E_SYMMETRY_VALIDATION:
        case TAUTSET_E_SPURIOUS_ROOT: return kVerification;
        case TAUTSET_E_ORACLE_DISAGREEMENT: return kOracle;
        default: return kRuntime;
    }
}

int report(tautset_status s, const char* stage) {
    std::fprintf(stderr, "tautset: %s: %s: %s\n", stage, tautset_status_name(s), tautset_last_error());
    return exit_for(s);
}

struct Overrides {
    std::string config_path;
    std::optional<std::string> M, m, l, g, tol_abs, tol_rel, out, seed;
    int log_level = 1;
};

// owns a config handle
struct Config {
    tautset_config* h = nullptr;
    ~Config() { tautset_config_destroy(h); }
};

struct Model {
    tautset_model* h = nullptr;
    ~Model() { tautset_model_destroy(h); }
};

tautset_status make_config(const Overrides& o, Config& cfg) {
    tautset_status s = tautset_config_create(&cfg.h);
    if (s != TAUTSET_OK) return s;
    if (!o.config_path.empty() && (s = tautset_config_load_file(cfg.h, o.config_path.c_str())) != TAUTSET_OK) return s;
    const std::pair<const char*, const std::optional<std::string>*> keys[] = {
        {"M", &o.M},         {"m", &o.m},           {"l", &o.l},           {"g", &o.g},
        {"tol_abs", &o.tol_abs}, {"tol_rel", &o.tol_rel}, {"output_dir", &o.out}, {"seed", &o.seed},
    };
    for (const auto& [key, val] : keys) {
        if (val->has_value() && (s = tautset_config_set(cfg.h, key, (*val)->c_str())) != TAUTSET_OK) return s;
    }
    return tautset_config_validate(cfg.h);
}

std::string config_value(const Config& cfg, const char* key) {
    size_t needed = 0;
    tautset_config_get(cfg.h, key, nullptr, 0, &needed);
    std::string buf(needed, '\0');
    tautset_config_get(cfg.h, key, buf.data(), buf.size(), &needed);
    buf.resize(needed ? needed - 1 : 0);
    return buf;
}

std::string out_path(const Config& cfg, const char* name) {
    return (std::filesystem::path(config_value(cfg, "output_dir")) / name).string();
}

int build_model(const Config& cfg, Model& model) {
    const tautset_status s = tautset_model_build(cfg.h, &model.h);
    return s == TAUTSET_OK ? kOk : report(s, "pipeline");
}

void print_summary(const Model& model) {
    tautset_summary s{};
    if (tautset_model_summary(model.h, &s) != TAUTSET_OK) return;
    std::printf("endpoints %zu, arcs %zu, stopping points %zu (%zu transversal)\n", s.endpoints, s.arcs,
                s.stopping_points, s.transversal_stopping_points);
    std::printf("inadmissible cells %zu, admissible components per period %zu (%zu bounded)\n", s.inadmissible_cells,
                s.components, s.bounded_components);
    std::printf("max Hamiltonian drift %.3g, %.2f s\n", s.max_hamiltonian_drift, s.seconds);
}

int cmd_endpoints(const Config& cfg) {
    const std::string csv = out_path(cfg, "endpoints.csv"), log = out_path(cfg, "spurious_roots.log");
    int valid = 0;
    const tautset_status s = tautset_write_endpoints(cfg.h, csv.c_str(), log.c_str(), &valid);
    if (s != TAUTSET_OK) return report(s, "endpoints");
    std::printf("wrote %s and %s\n", csv.c_str(), log.c_str());
    if (!valid) {
        std::fprintf(stderr, "tautset: endpoints: tangentiality check failed, see %s\n", csv.c_str());
        return kVerification;
    }
    return kOk;
}

int cmd_barrier(const Config& cfg) {
    Model model;
    if (int rc = build_model(cfg, model)) return rc;
    const std::string dir = config_value(cfg, "output_dir");
    const tautset_status s = tautset_model_export(model.h, dir.c_str());
    if (s != TAUTSET_OK) return report(s, "export");
    print_summary(model);
    std::printf("wrote arcs/, events.csv, stopping_points.csv, model.json, barrier.svg under %s\n", dir.c_str());
    return kOk;
}

int cmd_stopping_points(const Config& cfg) {
    Model model;
    if (int rc = build_model(cfg, model)) return rc;
    const std::string path = out_path(cfg, "stopping_points.csv");
    const tautset_status s = tautset_model_write_stopping_points(model.h, path.c_str());
    if (s != TAUTSET_OK) return report(s, "stopping-points");
    print_summary(model);
    std::printf("wrote %s\n", path.c_str());
    return kOk;
}

int cmd_query(const Config& cfg, double theta1, double theta2) {
    Model model;
    if (int rc = build_model(cfg, model)) return rc;
    tautset_verdict v{};
    double d = 0.0;
    const tautset_status s = tautset_model_query(model.h, theta1, theta2, &v, &d);
    if (s != TAUTSET_OK) return report(s, "query");
    std::printf("%s %.17g\n", tautset_verdict_name(v), d);
    return kOk;
}

int cmd_oracle(const Config& cfg) {
    Model model;
    if (int rc = build_model(cfg, model)) return rc;
    const std::string path = out_path(cfg, "oracle.csv");
    tautset_oracle_summary o{};
    const tautset_status s = tautset_model_oracle(model.h, path.c_str(), &o);
    if (s != TAUTSET_OK) return report(s, "oracle");
    std::printf("oracle: %zu points, %zu policies, band %.4g\n", o.points, o.policies, o.band);
    std::printf("disagreements outside the band: %zu; computed-interior points no policy kept: %zu\n",
                o.disagreements, o.reverse_disagreements);
    std::printf("wrote %s\n", path.c_str());
    return o.disagreements == 0 ? kOk : kOracle;
}

int cmd_plot(const Config& cfg) {
    Model model;
    if (int rc = build_model(cfg, model)) return rc;
    const std::string path = out_path(cfg, "barrier.svg");
    const tautset_status s = tautset_model_write_svg(model.h, path.c_str());
    if (s != TAUTSET_OK) return report(s, "plot");
    std::printf("wrote %s\n", path.c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Admissible set of a pendulum on a cart hanging from a cable that must stay taut"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", tautset_version());

    Overrides o;
    app.add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--M", o.M, "cart mass");
    app.add_option("--m", o.m, "pendulum mass");
    app.add_option("--l", o.l, "pendulum length");
    app.add_option("--g", o.g, "gravity");
    app.add_option("--tol-abs", o.tol_abs, "integrator absolute tolerance");
    app.add_option("--tol-rel", o.tol_rel, "integrator relative tolerance");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--seed", o.seed, "seed for the property suites");
    app.add_option("--log-level", o.log_level, "0 off, 1 warnings, 2 info, 3 debug")->check(CLI::Range(0, 3));

    auto* endpoints = app.add_subcommand("endpoints", "tangency points, adjoints and residuals as CSV");
    auto* barrier = app.add_subcommand("barrier", "full pipeline with CSV, JSON and SVG export");
    auto* stopping = app.add_subcommand("stopping-points", "barrier intersections as CSV");
    auto* query = app.add_subcommand("query", "membership verdict of one state");
    double q1 = 0.0, q2 = 0.0;
    query->add_option("theta1", q1, "angle (rad)")->required();
    query->add_option("theta2", q2, "angular velocity (rad/s)")->required();
    auto* oracle = app.add_subcommand("oracle", "brute-force membership check on a grid");
    auto* plot = app.add_subcommand("plot", "SVG plot only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    tautset_set_log_level(o.log_level);
    Config cfg;
    if (const tautset_status s = make_config(o, cfg); s != TAUTSET_OK) {
        report(s, "config");
        return kConfig;
    }
    if (*endpoints) return cmd_endpoints(cfg);
    if (*barrier) return cmd_barrier(cfg);
    if (*stopping) return cmd_stopping_points(cfg);
    if (*query) return cmd_query(cfg, q1, q2);
    if (*oracle) return cmd_oracle(cfg);
    if (*plot) return cmd_plot(cfg);
    return kConfig;
}
