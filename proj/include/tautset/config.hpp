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

#ifndef TAUTSET_CONFIG_HPP
#define TAUTSET_CONFIG_HPP

#include <cstdint>
#include <string>

#include "tautset/integrator.hpp"
#include "tautset/setassembly.hpp"

namespace tautset {

/**
 * @brief Everything a run needs. Serialized as flat `key = value` lines.
 *
 * A window bound of 0 (theta2_abs_max) or a non-finite theta1 bound means "derive from params".
 */
struct RunConfig {
    PendulumParams params;
    int k_min = -1;
    int k_max = 1;
    double tol_abs = 1e-10;
    double tol_rel = 1e-9;
    double max_backward_time = 30.0;
    double max_step = 1e-3;
    double series_offset = 1e-4;
    double theta1_min = -7.283185307179586;  ///< -2 pi - 1
    double theta1_max = 7.283185307179586;
    double theta2_abs_max = 0.0;             ///< 0: 3 sqrt(g/l)
    int grid_theta1 = 360;
    int grid_theta2 = 240;
    int oracle_grid_theta1 = 60;
    int oracle_grid_theta2 = 60;
    double oracle_t_max = 6.0;
    double oracle_dt = 2e-3;
    int semi_points = 50;
    int semi_policies = 20;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    bool operator==(const RunConfig&) const = default;

    /// Throws Error(Config) on out-of-range values.
    void validate() const;

    Window window() const;
    IntegratorOptions integrator_options() const;
    AssemblyOptions assembly_options() const;
    OracleOptions oracle_options() const;
    SemiPermeabilityOptions semi_permeability_options() const;
};

/// Sets one key from its text form; throws Error(Config) for unknown keys or bad values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses `key = value` lines; '#' starts a comment. Later keys override earlier ones.
RunConfig parse_config(const std::string& text, RunConfig base = {});

RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Every key, doubles with 17 significant digits, so parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& cfg);

}  // namespace tautset

#endif  // TAUTSET_CONFIG_HPP
