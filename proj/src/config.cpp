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

#include "tautset/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tautset/error.hpp"

namespace tautset {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw Error(ErrorCode::Config, "invalid value '" + value + "' for key '" + key + "'");
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) bad_value(key, v);
        return d;
    } catch (const std::logic_error&) {
        bad_value(key, v);
    }
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v);
    return out;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field real_field(T RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& v) { c.*member = to_double("", v); },
            [member](const RunConfig& c) { return fmt17(c.*member); }};
}

Field param_field(double PendulumParams::*member) {
    return {[member](RunConfig& c, const std::string& v) { c.params.*member = to_double("", v); },
            [member](const RunConfig& c) { return fmt17(c.params.*member); }};
}

template <typename T>
Field int_field(T RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& v) { c.*member = to_int<T>("", v); },
            [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

// ordered, so that rendering is stable
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> f = {
        {"M", param_field(&PendulumParams::M)},
        {"m", param_field(&PendulumParams::m)},
        {"l", param_field(&PendulumParams::l)},
        {"g", param_field(&PendulumParams::g)},
        {"k_min", int_field(&RunConfig::k_min)},
        {"k_max", int_field(&RunConfig::k_max)},
        {"tol_abs", real_field(&RunConfig::tol_abs)},
        {"tol_rel", real_field(&RunConfig::tol_rel)},
        {"max_backward_time", real_field(&RunConfig::max_backward_time)},
        {"max_step", real_field(&RunConfig::max_step)},
        {"series_offset", real_field(&RunConfig::series_offset)},
        {"theta1_min", real_field(&RunConfig::theta1_min)},
        {"theta1_max", real_field(&RunConfig::theta1_max)},
        {"theta2_abs_max", real_field(&RunConfig::theta2_abs_max)},
        {"grid_theta1", int_field(&RunConfig::grid_theta1)},
        {"grid_theta2", int_field(&RunConfig::grid_theta2)},
        {"oracle_grid_theta1", int_field(&RunConfig::oracle_grid_theta1)},
        {"oracle_grid_theta2", int_field(&RunConfig::oracle_grid_theta2)},
        {"oracle_t_max", real_field(&RunConfig::oracle_t_max)},
        {"oracle_dt", real_field(&RunConfig::oracle_dt)},
        {"semi_points", int_field(&RunConfig::semi_points)},
        {"semi_policies", int_field(&RunConfig::semi_policies)},
        {"output_dir", {[](RunConfig& c, const std::string& v) { c.output_dir = v; },
                        [](const RunConfig& c) { return c.output_dir; }}},
        {"seed", int_field(&RunConfig::seed)},
    };
    return f;
}

const Field& field(const std::string& key) {
    for (const auto& [k, f] : fields()) {
        if (k == key) return f;
    }
    throw Error(ErrorCode::Config, "unknown configuration key '" + key + "'");
}

}  // namespace

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::Config, e.what());
    }
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::Config, what);
    };
    require(k_min <= k_max, "k_min must not exceed k_max");
    require(k_max - k_min <= 16, "k range too wide");
    require(tol_abs > 0.0 && tol_rel > 0.0, "tolerances must be positive");
    require(max_backward_time > 0.0 && std::isfinite(max_backward_time), "max_backward_time must be positive");
    require(max_step > 0.0, "max_step must be positive");
    require(series_offset > 0.0 && series_offset < 0.1, "series_offset must lie in (0, 0.1)");
    require(theta1_min < theta1_max, "theta1_min must be below theta1_max");
    require(theta2_abs_max >= 0.0 && std::isfinite(theta2_abs_max), "theta2_abs_max must be >= 0 (0 = automatic)");
    require(grid_theta1 >= 4 && grid_theta2 >= 4, "component grid must be at least 4 x 4");
    require(oracle_grid_theta1 >= 2 && oracle_grid_theta2 >= 2, "oracle grid must be at least 2 x 2");
    require(oracle_t_max > 0.0 && oracle_dt > 0.0, "oracle horizon and step must be positive");
    require(semi_points >= 0 && semi_policies >= 0, "property-suite sizes must be non-negative");
    require(!output_dir.empty(), "output_dir must not be empty");
}

Window RunConfig::window() const {
    return {theta1_min, theta1_max, theta2_abs_max > 0.0 ? theta2_abs_max : 3.0 * params.natural_rate()};
}

IntegratorOptions RunConfig::integrator_options() const {
    IntegratorOptions o;
    o.atol = tol_abs;
    o.rtol = tol_rel;
    o.max_backward_time = max_backward_time;
    o.max_step = max_step;
    o.series_offset = series_offset;
    o.window = window();
    return o;
}

AssemblyOptions RunConfig::assembly_options() const {
    AssemblyOptions o;
    o.grid_theta1 = grid_theta1;
    o.grid_theta2 = grid_theta2;
    o.window = window();
    return o;
}

OracleOptions RunConfig::oracle_options() const {
    OracleOptions o;
    o.grid_theta1 = oracle_grid_theta1;
    o.grid_theta2 = oracle_grid_theta2;
    o.t_max = oracle_t_max;
    o.dt = oracle_dt;
    return o;
}

SemiPermeabilityOptions RunConfig::semi_permeability_options() const {
    SemiPermeabilityOptions o;
    o.points = semi_points;
    o.policies = semi_policies;
    o.seed = seed;
    return o;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const Field& f = field(key);
    try {
        f.set(cfg, trim(value));
    } catch (const Error&) {
        bad_value(key, value);
    }
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return field(key).get(cfg); }

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot read configuration file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string render_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, f] : fields()) out += k + " = " + f.get(cfg) + "\n";
    return out;
}

}  // namespace tautset
