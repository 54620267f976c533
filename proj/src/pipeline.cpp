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

#include "tautset/pipeline.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "tautset/error.hpp"

namespace tautset {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

EndpointRun run_endpoints(const RunConfig& cfg) {
    cfg.validate();
    EndpointRun run;
    for (const TangencyPoint& tp : all_endpoints(cfg.params, {cfg.k_min, cfg.k_max})) {
        EndpointRecord r{tp, verify_tangentiality(cfg.params, tp), false};
        r.valid = tangentiality_holds(tp, r.residual);
        run.all_valid = run.all_valid && r.valid;
        run.records.push_back(r);
    }
    run.spurious = reject_spurious_roots(cfg.params);
    return run;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
    PipelineResult out;
    out.config = cfg;
    auto t0 = std::chrono::steady_clock::now();
    out.endpoints = run_endpoints(cfg);
    out.timings.endpoints = seconds_since(t0);
    if (!out.endpoints.all_valid) {
        throw Error(ErrorCode::VerificationFailed, "pipeline: an endpoint fails ultimate tangentiality");
    }
    std::vector<TangencyPoint> tps;
    for (const auto& r : out.endpoints.records) tps.push_back(r.point);

    t0 = std::chrono::steady_clock::now();
    out.raw_arcs = integrate_arcs(cfg.params, tps, cfg.integrator_options());
    out.timings.integration = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto sps = find_stopping_points(cfg.params, out.raw_arcs);
    auto truncated = truncate_at_stopping_points(cfg.params, out.raw_arcs, sps);
    out.timings.intersection = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    out.model = assemble(cfg.params, std::move(truncated), std::move(tps), std::move(sps), cfg.assembly_options());
    out.timings.assembly = seconds_since(t0);
    spdlog::info("pipeline: {} arcs, {} stopping points, {} cells, {} components ({} bounded)",
                 out.model.arcs.size(), out.model.stopping_points.size(), out.model.cells.size(),
                 out.model.components.size(), out.model.bounded_components());
    return out;
}

}  // namespace tautset
