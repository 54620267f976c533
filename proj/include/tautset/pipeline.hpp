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

#ifndef TAUTSET_PIPELINE_HPP
#define TAUTSET_PIPELINE_HPP

#include <vector>

#include "tautset/config.hpp"
#include "tautset/intersection.hpp"
#include "tautset/setassembly.hpp"
#include "tautset/tangency.hpp"

namespace tautset {

struct EndpointRecord {
    TangencyPoint point;
    double residual = 0.0;
    bool valid = false;
};

struct EndpointRun {
    std::vector<EndpointRecord> records;
    SpuriousRootReport spurious;
    bool all_valid = true;
};

/// Endpoints over the configured k range with their tangentiality residuals.
EndpointRun run_endpoints(const RunConfig& cfg);

struct PipelineTimings {
    double endpoints = 0.0;
    double integration = 0.0;
    double intersection = 0.0;
    double assembly = 0.0;
};

struct PipelineResult {
    RunConfig config;
    EndpointRun endpoints;
    std::vector<BarrierArc> raw_arcs;  ///< before truncation at stopping points
    AdmissibleSetModel model;
    PipelineTimings timings;
};

/**
 * endpoints -> arcs -> stopping points -> assembly.
 * Throws Error(VerificationFailed) if any endpoint fails its tangentiality check.
 */
PipelineResult run_pipeline(const RunConfig& cfg);

}  // namespace tautset

#endif  // TAUTSET_PIPELINE_HPP
