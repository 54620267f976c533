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

#ifndef TAUTSET_EXPORT_HPP
#define TAUTSET_EXPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "tautset/pipeline.hpp"

namespace tautset {

inline constexpr int kModelSchemaVersion = 1;

/// %.17g; round-trips every double.
std::string format_double(double v);

void write_endpoints_csv(std::ostream& out, const EndpointRun& run);

/// Columns t,theta1,theta2,lambda1,lambda2,u,mu,H,mode.
void write_arc_csv(std::ostream& out, const BarrierArc& arc);

void write_events_csv(std::ostream& out, const std::vector<BarrierArc>& arcs);

void write_stopping_points_csv(std::ostream& out, const std::vector<StoppingPoint>& sps);

void write_oracle_csv(std::ostream& out, const OracleReport& report);

/// Versioned JSON document: params, window, endpoints, curves as [theta1, theta2] arrays, cells, components.
std::string model_to_json(const AdmissibleSetModel& model);

/// theta1 horizontal, theta2 vertical; G0, arcs, stopping points, switch markers, shaded components.
std::string render_svg(const AdmissibleSetModel& model);

/// Throws Error(Io) when the file cannot be written. Creates parent directories.
void write_text_file(const std::string& path, const std::string& content);

/// Writes arcs/arc_NN.csv, events.csv, stopping_points.csv, model.json and barrier.svg under dir.
std::vector<std::string> export_barrier(const PipelineResult& result, const std::string& dir);

}  // namespace tautset

#endif  // TAUTSET_EXPORT_HPP
