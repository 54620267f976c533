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

#ifndef TAUTSET_INTERSECTION_HPP
#define TAUTSET_INTERSECTION_HPP

#include <vector>

#include "tautset/integrator.hpp"

namespace tautset {

struct StoppingPoint {
    ReducedState location;
    int arc_a = 0;
    int arc_b = 0;
    double t_a = 0.0;
    double t_b = 0.0;
    bool transversal = false;
    double determinant = 0.0;  ///< det(f_a, f_b) / (|f_a| |f_b|)
};

/// Below this normalized determinant a crossing counts as tangential.
inline constexpr double kTransversalityThreshold = 1e-8;

/**
 * @brief Finds barrier stopping points among backward arcs.
 *
 * Polyline crossings are refined by Newton iteration on the two local times,
 * re-integrating each arc from the neighbouring sample with its frozen branch.
 * Transversal crossings are accepted greedily in order of the backward time
 * needed to reach them along both arcs; a crossing is dropped when either arc
 * has already been stopped before reaching it. Tangential crossings are logged
 * and returned with transversal = false. Hits at an end where an arc already
 * stopped are ignored, so the result on truncated arcs is empty.
 *
 * Arc identity is BarrierArc::id.
 */
std::vector<StoppingPoint> find_stopping_points(const PendulumParams& p, const std::vector<BarrierArc>& arcs);

/// Cuts each arc at the latest time among its transversal stopping points; idempotent.
std::vector<BarrierArc> truncate_at_stopping_points(const PendulumParams& p, std::vector<BarrierArc> arcs,
                                                    const std::vector<StoppingPoint>& sps);

}  // namespace tautset

#endif  // TAUTSET_INTERSECTION_HPP
