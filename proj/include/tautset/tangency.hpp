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

#ifndef TAUTSET_TANGENCY_HPP
#define TAUTSET_TANGENCY_HPP

#include <optional>
#include <string>
#include <vector>

#include "tautset/model.hpp"

namespace tautset {

enum class EndpointKind { Smooth, NonSmooth };

const char* to_string(EndpointKind kind);

/// Side from which a barrier reaches a non-smooth point of G0. Mirror points use the mirror image of B.
enum class ApproachSide { B, C };

/// Inclusive range of period indices k.
struct KRange {
    int lo = -1;
    int hi = 1;
};

struct TangencyPoint {
    ReducedState state;
    EndpointKind kind = EndpointKind::Smooth;
    Adjoint final_adjoint;                   ///< (left-limit) gradient of g~ at the point
    ControlInterval final_control_set;       ///< U(z), or its left limit at non-smooth points
    int period_index = 0;
    std::optional<ApproachSide> approach_side;

    /// +1 for (-arctan(Mg), 0) and (0, +sqrt(g/l)) families, -1 for their mirror images.
    int family_sign = 1;
};

std::vector<TangencyPoint> smooth_endpoints(const PendulumParams& p, KRange k_range = {});

/// Throws Error(SymmetryValidationFailed) if a mirrored adjoint violates ultimate tangentiality.
std::vector<TangencyPoint> nonsmooth_endpoints(const PendulumParams& p, KRange k_range = {});

/// Smooth endpoints followed by non-smooth ones, ordered by k.
std::vector<TangencyPoint> all_endpoints(const PendulumParams& p, KRange k_range = {});

/**
 * Builds the terminal data of a barrier that reaches `z` through the nearby point
 * `approach`: the gradient of the g~ branch active at `approach`, evaluated at z,
 * and the control set at `approach` as the left limit of U.
 */
TangencyPoint approach_tangency(const PendulumParams& p, const ReducedState& z,
                                const ReducedState& approach, int period_index = 0);

/// min over the endpoints of U of grad . f(z, u); the quantity is affine in u.
double tangentiality_value(const MixedConstrainedSystem& sys, const ReducedState& z,
                           const Vec2& grad, const ControlInterval& U);

/**
 * Smooth points: |min_U Dg~ f|, which must not exceed 1e-8.
 * Non-smooth points: min_U Dg~(z-) f, which must be >= -1e-8.
 */
double verify_tangentiality(const PendulumParams& p, const TangencyPoint& tp);

inline constexpr double kTangencyTolerance = 1e-8;

bool tangentiality_holds(const TangencyPoint& tp, double residual);

/**
 * State at backward time `delta` along the zero-tension arc ending at the
 * non-smooth point `tp`, from the odd series
 * theta1(t) = w t + w^3 t^3/24 + 3 w^5 t^5/640 + 5 w^7 t^7/7168, w = sqrt(g/l).
 */
ReducedState free_fall_approach(const PendulumParams& p, const TangencyPoint& tp, double delta);

struct SpuriousRootReport {
    double interval_lo = 0.0;   ///< -arctan(Mg)
    double interval_hi = 0.0;   ///< 0, excluded
    std::size_t grid_points = 0;
    std::size_t sign_changes = 0;
    double min_abs_residual = 0.0;
    double factored_root = 0.0;  ///< arctan(1 / (M g))
    std::string log;
};

/**
 * Scans the tangentiality residual with theta2 != 0 over [-arctan(Mg), 0) on a
 * 1e-4 grid, theta2^2 eliminated through g~ = 0. Throws Error(SpuriousRootFound)
 * on a sign change.
 */
SpuriousRootReport reject_spurious_roots(const PendulumParams& p);

}  // namespace tautset

#endif  // TAUTSET_TANGENCY_HPP
