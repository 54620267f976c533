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

#ifndef TAUTSET_INTEGRATOR_HPP
#define TAUTSET_INTEGRATOR_HPP

#include <vector>

#include "tautset/model.hpp"
#include "tautset/tangency.hpp"

namespace tautset {

enum class Termination { HorizonReached, LeftWindow, StoppedAtIntersection, ReachedG0Again, AdjointVanished };

const char* to_string(Termination t);

enum class EventKind {
    SinCrossing,    ///< sin(theta1) changes sign
    AdjointSwitch,  ///< lambda2 cos(theta1) changes sign; the control jumps between bounds
    ModeChange,     ///< bang <-> constrained arc on the same side
    ReachedG0,      ///< g~ = 0 re-contact
    LeftWindow,
};

const char* to_string(EventKind k);

struct ArcEvent {
    double t = 0.0;
    EventKind kind = EventKind::SinCrossing;
    ReducedState state;
    ControlMode before = ControlMode::Tie;
    ControlMode after = ControlMode::Tie;
};

struct ArcSample {
    double t = 0.0;  ///< t = 0 at the endpoint, negative before it
    ReducedState state;
    Adjoint adjoint;
    double control = 0.0;
    double multiplier = 0.0;
    double hamiltonian = 0.0;
    ControlMode mode = ControlMode::Tie;
};

struct Window {
    double theta1_min = -1.0;
    double theta1_max = 1.0;
    double theta2_abs_max = 1.0;

    bool contains(const ReducedState& s) const {
        return s.theta1 >= theta1_min && s.theta1 <= theta1_max && std::abs(s.theta2) <= theta2_abs_max;
    }
};

/// theta1 in [-2 pi - 1, 2 pi + 1], |theta2| <= 3 sqrt(g/l).
Window default_window(const PendulumParams& p);

struct IntegratorOptions {
    double atol = 1e-10;
    double rtol = 1e-9;
    double max_backward_time = 30.0;
    double max_step = 1e-3;  ///< keeps the sampled polyline dense
    double min_step = 1e-13;
    double event_tolerance = 1e-10;
    /// backward time at which non-smooth arcs leave the zero-tension series
    double series_offset = 1e-4;
    Window window;
};

IntegratorOptions default_integrator_options(const PendulumParams& p);

struct BarrierArc {
    int id = 0;
    TangencyPoint source;
    std::vector<ArcSample> samples;  ///< decreasing t
    std::vector<ArcEvent> events;
    Termination termination = Termination::HorizonReached;
    /// log of kappa; the stored adjoints are kappa times the raw Pontryagin adjoint
    double adjoint_log_scale = 0.0;

    double earliest_time() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// d(lambda)/dt = -J^T lambda - mu dh/dtheta.
Adjoint adjoint_rhs(const PendulumParams& p, const ReducedState& s, const Adjoint& a, double u, double mu);

/// Control of a frozen branch: +-1 on bang arcs, the zero-tension value on constrained arcs.
double branch_control(const PendulumParams& p, const ReducedState& s, ControlMode mode);

/**
 * @brief Integrates a barrier arc backward from a verified end point.
 *
 * Adjoints are renormalized internally and rescaled at the end so that the
 * largest stored norm equals |final_adjoint|. Throws Error(StepFailure) when the
 * step size collapses.
 */
BarrierArc integrate_arc(const PendulumParams& p, const TangencyPoint& tp, const IntegratorOptions& opts);

/// One arc per end point, computed concurrently; result i belongs to tps[i] and has id i.
std::vector<BarrierArc> integrate_arcs(const PendulumParams& p, const std::vector<TangencyPoint>& tps,
                                       const IntegratorOptions& opts);

/// Integrates the state alone with a frozen branch; dt_backward > 0 moves further back in time.
ReducedState advance_state(const PendulumParams& p, const ReducedState& s, ControlMode mode,
                           double dt_backward, double tol = 1e-13);

/// Moves a sample back by dt_backward on its own branch, carrying the adjoint; control, mu and H are recomputed.
ArcSample advance_sample(const PendulumParams& p, const ArcSample& from, double dt_backward, double tol = 1e-13);

double hamiltonian_drift(const BarrierArc& arc);

}  // namespace tautset

#endif  // TAUTSET_INTEGRATOR_HPP
