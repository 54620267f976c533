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

#ifndef TAUTSET_SETASSEMBLY_HPP
#define TAUTSET_SETASSEMBLY_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tautset/integrator.hpp"
#include "tautset/intersection.hpp"

namespace tautset {

enum class CurveKind { Barrier, G0 };

struct BoundaryCurve {
    CurveKind kind = CurveKind::Barrier;
    int arc_id = -1;        ///< barrier curves only
    int period_index = 0;   ///< lens index for G0 curves, source k for barriers
    std::vector<ReducedState> points;
};

/// Closed region of the complement of A outside G+, traced counter-clockwise.
struct InadmissibleCell {
    std::vector<ReducedState> polygon;
    std::vector<int> arc_ids;
    double area = 0.0;
    double theta1_min = 0.0, theta1_max = 0.0, theta2_min = 0.0, theta2_max = 0.0;
};

struct Component {
    int id = 0;
    bool bounded = false;
    std::size_t grid_cells = 0;
    ReducedState representative;
};

struct AssemblyOptions {
    int grid_theta1 = 360;
    int grid_theta2 = 240;
    double stitch_tolerance = 1e-6;
    double lens_chord = 2e-3;
    Window window;
};

AssemblyOptions default_assembly_options(const PendulumParams& p);

class SegmentIndex;

struct AdmissibleSetModel {
    PendulumParams params;
    Window window;
    double period = 0.0;
    std::vector<BarrierArc> arcs;  ///< truncated
    std::vector<TangencyPoint> endpoints;
    std::vector<StoppingPoint> stopping_points;
    std::vector<BoundaryCurve> curves;
    std::vector<InadmissibleCell> cells;
    std::vector<Component> components;
    /// component label per grid cell over [-pi, pi) x [-theta2_abs_max, theta2_abs_max]; -1 if not interior
    int grid_theta1 = 0, grid_theta2 = 0;
    std::vector<int> grid_labels;
    bool degenerate = false;
    std::shared_ptr<const SegmentIndex> index;

    std::size_t bounded_components() const;
};

/**
 * Stitches truncated arcs and G0 lens pieces into closed inadmissible cells and
 * labels the connected components of the interior on a periodic grid.
 * Throws Error(StitchGap) when a chain joins curve ends further apart than the
 * stitch tolerance.
 */
AdmissibleSetModel assemble(const PendulumParams& p, std::vector<BarrierArc> truncated_arcs,
                            std::vector<TangencyPoint> endpoints, std::vector<StoppingPoint> stopping_points,
                            const AssemblyOptions& opts);

enum class Verdict { Interior, Boundary, Inadmissible, OutsideG };

const char* to_string(Verdict v);

struct MembershipVerdict {
    Verdict tag = Verdict::Interior;
    double distance_estimate = 0.0;  ///< distance to the nearest boundary curve or G0, capped
};

inline constexpr double kBoundaryTolerance = 1e-6;
inline constexpr double kOutsideTolerance = 1e-8;

/// Throws Error(WindowExceeded) for |theta2| beyond the model window.
MembershipVerdict membership(const AdmissibleSetModel& model, const ReducedState& s);

/// membership() without the window check; distances beyond `radius` are reported as `radius`.
MembershipVerdict membership_within(const AdmissibleSetModel& model, const ReducedState& s, double radius);

/// Oriented normal pointing out of A at a barrier sample: the adjoint direction.
Vec2 barrier_normal(const ArcSample& s);

// ---- forward simulation -------------------------------------------------------

/**
 * Control law over a partition of [0, T]. The simulator lands exactly on each
 * breakpoint and passes the index of the current interval, so piecewise laws
 * never see an ambiguous switching instant.
 */
struct ControlPolicy {
    std::vector<double> breakpoints;  ///< increasing, inside (0, T)
    std::function<double(std::size_t segment, double t, const FullState& x)> law;
};

struct SimulationOptions {
    double dt = 1e-3;
    bool record = true;
    double violation_tolerance = 1e-9;
    /// called after each step; returning false stops the run
    std::function<bool(double t, const FullState& x)> observer;
};

struct SimulationResult {
    std::vector<double> t;
    std::vector<FullState> states;
    std::vector<double> controls;
    std::optional<double> violation_time;  ///< first time with g~ > 0 (no feasible control)
    bool stopped_by_observer = false;
    double final_time = 0.0;
    FullState final_state;
};

/// Fixed-step RK4 of the cart-pendulum; the control is projected onto U(x).
SimulationResult forward_simulate(const PendulumParams& p, const FullState& s0, const ControlPolicy& policy,
                                  double t_max, const SimulationOptions& opts = {});

/// Replays the recorded barrier controls of `arc` forward from sample `from` to sample `to` (to < from).
ControlPolicy barrier_replay_policy(const PendulumParams& p, const BarrierArc& arc, std::size_t from, std::size_t to);

ControlPolicy constant_policy(double u);
ControlPolicy bang_bang_policy(double first, std::vector<double> switch_times);
/// u = -sign(sin theta1): the control with the largest tension at every instant.
ControlPolicy greedy_tension_policy(const PendulumParams& p);
ControlPolicy random_piecewise_policy(std::uint64_t seed, double t_max, double min_hold, double max_hold);

// ---- property suites ----------------------------------------------------------

struct OracleOptions {
    int grid_theta1 = 60;
    int grid_theta2 = 60;
    double t_max = 6.0;
    double dt = 2e-3;
    bool throw_on_disagreement = false;
};

struct OraclePoint {
    ReducedState state;
    bool oracle_admissible = false;
    Verdict computed = Verdict::Interior;
    double distance = 0.0;
    bool in_band = false;
    bool disagreement = false;          ///< oracle admissible, computed not, outside the band
    bool reverse_disagreement = false;  ///< computed interior, no sampled policy survived
};

struct OracleReport {
    std::vector<OraclePoint> points;
    std::size_t disagreements = 0;
    std::size_t reverse_disagreements = 0;
    std::size_t policies = 0;
    double band = 0.0;
    bool passed = true;
};

/// Policy family: u in {-1, 0, 1}, bang-bang with one or two switches, greedy tension feedback.
std::vector<ControlPolicy> oracle_policies(const PendulumParams& p, double t_max);

/// Throws Error(OracleDisagreement) only when opts.throw_on_disagreement is set.
OracleReport membership_oracle(const AdmissibleSetModel& model, const OracleOptions& opts);

struct SemiPermeabilityOptions {
    int points = 50;
    int policies = 20;
    double offset = 1e-3;
    double t_max = 5.0;
    double dt = 1e-3;
    std::uint64_t seed = 1;
};

struct SemiPermeabilityReport {
    std::size_t points_tested = 0;
    std::size_t trajectories = 0;
    std::size_t reentries = 0;
    std::size_t offset_rejected = 0;  ///< candidate points whose offset was not classified inadmissible
    double max_replay_deviation = 0.0;
};

SemiPermeabilityReport check_semi_permeability(const AdmissibleSetModel& model, const SemiPermeabilityOptions& opts);

}  // namespace tautset

#endif  // TAUTSET_SETASSEMBLY_HPP
