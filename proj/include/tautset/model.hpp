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

#ifndef TAUTSET_MODEL_HPP
#define TAUTSET_MODEL_HPP

#include <cmath>
#include <optional>

namespace tautset {

/**
 * @brief Physical constants of the pendulum on a cart with a non-rigid cable.
 *
 * SI units throughout; the cart force u is normalized so that |u| <= 1.
 */
struct PendulumParams {
    double M = 0.1;   ///< cart mass (kg)
    double m = 0.1;   ///< pendulum mass (kg)
    double l = 1.0;   ///< cable length (m)
    double g = 10.0;  ///< gravitational acceleration (m/s^2)

    /// Throws Error(InvalidArgument) unless every constant is finite and positive.
    void validate() const;

    /// sqrt(g/l): the angular velocity at the non-smooth points of G0.
    double natural_rate() const { return std::sqrt(g / l); }

    bool operator==(const PendulumParams&) const = default;
};

/// Phase point (theta1, theta2). theta1 is never wrapped implicitly.
struct ReducedState {
    double theta1 = 0.0;  ///< angle from the upward vertical (rad)
    double theta2 = 0.0;  ///< angular velocity (rad/s)
};

struct FullState {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double x1 = 0.0;  ///< cart position (m)
    double x2 = 0.0;  ///< cart velocity (m/s)

    ReducedState reduced() const { return {theta1, theta2}; }
};

struct Adjoint {
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    double norm() const { return std::hypot(lambda1, lambda2); }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Row-major 2x2 matrix; (i, j) is d(rate_i)/d(theta_j).
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
};

/**
 * @brief Closed interval of admissible controls at a state, possibly empty.
 *
 * Nonempty exactly when g_tilde(state) <= 0; on G0 it degenerates to a point
 * (except where sin(theta1) = 0).
 */
struct ControlInterval {
    double lo = -1.0;
    double hi = 1.0;
    bool empty = false;

    static ControlInterval none() { return {0.0, 0.0, true}; }

    bool contains(double u, double tol = 0.0) const {
        return !empty && u >= lo - tol && u <= hi + tol;
    }
    bool is_singleton() const { return !empty && hi == lo; }
    double clamp(double u) const { return u < lo ? lo : (u > hi ? hi : u); }
};

/// Which branch of the Hamiltonian-minimizing law produced a control.
enum class ControlMode {
    BangPlus,     ///< u = +1
    BangMinus,    ///< u = -1
    Constrained,  ///< mixed constraint active, u = (M l th2^2 - M g cos th1) / sin th1
    Tie,          ///< lambda2 cos(theta1) = 0 with no previous branch to keep
};

const char* to_string(ControlMode mode);

struct HamiltonianMinimum {
    double u = 0.0;
    double value = 0.0;
    ControlMode mode = ControlMode::Tie;
};

/// Right-hand side (dtheta1, dtheta2) of the taut-cable dynamics.
Vec2 dynamics(const PendulumParams& p, const ReducedState& s, double u);

/// Cart part of the dynamics, returning d/dt of the full state.
FullState full_dynamics(const PendulumParams& p, const FullState& q, double u);

Mat2 dynamics_jacobian(const PendulumParams& p, const ReducedState& s, double u);

/// h(q, u) = u sin th1 + M g cos th1 - M l th2^2; the cable is taut iff h <= 0.
double mixed_constraint(const PendulumParams& p, const ReducedState& s, double u);

/// Partial derivatives of h with respect to (theta1, theta2).
Vec2 mixed_constraint_gradient(const PendulumParams& p, const ReducedState& s, double u);

/// g~(s) = min_{|u|<=1} h = -|sin th1| + M g cos th1 - M l th2^2.
double g_tilde(const PendulumParams& p, const ReducedState& s);

/**
 * Gradient of one smooth branch of g~. `side` selects the branch of |sin th1|:
 * side > 0 uses |sin| = sin, side < 0 uses |sin| = -sin. At differentiability
 * points pass the sign of sin(theta1); at theta1 = 2k pi the two branches give
 * the left/right limits.
 */
Vec2 g_tilde_branch_gradient(const PendulumParams& p, const ReducedState& s, int side);

/// Control that makes h vanish: (M l th2^2 - M g cos th1) / sin th1. Requires sin th1 != 0.
double constrained_arc_control(const PendulumParams& p, const ReducedState& s);

ControlInterval control_set(const PendulumParams& p, const ReducedState& s);

/// Cable tension in newtons, via the regular identity T = -m h / (M + m sin^2 th1).
double tension(const PendulumParams& p, const ReducedState& s, double u);

/**
 * Tension from the vertical force balance T = -m (z'' + g) / cos th1 with
 * z'' = -l (th2^2 cos th1 + th2' sin th1). Independent cross-check of tension();
 * throws Error(InvalidArgument) at cos th1 = 0.
 */
double tension_from_vertical_balance(const PendulumParams& p, const ReducedState& s, double u);

double hamiltonian(const PendulumParams& p, const ReducedState& s, const Adjoint& a, double u);

/**
 * @brief Minimizes the Hamiltonian over control_set(p, s).
 *
 * The Hamiltonian is affine in u with slope -lambda2 cos th1 / (l (M + m sin^2 th1)),
 * so the minimizer sits at the upper bound of the control set when
 * lambda2 cos th1 > 0 and at the lower bound when it is negative. When the bound is
 * the constrained-arc value the mode is Constrained. At a tie the branch in
 * `previous` is kept if given; otherwise u is the point of the set closest to zero
 * and the mode is Tie.
 *
 * Throws Error(EmptyControlSet) when g~(s) > 0.
 */
HamiltonianMinimum minimize_hamiltonian(const PendulumParams& p, const ReducedState& s,
                                        const Adjoint& a,
                                        std::optional<ControlMode> previous = std::nullopt);

/// Scale-aware threshold under which |h| counts as an active constraint: 1e-9 (1 + M g).
double activation_tolerance(const PendulumParams& p);

/**
 * Multiplier of the mixed constraint for the minimizing control u_star.
 * Zero when h < -activation_tolerance or when u_star sits on the bound |u| = 1;
 * otherwise lambda2 cot th1 / (l (M + m sin^2 th1)). Negative values are logged.
 * Throws Error(SingularMultiplier) for the active branch at sin th1 = 0.
 */
double multiplier(const PendulumParams& p, const ReducedState& s, const Adjoint& a, double u_star);

/// Minimal interface of a planar system with one scalar mixed constraint.
class MixedConstrainedSystem {
public:
    virtual ~MixedConstrainedSystem() = default;
    virtual Vec2 vector_field(const ReducedState& s, double u) const = 0;
    virtual Mat2 state_jacobian(const ReducedState& s, double u) const = 0;
    virtual double constraint(const ReducedState& s, double u) const = 0;
    virtual double envelope(const ReducedState& s) const = 0;
    virtual ControlInterval admissible_controls(const ReducedState& s) const = 0;
};

class PendulumSystem final : public MixedConstrainedSystem {
public:
    explicit PendulumSystem(PendulumParams p) : p_(p) { p_.validate(); }

    const PendulumParams& params() const { return p_; }

    Vec2 vector_field(const ReducedState& s, double u) const override { return dynamics(p_, s, u); }
    Mat2 state_jacobian(const ReducedState& s, double u) const override {
        return dynamics_jacobian(p_, s, u);
    }
    double constraint(const ReducedState& s, double u) const override {
        return mixed_constraint(p_, s, u);
    }
    double envelope(const ReducedState& s) const override { return g_tilde(p_, s); }
    ControlInterval admissible_controls(const ReducedState& s) const override {
        return control_set(p_, s);
    }

private:
    PendulumParams p_;
};

}  // namespace tautset

#endif  // TAUTSET_MODEL_HPP
