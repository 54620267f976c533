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

#include "tautset/model.hpp"

#include <spdlog/spdlog.h>

#include <limits>
#include <sstream>

#include "tautset/error.hpp"

namespace tautset {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Config: return "Config";
        case ErrorCode::EmptyControlSet: return "EmptyControlSet";
        case ErrorCode::SingularMultiplier: return "SingularMultiplier";
        case ErrorCode::SymmetryValidationFailed: return "SymmetryValidationFailed";
        case ErrorCode::SpuriousRootFound: return "SpuriousRootFound";
        case ErrorCode::VerificationFailed: return "VerificationFailed";
        case ErrorCode::StepFailure: return "StepFailure";
        case ErrorCode::StitchGap: return "StitchGap";
        case ErrorCode::WindowExceeded: return "WindowExceeded";
        case ErrorCode::OracleDisagreement: return "OracleDisagreement";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

const char* to_string(ControlMode mode) {
    switch (mode) {
        case ControlMode::BangPlus: return "bang+";
        case ControlMode::BangMinus: return "bang-";
        case ControlMode::Constrained: return "constrained";
        case ControlMode::Tie: return "tie";
    }
    return "unknown";
}

void PendulumParams::validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(M) || !ok(m) || !ok(l) || !ok(g)) {
        std::ostringstream os;
        os << "pendulum constants must be finite and positive (M=" << M << ", m=" << m
           << ", l=" << l << ", g=" << g << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

namespace {

double inertia(const PendulumParams& p, double s) { return p.M + p.m * s * s; }

double numerator(const PendulumParams& p, const ReducedState& x, double u, double s, double c) {
    return -u * c + (p.M + p.m) * p.g * s - p.m * p.l * x.theta2 * x.theta2 * c * s;
}

}  // namespace

Vec2 dynamics(const PendulumParams& p, const ReducedState& x, double u) {
    const double s = std::sin(x.theta1);
    const double c = std::cos(x.theta1);
    return {x.theta2, numerator(p, x, u, s, c) / (p.l * inertia(p, s))};
}

FullState full_dynamics(const PendulumParams& p, const FullState& q, double u) {
    const Vec2 th = dynamics(p, q.reduced(), u);
    const double s = std::sin(q.theta1);
    const double c = std::cos(q.theta1);
    const double cart =
        (u + p.m * p.l * q.theta2 * q.theta2 * s - p.m * p.g * c * s) / inertia(p, s);
    return {th.x, th.y, q.x2, cart};
}

Mat2 dynamics_jacobian(const PendulumParams& p, const ReducedState& x, double u) {
    const double s = std::sin(x.theta1);
    const double c = std::cos(x.theta1);
    const double w2 = x.theta2 * x.theta2;
    const double D = inertia(p, s);
    const double N = numerator(p, x, u, s, c);
    const double dN = u * s + (p.M + p.m) * p.g * c - p.m * p.l * w2 * (c * c - s * s);
    const double dD = 2.0 * p.m * s * c;

    Mat2 J;
    J.a11 = 0.0;
    J.a12 = 1.0;
    J.a21 = (dN * D - N * dD) / (p.l * D * D);
    J.a22 = -2.0 * p.m * x.theta2 * c * s / D;
    return J;
}

double mixed_constraint(const PendulumParams& p, const ReducedState& x, double u) {
    return u * std::sin(x.theta1) + p.M * p.g * std::cos(x.theta1) -
           p.M * p.l * x.theta2 * x.theta2;
}

Vec2 mixed_constraint_gradient(const PendulumParams& p, const ReducedState& x, double u) {
    return {u * std::cos(x.theta1) - p.M * p.g * std::sin(x.theta1),
            -2.0 * p.M * p.l * x.theta2};
}

double g_tilde(const PendulumParams& p, const ReducedState& x) {
    return -std::abs(std::sin(x.theta1)) + p.M * p.g * std::cos(x.theta1) -
           p.M * p.l * x.theta2 * x.theta2;
}

Vec2 g_tilde_branch_gradient(const PendulumParams& p, const ReducedState& x, int side) {
    const double sgn = side >= 0 ? 1.0 : -1.0;
    return {-sgn * std::cos(x.theta1) - p.M * p.g * std::sin(x.theta1),
            -2.0 * p.M * p.l * x.theta2};
}

double constrained_arc_control(const PendulumParams& p, const ReducedState& x) {
    const double s = std::sin(x.theta1);
    if (s == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "constrained-arc control undefined at sin(theta1) = 0");
    }
    return (p.M * p.l * x.theta2 * x.theta2 - p.M * p.g * std::cos(x.theta1)) / s;
}

ControlInterval control_set(const PendulumParams& p, const ReducedState& x) {
    const double s = std::sin(x.theta1);
    // points of G0 such as (-arctan(Mg), 0) evaluate to g~ ~ 1e-16; keep them as degenerate sets
    const double scale = std::abs(s) + p.M * p.g * std::abs(std::cos(x.theta1)) +
                         p.M * p.l * x.theta2 * x.theta2;
    if (g_tilde(p, x) > 8.0 * std::numeric_limits<double>::epsilon() * scale) {
        return ControlInterval::none();
    }
    if (s == 0.0) return {-1.0, 1.0, false};

    const double r = constrained_arc_control(p, x);
    ControlInterval U;
    if (s > 0.0) {
        U.lo = -1.0;
        U.hi = std::min(1.0, r);
        // g~ <= 0 guarantees r >= -1 up to roundoff; snap to the degenerate point
        if (U.hi < U.lo) U.hi = U.lo;
    } else {
        U.lo = std::max(-1.0, r);
        U.hi = 1.0;
        if (U.lo > U.hi) U.lo = U.hi;
    }
    return U;
}

double tension(const PendulumParams& p, const ReducedState& x, double u) {
    const double s = std::sin(x.theta1);
    return -p.m * mixed_constraint(p, x, u) / inertia(p, s);
}

double tension_from_vertical_balance(const PendulumParams& p, const ReducedState& x, double u) {
    const double c = std::cos(x.theta1);
    if (std::abs(c) < 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "vertical balance degenerate at cos(theta1) = 0");
    }
    const double th2_dot = dynamics(p, x, u).y;
    const double z_ddot =
        -p.l * (x.theta2 * x.theta2 * c + th2_dot * std::sin(x.theta1));
    return -p.m * (z_ddot + p.g) / c;
}

double hamiltonian(const PendulumParams& p, const ReducedState& x, const Adjoint& a, double u) {
    const Vec2 f = dynamics(p, x, u);
    return a.lambda1 * f.x + a.lambda2 * f.y;
}

double activation_tolerance(const PendulumParams& p) { return 1e-9 * (1.0 + p.M * p.g); }

namespace {

/// Control of a given branch, clamped into U.
double branch_control(const PendulumParams& p, const ReducedState& x, const ControlInterval& U,
                      ControlMode mode) {
    switch (mode) {
        case ControlMode::BangPlus: return U.clamp(1.0);
        case ControlMode::BangMinus: return U.clamp(-1.0);
        case ControlMode::Constrained:
            return std::sin(x.theta1) == 0.0 ? U.clamp(0.0) : U.clamp(constrained_arc_control(p, x));
        case ControlMode::Tie: return U.clamp(0.0);
    }
    return U.clamp(0.0);
}

}  // namespace

HamiltonianMinimum minimize_hamiltonian(const PendulumParams& p, const ReducedState& x,
                                        const Adjoint& a, std::optional<ControlMode> previous) {
    const ControlInterval U = control_set(p, x);
    if (U.empty) {
        std::ostringstream os;
        os << "empty control set at (" << x.theta1 << ", " << x.theta2
           << "), g~ = " << g_tilde(p, x);
        throw Error(ErrorCode::EmptyControlSet, os.str());
    }

    const double s = std::sin(x.theta1);
    const double k = a.lambda2 * std::cos(x.theta1);

    HamiltonianMinimum out;
    if (k > 0.0) {
        out.u = U.hi;
        out.mode = (s > 0.0 && U.hi < 1.0) ? ControlMode::Constrained : ControlMode::BangPlus;
    } else if (k < 0.0) {
        out.u = U.lo;
        out.mode = (s < 0.0 && U.lo > -1.0) ? ControlMode::Constrained : ControlMode::BangMinus;
    } else if (previous && *previous != ControlMode::Tie) {
        out.mode = *previous;
        out.u = branch_control(p, x, U, *previous);
    } else {
        out.mode = ControlMode::Tie;
        out.u = U.clamp(0.0);
    }
    out.value = hamiltonian(p, x, a, out.u);
    return out;
}

double multiplier(const PendulumParams& p, const ReducedState& x, const Adjoint& a, double u_star) {
    const double h = mixed_constraint(p, x, u_star);
    if (h < -activation_tolerance(p)) return 0.0;
    // the bound |u| <= 1 absorbs the Hamiltonian slope on bang arcs
    if (std::abs(u_star) >= 1.0) return 0.0;

    const double s = std::sin(x.theta1);
    if (s == 0.0) {
        throw Error(ErrorCode::SingularMultiplier,
                    "mixed-constraint multiplier is singular at sin(theta1) = 0");
    }
    const double c = std::cos(x.theta1);
    const double mu = a.lambda2 * c / (s * p.l * inertia(p, s));
    if (mu < -1e-10) {
        spdlog::warn("negative multiplier {:.3e} at ({:.9f}, {:.9f})", mu, x.theta1, x.theta2);
    }
    return mu;
}

}  // namespace tautset
