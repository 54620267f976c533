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

#include "tautset/integrator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "tautset/error.hpp"

namespace tautset {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::HorizonReached: return "HorizonReached";
        case Termination::LeftWindow: return "LeftWindow";
        case Termination::StoppedAtIntersection: return "StoppedAtIntersection";
        case Termination::ReachedG0Again: return "ReachedG0Again";
        case Termination::AdjointVanished: return "AdjointVanished";
    }
    return "?";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::SinCrossing: return "SinCrossing";
        case EventKind::AdjointSwitch: return "AdjointSwitch";
        case EventKind::ModeChange: return "ModeChange";
        case EventKind::ReachedG0: return "ReachedG0";
        case EventKind::LeftWindow: return "LeftWindow";
    }
    return "?";
}

Window default_window(const PendulumParams& p) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    return {-kTwoPi - 1.0, kTwoPi + 1.0, 3.0 * p.natural_rate()};
}

IntegratorOptions default_integrator_options(const PendulumParams& p) {
    IntegratorOptions o;
    o.window = default_window(p);
    return o;
}

Adjoint adjoint_rhs(const PendulumParams& p, const ReducedState& s, const Adjoint& a, double u, double mu) {
    const Mat2 J = dynamics_jacobian(p, s, u);
    const Vec2 dh = mixed_constraint_gradient(p, s, u);
    return {-(J.a11 * a.lambda1 + J.a21 * a.lambda2) - mu * dh.x,
            -(J.a12 * a.lambda1 + J.a22 * a.lambda2) - mu * dh.y};
}

double branch_control(const PendulumParams& p, const ReducedState& s, ControlMode mode) {
    switch (mode) {
        case ControlMode::BangPlus: return 1.0;
        case ControlMode::BangMinus: return -1.0;
        case ControlMode::Constrained: return constrained_arc_control(p, s);
        case ControlMode::Tie: return 0.0;
    }
    return 0.0;
}

namespace {

using Y = std::array<double, 4>;

// Multiplier of a frozen branch; the bound absorbs the slope on bang arcs.
double branch_multiplier(const PendulumParams& p, const ReducedState& s, const Adjoint& a, ControlMode mode) {
    if (mode != ControlMode::Constrained) return 0.0;
    const double sn = std::sin(s.theta1);
    const double D = p.M + p.m * sn * sn;
    return a.lambda2 * std::cos(s.theta1) / (sn * p.l * D);
}

// d/dtau with tau = -t.
Y backward_rhs(const PendulumParams& p, ControlMode mode, const Y& y) {
    const ReducedState s{y[0], y[1]};
    const Adjoint a{y[2], y[3]};
    const double u = branch_control(p, s, mode);
    const Vec2 f = dynamics(p, s, u);
    const Adjoint da = adjoint_rhs(p, s, a, u, branch_multiplier(p, s, a, mode));
    return {-f.x, -f.y, -da.lambda1, -da.lambda2};
}

struct StepResult {
    Y y;
    double err;
};

// One Dormand-Prince 5(4) step; err is the scaled max-norm estimate.
StepResult dp45_step(const PendulumParams& p, ControlMode mode, const Y& y0, double h, double atol,
                     double rtol, std::size_t n_checked = 4) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                            a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    auto comb = [&](std::initializer_list<std::pair<double, const Y*>> terms) {
        Y r = y0;
        for (const auto& [c, k] : terms) {
            for (int i = 0; i < 4; ++i) r[i] += h * c * (*k)[i];
        }
        return r;
    };
    const Y k1 = backward_rhs(p, mode, y0);
    const Y k2 = backward_rhs(p, mode, comb({{a21, &k1}}));
    const Y k3 = backward_rhs(p, mode, comb({{a31, &k1}, {a32, &k2}}));
    const Y k4 = backward_rhs(p, mode, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Y k5 = backward_rhs(p, mode, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Y k6 = backward_rhs(p, mode, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Y y1 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Y k7 = backward_rhs(p, mode, y1);

    double err = 0.0;
    for (std::size_t i = 0; i < n_checked; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = INFINITY;
    return {y1, err};
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool upper_side(ControlMode m, const ReducedState& s) {
    // which bound of U the branch sits on
    if (m == ControlMode::BangPlus) return true;
    if (m == ControlMode::BangMinus) return false;
    return std::sin(s.theta1) > 0.0;
}

struct Signature {
    int sin_sign = 0;
    int side = 0;  ///< sign of lambda2 cos(theta1)
    bool contact = false;
    bool outside = false;
    ControlMode desired = ControlMode::Tie;

    bool same_as(const Signature& o) const {
        const bool sin_same = sin_sign == 0 || o.sin_sign == 0 || sin_sign == o.sin_sign;
        return sin_same && contact == o.contact && outside == o.outside && desired == o.desired;
    }
};

class ArcIntegrator {
public:
    ArcIntegrator(const PendulumParams& p, const TangencyPoint& tp, const IntegratorOptions& o)
        : p_(p), tp_(tp), o_(o) {}

    BarrierArc run();

private:
    Signature signature(const Y& y, ControlMode current) const {
        Signature sig;
        const ReducedState s{y[0], y[1]};
        sig.sin_sign = sign_of(std::sin(s.theta1));
        sig.side = sign_of(y[3] * std::cos(s.theta1));
        sig.outside = !o_.window.contains(s);
        const double gt = g_tilde(p_, s);
        sig.contact = armed_ && gt > 0.0;
        if (sig.contact || sig.outside) {
            sig.desired = current;
            return sig;
        }
        if (control_set(p_, s).empty) {
            sig.desired = current;
            return sig;
        }
        sig.desired = minimize_hamiltonian(p_, s, {y[2], y[3]}, current).mode;
        return sig;
    }

    void push_sample(double t, const Y& y, ControlMode mode) {
        const ReducedState s{y[0], y[1]};
        const Adjoint a{y[2], y[3]};
        ArcSample smp;
        smp.t = t;
        smp.state = s;
        smp.adjoint = a;
        smp.mode = mode;
        smp.control = branch_control(p_, s, mode);
        smp.multiplier = branch_multiplier(p_, s, a, mode);
        smp.hamiltonian = hamiltonian(p_, s, a, smp.control);
        arc_.samples.push_back(smp);
        log_norms_.push_back(log_norm_);
    }

    void record(double t, EventKind kind, const ReducedState& s, ControlMode before, ControlMode after) {
        arc_.events.push_back({t, kind, s, before, after});
    }

    void finalize_scale();

    const PendulumParams& p_;
    const TangencyPoint& tp_;
    const IntegratorOptions& o_;
    BarrierArc arc_;
    std::vector<double> log_norms_;
    double log_norm_ = 0.0;
    bool armed_ = false;
};

BarrierArc ArcIntegrator::run() {
    arc_.source = tp_;
    const double final_norm = tp_.final_adjoint.norm();
    if (!(final_norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "final adjoint must be non-zero");

    ControlMode mode;
    double tau = 0.0;
    Y y{tp_.state.theta1, tp_.state.theta2, tp_.final_adjoint.lambda1 / final_norm,
        tp_.final_adjoint.lambda2 / final_norm};
    log_norm_ = std::log(final_norm);

    if (tp_.kind == EndpointKind::Smooth) {
        mode = tp_.final_control_set.lo > 0.0 ? ControlMode::BangPlus : ControlMode::BangMinus;
        push_sample(0.0, y, mode);
    } else {
        // the zero-tension arc is singular at sin(theta1) = 0; start on its series
        mode = ControlMode::Constrained;
        ArcSample s0;
        s0.t = 0.0;
        s0.state = tp_.state;
        s0.adjoint = {y[2], y[3]};
        s0.mode = mode;
        s0.control = 0.0;  // limit of the zero-tension control
        s0.multiplier = 0.0;
        s0.hamiltonian = hamiltonian(p_, s0.state, s0.adjoint, 0.0);
        arc_.samples.push_back(s0);
        log_norms_.push_back(log_norm_);
        const ReducedState z = free_fall_approach(p_, tp_, o_.series_offset);
        tau = o_.series_offset;
        y[0] = z.theta1;
        y[1] = z.theta2;
        push_sample(-tau, y, mode);
    }
    armed_ = g_tilde(p_, {y[0], y[1]}) < -1e-12;

    double h = std::min(o_.max_step, 1e-4);
    arc_.termination = Termination::HorizonReached;
    Signature sig0 = signature(y, mode);
    while (tau < o_.max_backward_time) {
        h = std::min({h, o_.max_step, o_.max_backward_time - tau});
        StepResult st = dp45_step(p_, mode, y, h, o_.atol, o_.rtol);
        if (st.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            if (h < o_.min_step) {
                std::ostringstream os;
                os << "step size collapsed at t = " << -tau << ", theta = (" << y[0] << ", " << y[1] << ")";
                throw Error(ErrorCode::StepFailure, os.str());
            }
            continue;
        }
        const double grow = st.err > 0.0 ? std::min(5.0, 0.9 * std::pow(st.err, -0.2)) : 5.0;

        Signature sig1 = signature(st.y, mode);
        if (sig1.same_as(sig0)) {
            tau += h;
            y = st.y;
        } else {
            // bisect the step length on the signature change
            double lo = 0.0, hi = h;
            Y y_lo = y, y_hi = st.y;
            while (hi - lo > o_.event_tolerance) {
                const double mid = 0.5 * (lo + hi);
                const Y ym = dp45_step(p_, mode, y, mid, o_.atol, o_.rtol).y;
                if (signature(ym, mode).same_as(sig0)) {
                    lo = mid;
                    y_lo = ym;
                } else {
                    hi = mid;
                    y_hi = ym;
                }
            }
            sig1 = signature(y_hi, mode);
            if (sig1.contact || sig1.outside) {
                // keep the final sample on the admissible side
                tau += lo;
                y = y_lo;
                const double n = std::hypot(y[2], y[3]);
                log_norm_ += std::log(n);
                y[2] /= n;
                y[3] /= n;
                push_sample(-tau, y, mode);
                const ReducedState at{y_hi[0], y_hi[1]};
                if (sig1.contact) {
                    record(-(tau), EventKind::ReachedG0, at, mode, mode);
                    arc_.termination = Termination::ReachedG0Again;
                } else {
                    record(-(tau), EventKind::LeftWindow, at, mode, mode);
                    arc_.termination = Termination::LeftWindow;
                }
                break;
            }
            tau += hi;
            y = y_hi;
            const ReducedState at{y[0], y[1]};
            if (sig1.sin_sign != 0 && sig0.sin_sign != 0 && sig1.sin_sign != sig0.sin_sign) {
                record(-tau, EventKind::SinCrossing, at, mode, sig1.desired);
            }
            if (sig1.desired != mode) {
                const bool side_flip = upper_side(mode, at) != upper_side(sig1.desired, at);
                record(-tau, side_flip ? EventKind::AdjointSwitch : EventKind::ModeChange, at, mode,
                       sig1.desired);
                mode = sig1.desired;
            }
        }

        const double n = std::hypot(y[2], y[3]);
        if (n < 1e-12) {
            arc_.termination = Termination::AdjointVanished;
            break;
        }
        log_norm_ += std::log(n);
        y[2] /= n;
        y[3] /= n;
        push_sample(-tau, y, mode);
        if (!armed_ && g_tilde(p_, {y[0], y[1]}) < -1e-12) armed_ = true;
        sig0 = signature(y, mode);
        h *= grow;
    }

    finalize_scale();
    return std::move(arc_);
}

void ArcIntegrator::finalize_scale() {
    double max_log = -INFINITY;
    for (std::size_t i = 0; i < arc_.samples.size(); ++i) {
        max_log = std::max(max_log, log_norms_[i] + std::log(arc_.samples[i].adjoint.norm()));
    }
    const double final_norm = tp_.final_adjoint.norm();
    arc_.adjoint_log_scale = std::log(final_norm) - max_log;
    for (std::size_t i = 0; i < arc_.samples.size(); ++i) {
        const double f = std::exp(log_norms_[i] + arc_.adjoint_log_scale);
        ArcSample& s = arc_.samples[i];
        s.adjoint.lambda1 *= f;
        s.adjoint.lambda2 *= f;
        s.multiplier *= f;
        s.hamiltonian *= f;
    }
}

}  // namespace

BarrierArc integrate_arc(const PendulumParams& p, const TangencyPoint& tp, const IntegratorOptions& opts) {
    p.validate();
    if (!(opts.atol > 0.0 && opts.rtol > 0.0 && opts.max_step > 0.0 && opts.max_backward_time >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "integrator tolerances must be positive");
    }
    ArcIntegrator integ(p, tp, opts);
    BarrierArc arc = integ.run();
    spdlog::debug("arc from ({}, {}): {} samples, {} events, {}", tp.state.theta1, tp.state.theta2,
                  arc.samples.size(), arc.events.size(), to_string(arc.termination));
    return arc;
}

std::vector<BarrierArc> integrate_arcs(const PendulumParams& p, const std::vector<TangencyPoint>& tps,
                                       const IntegratorOptions& opts) {
    std::vector<std::future<BarrierArc>> jobs;
    jobs.reserve(tps.size());
    for (const TangencyPoint& tp : tps) {
        jobs.push_back(std::async(std::launch::async, [&p, &tp, &opts] { return integrate_arc(p, tp, opts); }));
    }
    std::vector<BarrierArc> arcs;
    arcs.reserve(tps.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        arcs.push_back(jobs[i].get());
        arcs.back().id = static_cast<int>(i);
    }
    return arcs;
}

namespace {

// Adaptive fixed-branch integration over an exact backward interval.
Y advance(const PendulumParams& p, ControlMode mode, Y y, double dt_backward, double tol, std::size_t n_checked) {
    const double dir = dt_backward >= 0.0 ? 1.0 : -1.0;
    const double total = std::abs(dt_backward);
    double done = 0.0;
    double h = std::min(total, 1e-3);
    while (done < total) {
        h = std::min(h, total - done);
        if (h <= 0.0) break;
        StepResult st = dp45_step(p, mode, y, dir * h, tol, tol, n_checked);
        if (st.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            if (h < 1e-15) throw Error(ErrorCode::StepFailure, "local re-integration failed");
            continue;
        }
        done += h;
        y = st.y;
        h *= st.err > 0.0 ? std::min(5.0, 0.9 * std::pow(st.err, -0.2)) : 5.0;
    }
    return y;
}

}  // namespace

ReducedState advance_state(const PendulumParams& p, const ReducedState& s, ControlMode mode, double dt_backward,
                           double tol) {
    // the state equation does not involve the adjoint, so a zero adjoint is carried along
    const Y y = advance(p, mode, {s.theta1, s.theta2, 0.0, 0.0}, dt_backward, tol, 2);
    return {y[0], y[1]};
}

ArcSample advance_sample(const PendulumParams& p, const ArcSample& from, double dt_backward, double tol) {
    const Y y = advance(p, from.mode, {from.state.theta1, from.state.theta2, from.adjoint.lambda1, from.adjoint.lambda2},
                        dt_backward, tol, 4);
    ArcSample out = from;
    out.t = from.t - dt_backward;
    out.state = {y[0], y[1]};
    out.adjoint = {y[2], y[3]};
    out.control = branch_control(p, out.state, out.mode);
    out.multiplier = branch_multiplier(p, out.state, out.adjoint, out.mode);
    out.hamiltonian = hamiltonian(p, out.state, out.adjoint, out.control);
    return out;
}

double hamiltonian_drift(const BarrierArc& arc) {
    if (arc.samples.empty()) return 0.0;
    const double h0 = arc.samples.front().hamiltonian;
    double drift = 0.0;
    for (const ArcSample& s : arc.samples) drift = std::max(drift, std::abs(s.hamiltonian - h0));
    return drift;
}

}  // namespace tautset
