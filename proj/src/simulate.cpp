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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <set>

#include "tautset/error.hpp"
#include "tautset/setassembly.hpp"

namespace tautset {

namespace {

double project(const PendulumParams& p, const FullState& x, double u) {
    const ControlInterval U = control_set(p, x.reduced());
    if (U.empty) return std::clamp(u, -1.0, 1.0);
    return U.clamp(std::clamp(u, -1.0, 1.0));
}

FullState axpy(const FullState& x, double h, const FullState& k) {
    return {x.theta1 + h * k.theta1, x.theta2 + h * k.theta2, x.x1 + h * k.x1, x.x2 + h * k.x2};
}

}  // namespace

SimulationResult forward_simulate(const PendulumParams& p, const FullState& s0, const ControlPolicy& policy,
                                  double t_max, const SimulationOptions& opts) {
    p.validate();
    if (!(opts.dt > 0.0) || !(t_max >= 0.0) || !policy.law) {
        throw Error(ErrorCode::InvalidArgument, "forward_simulate needs dt > 0, t_max >= 0 and a control law");
    }
    SimulationResult r;
    double t = 0.0;
    FullState x = s0;
    std::size_t seg = 0;
    const auto& bp = policy.breakpoints;
    while (seg < bp.size() && bp[seg] <= 0.0) ++seg;

    auto control = [&](double tt, const FullState& xx) { return project(p, xx, policy.law(seg, tt, xx)); };
    auto record = [&](double tt, const FullState& xx) {
        if (!opts.record) return;
        r.t.push_back(tt);
        r.states.push_back(xx);
        r.controls.push_back(control(tt, xx));
    };

    double g_prev = g_tilde(p, x.reduced());
    if (g_prev > opts.violation_tolerance) {
        r.violation_time = 0.0;
        r.final_state = x;
        record(t, x);
        return r;
    }
    record(t, x);
    while (t < t_max) {
        const double next = seg < bp.size() ? std::min(bp[seg], t_max) : t_max;
        const double h = std::min(opts.dt, next - t);
        const FullState k1 = full_dynamics(p, x, control(t, x));
        const FullState x2 = axpy(x, 0.5 * h, k1);
        const FullState k2 = full_dynamics(p, x2, control(t + 0.5 * h, x2));
        const FullState x3 = axpy(x, 0.5 * h, k2);
        const FullState k3 = full_dynamics(p, x3, control(t + 0.5 * h, x3));
        const FullState x4 = axpy(x, h, k3);
        const FullState k4 = full_dynamics(p, x4, control(t + h, x4));
        FullState xn;
        xn.theta1 = x.theta1 + h / 6.0 * (k1.theta1 + 2 * k2.theta1 + 2 * k3.theta1 + k4.theta1);
        xn.theta2 = x.theta2 + h / 6.0 * (k1.theta2 + 2 * k2.theta2 + 2 * k3.theta2 + k4.theta2);
        xn.x1 = x.x1 + h / 6.0 * (k1.x1 + 2 * k2.x1 + 2 * k3.x1 + k4.x1);
        xn.x2 = x.x2 + h / 6.0 * (k1.x2 + 2 * k2.x2 + 2 * k3.x2 + k4.x2);
        if (!std::isfinite(xn.theta1) || !std::isfinite(xn.theta2)) {
            throw Error(ErrorCode::StepFailure, "forward simulation produced a non-finite state");
        }
        const double t_prev = t;
        t = (h == next - t) ? next : t + h;
        if (seg < bp.size() && t >= bp[seg]) ++seg;
        x = xn;
        const double g = g_tilde(p, x.reduced());
        if (g > opts.violation_tolerance) {
            const double w = g_prev < g ? (0.0 - g_prev) / (g - g_prev) : 1.0;
            r.violation_time = t_prev + std::clamp(w, 0.0, 1.0) * (t - t_prev);
            record(t, x);
            break;
        }
        g_prev = g;
        record(t, x);
        if (opts.observer && !opts.observer(t, x)) {
            r.stopped_by_observer = true;
            break;
        }
    }
    r.final_time = t;
    r.final_state = x;
    return r;
}

ControlPolicy constant_policy(double u) {
    return {{}, [u](std::size_t, double, const FullState&) { return u; }};
}

ControlPolicy bang_bang_policy(double first, std::vector<double> switch_times) {
    std::sort(switch_times.begin(), switch_times.end());
    return {switch_times, [first](std::size_t seg, double, const FullState&) { return seg % 2 == 0 ? first : -first; }};
}

ControlPolicy greedy_tension_policy(const PendulumParams&) {
    return {{}, [](std::size_t, double, const FullState& x) { return std::sin(x.theta1) >= 0.0 ? -1.0 : 1.0; }};
}

ControlPolicy random_piecewise_policy(std::uint64_t seed, double t_max, double min_hold, double max_hold) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> hold(min_hold, max_hold), value(-1.0, 1.0);
    ControlPolicy pol;
    std::vector<double> values{value(rng)};
    double t = hold(rng);
    while (t < t_max) {
        pol.breakpoints.push_back(t);
        values.push_back(value(rng));
        t += hold(rng);
    }
    pol.law = [values](std::size_t seg, double, const FullState&) { return values[std::min(seg, values.size() - 1)]; };
    return pol;
}

ControlPolicy barrier_replay_policy(const PendulumParams& p, const BarrierArc& arc, std::size_t from, std::size_t to) {
    if (from >= arc.samples.size() || to >= from) throw Error(ErrorCode::InvalidArgument, "bad replay range");
    ControlPolicy pol;
    const double t0 = arc.samples[from].t;
    for (std::size_t k = from - 1; k > to; --k) pol.breakpoints.push_back(arc.samples[k].t - t0);
    std::vector<ControlMode> modes;
    for (std::size_t k = from; k-- > to;) modes.push_back(arc.samples[k].mode);
    pol.law = [p, modes](std::size_t seg, double, const FullState& x) {
        const ControlMode mode = modes[std::min(seg, modes.size() - 1)];
        if (mode == ControlMode::Constrained && std::sin(x.theta1) == 0.0) return 0.0;
        return branch_control(p, x.reduced(), mode);
    };
    return pol;
}

std::vector<ControlPolicy> oracle_policies(const PendulumParams& p, double t_max) {
    std::vector<ControlPolicy> out;
    out.push_back(greedy_tension_policy(p));
    for (double u : {-1.0, 0.0, 1.0}) out.push_back(constant_policy(u));
    const std::vector<double> times{0.1, 0.25, 0.5, 1.0, 2.0};
    for (double first : {-1.0, 1.0}) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] < t_max) out.push_back(bang_bang_policy(first, {times[i]}));
            for (std::size_t j = i + 1; j < times.size(); ++j) {
                if (times[j] < t_max) out.push_back(bang_bang_policy(first, {times[i], times[j]}));
            }
        }
    }
    return out;
}

OracleReport membership_oracle(const AdmissibleSetModel& model, const OracleOptions& opts) {
    const PendulumParams& p = model.params;
    OracleReport rep;
    const auto policies = oracle_policies(p, opts.t_max);
    rep.policies = policies.size();
    const double W = model.window.theta2_abs_max;
    const double d1 = 2.0 * std::numbers::pi / opts.grid_theta1;
    const double d2 = 2.0 * W / opts.grid_theta2;
    rep.band = 2.0 * std::max(d1, d2);

    SimulationOptions so;
    so.dt = opts.dt;
    so.record = false;
    const int n = opts.grid_theta1 * opts.grid_theta2;
    rep.points.resize(static_cast<std::size_t>(n));

    auto work = [&](int lo, int hi) {
        for (int idx = lo; idx < hi; ++idx) {
            const int i = idx % opts.grid_theta1, j = idx / opts.grid_theta1;
            OraclePoint& pt = rep.points[static_cast<std::size_t>(idx)];
            pt.state = {-std::numbers::pi + (i + 0.5) * d1, -W + (j + 0.5) * d2};
            const MembershipVerdict v = membership_within(model, pt.state, 2.0 * rep.band);
            pt.computed = v.tag;
            pt.distance = v.distance_estimate;
            pt.in_band = v.distance_estimate <= rep.band;
            if (g_tilde(p, pt.state) <= 0.0) {
                for (const ControlPolicy& pol : policies) {
                    const SimulationResult r =
                        forward_simulate(p, {pt.state.theta1, pt.state.theta2, 0.0, 0.0}, pol, opts.t_max, so);
                    if (!r.violation_time) {
                        pt.oracle_admissible = true;
                        break;
                    }
                }
            }
            const bool computed_out = pt.computed == Verdict::Inadmissible || pt.computed == Verdict::OutsideG;
            pt.disagreement = pt.oracle_admissible && computed_out && !pt.in_band;
            pt.reverse_disagreement = !pt.oracle_admissible && pt.computed == Verdict::Interior;
        }
    };
    const int threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> jobs;
    for (int t = 0; t < threads; ++t) {
        jobs.push_back(std::async(std::launch::async, work, n * t / threads, n * (t + 1) / threads));
    }
    for (auto& j : jobs) j.get();

    for (const OraclePoint& pt : rep.points) {
        rep.disagreements += pt.disagreement;
        rep.reverse_disagreements += pt.reverse_disagreement;
    }
    rep.passed = rep.disagreements == 0;
    if (!rep.passed && opts.throw_on_disagreement) {
        throw Error(ErrorCode::OracleDisagreement,
                    std::to_string(rep.disagreements) + " grid points are admissible under a sampled policy "
                                                        "but lie outside the computed set");
    }
    return rep;
}

SemiPermeabilityReport check_semi_permeability(const AdmissibleSetModel& model, const SemiPermeabilityOptions& opts) {
    const PendulumParams& p = model.params;
    SemiPermeabilityReport rep;

    std::set<int> cell_arcs;
    for (const InadmissibleCell& c : model.cells) cell_arcs.insert(c.arc_ids.begin(), c.arc_ids.end());
    std::vector<const BarrierArc*> arcs;
    for (const BarrierArc& a : model.arcs) {
        if (cell_arcs.count(a.id) && a.samples.size() > 20) arcs.push_back(&a);
    }
    if (arcs.empty() || opts.points <= 0) return rep;

    // candidates spread evenly over the middle of each arc
    struct Candidate {
        const BarrierArc* arc;
        std::size_t index;
        ReducedState offset_point;
    };
    std::vector<Candidate> accepted;
    const int per_arc = 4 * opts.points / static_cast<int>(arcs.size()) + 1;
    for (const BarrierArc* a : arcs) {
        const std::size_t n = a->samples.size();
        for (int c = 0; c < per_arc; ++c) {
            const double frac = 0.1 + 0.8 * (c + 0.5) / per_arc;
            const std::size_t k = static_cast<std::size_t>(frac * static_cast<double>(n - 1));
            const ArcSample& s = a->samples[k];
            bool near_stop = false;
            for (const StoppingPoint& sp : model.stopping_points) {
                near_stop |= std::hypot(sp.location.theta1 - s.state.theta1, sp.location.theta2 - s.state.theta2) < 0.05;
            }
            if (near_stop) continue;
            const Vec2 nrm = barrier_normal(s);
            const ReducedState q{s.state.theta1 + opts.offset * nrm.x, s.state.theta2 + opts.offset * nrm.y};
            if (membership_within(model, q, kBoundaryTolerance).tag != Verdict::Inadmissible) {
                ++rep.offset_rejected;
                continue;
            }
            accepted.push_back({a, k, q});
        }
    }
    std::vector<Candidate> chosen;
    for (int i = 0; i < opts.points && !accepted.empty(); ++i) {
        const std::size_t k = static_cast<std::size_t>(i) * accepted.size() / static_cast<std::size_t>(opts.points);
        chosen.push_back(accepted[std::min(k, accepted.size() - 1)]);
    }

    for (std::size_t ci = 0; ci < chosen.size(); ++ci) {
        const Candidate& c = chosen[ci];
        ++rep.points_tested;
        for (int j = 0; j < opts.policies; ++j) {
            const ControlPolicy pol =
                random_piecewise_policy(opts.seed * 1000003ULL + ci * 101ULL + static_cast<std::uint64_t>(j),
                                        opts.t_max, 0.05, 0.5);
            bool reentered = false;
            SimulationOptions so;
            so.dt = opts.dt;
            so.record = false;
            so.observer = [&](double, const FullState& x) {
                if (std::abs(x.theta2) > model.window.theta2_abs_max) return false;
                if (membership_within(model, x.reduced(), kBoundaryTolerance).tag == Verdict::Interior) {
                    reentered = true;
                    return false;
                }
                return true;
            };
            forward_simulate(p, {c.offset_point.theta1, c.offset_point.theta2, 0.0, 0.0}, pol, opts.t_max, so);
            ++rep.trajectories;
            if (reentered) {
                ++rep.reentries;
                spdlog::warn("trajectory from ({}, {}) re-entered the interior", c.offset_point.theta1,
                             c.offset_point.theta2);
            }
        }

        // replay the barrier control from the boundary point toward G0
        const BarrierArc& a = *c.arc;
        const std::size_t to = a.source.kind == EndpointKind::NonSmooth ? 1 : 0;
        const ControlPolicy replay = barrier_replay_policy(p, a, c.index, to);
        // the zero-tension arc is singular at its end, so replay errors grow like 1/t^2 there
        SimulationOptions so;
        so.dt = 1e-4;
        const ArcSample& s0 = a.samples[c.index];
        const SimulationResult r = forward_simulate(p, {s0.state.theta1, s0.state.theta2, 0.0, 0.0}, replay,
                                                    a.samples[to].t - s0.t, so);
        std::size_t k = c.index;
        for (std::size_t i = 0; i < r.t.size(); ++i) {
            const double t_arc = s0.t + r.t[i];
            while (k > to && a.samples[k - 1].t <= t_arc + 1e-12) --k;
            if (std::abs(a.samples[k].t - t_arc) > 1e-12) continue;
            const double dev = std::hypot(r.states[i].theta1 - a.samples[k].state.theta1,
                                          r.states[i].theta2 - a.samples[k].state.theta2);
            rep.max_replay_deviation = std::max(rep.max_replay_deviation, dev);
        }
    }
    return rep;
}

}  // namespace tautset
