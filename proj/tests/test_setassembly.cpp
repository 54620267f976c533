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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include "tautset/error.hpp"
#include "tautset/intersection.hpp"
#include "tautset/setassembly.hpp"
#include "tautset/tangency.hpp"

using namespace tautset;

namespace {

constexpr double kPi = std::numbers::pi;

AdmissibleSetModel build(const PendulumParams& p) {
    auto tps = all_endpoints(p, {-1, 1});
    auto arcs = integrate_arcs(p, tps, default_integrator_options(p));
    auto sps = find_stopping_points(p, arcs);
    auto cut = truncate_at_stopping_points(p, arcs, sps);
    return assemble(p, std::move(cut), std::move(tps), std::move(sps), default_assembly_options(p));
}

const AdmissibleSetModel& small_cart() {
    static const AdmissibleSetModel m = build({0.1, 0.1, 1.0, 10.0});
    return m;
}

const AdmissibleSetModel& big_cart() {
    static const AdmissibleSetModel m = build({0.5, 0.1, 1.0, 10.0});
    return m;
}

Verdict tag(const AdmissibleSetModel& m, double t1, double t2) { return membership(m, {t1, t2}).tag; }

}  // namespace

TEST_CASE("connected admissible set for the small cart") {
    const auto& m = small_cart();
    CHECK_FALSE(m.degenerate);
    CHECK(m.components.size() == 1);
    CHECK(m.bounded_components() == 0);
    REQUIRE(m.cells.size() == 4);
    for (const auto& c : m.cells) {
        CHECK(c.area > 0.0);
        CHECK(c.arc_ids.size() >= 2);
    }
}

TEST_CASE("disjoint admissible set for the big cart") {
    const auto& m = big_cart();
    CHECK(m.stopping_points.empty());
    CHECK(m.components.size() >= 2);
    CHECK(m.bounded_components() == 1);
    for (const auto& c : m.components) {
        if (c.bounded) {
            // the bounded family surrounds the hanging equilibrium
            CHECK(std::abs(std::abs(c.representative.theta1) - kPi) < 0.5);
        }
    }
    CHECK(tag(m, kPi, 0.0) == Verdict::Interior);
    CHECK(tag(m, 0.0, 9.0) == Verdict::Interior);
}

TEST_CASE("membership examples") {
    const auto& m = small_cart();
    CHECK(tag(m, 0.0, 0.0) == Verdict::OutsideG);
    CHECK(tag(m, 3.14159, 0.0) == Verdict::Interior);
    CHECK(tag(m, -1.2, 3.5) == Verdict::Inadmissible);
    CHECK(tag(m, 1.2, -3.5) == Verdict::Inadmissible);
    CHECK(tag(m, 0.5, 0.0) == Verdict::OutsideG);
    const auto& arc = m.arcs[2];
    const auto& s = arc.samples[arc.samples.size() / 2].state;
    CHECK(tag(m, s.theta1, s.theta2) == Verdict::Boundary);
    CHECK(membership(m, s).distance_estimate <= kBoundaryTolerance);
    CHECK_THROWS_AS(membership(m, {0.0, 1e3}), Error);
    try {
        membership(m, {0.0, 1e3});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WindowExceeded);
    }
}

TEST_CASE("membership is 2 pi periodic and symmetric under point reflection") {
    std::mt19937_64 rng(7);
    for (const auto* m : {&small_cart(), &big_cart()}) {
        std::uniform_real_distribution<double> d1(-kPi, kPi), d2(-0.95 * m->window.theta2_abs_max,
                                                                 0.95 * m->window.theta2_abs_max);
        for (int i = 0; i < 300; ++i) {
            const ReducedState s{d1(rng), d2(rng)};
            const Verdict v = membership(*m, s).tag;
            CHECK(membership(*m, {s.theta1 + 2 * kPi, s.theta2}).tag == v);
            CHECK(membership(*m, {s.theta1 - 4 * kPi, s.theta2}).tag == v);
            // (theta, u) -> (-theta, -u) maps solutions to solutions
            CHECK(membership(*m, {-s.theta1, -s.theta2}).tag == v);
        }
    }
}

TEST_CASE("points beyond the barrier normal are inadmissible") {
    const auto& m = small_cart();
    for (const auto& cell : m.cells) {
        for (const int id : cell.arc_ids) {
            const auto& arc = m.arcs[static_cast<std::size_t>(id)];
            const auto& s = arc.samples[arc.samples.size() / 2];
            const Vec2 n = barrier_normal(s);
            CHECK(std::hypot(n.x, n.y) == doctest::Approx(1.0));
            CHECK(tag(m, s.state.theta1 + 1e-3 * n.x, s.state.theta2 + 1e-3 * n.y) == Verdict::Inadmissible);
            CHECK(tag(m, s.state.theta1 - 1e-3 * n.x, s.state.theta2 - 1e-3 * n.y) == Verdict::Interior);
        }
    }
}

TEST_CASE("concurrent queries agree with serial ones") {
    const auto& m = big_cart();
    std::vector<ReducedState> pts;
    for (int i = 0; i < 400; ++i) pts.push_back({-kPi + i * 0.0157, -7.0 + i * 0.035});
    std::vector<Verdict> serial;
    for (const auto& s : pts) serial.push_back(membership(m, s).tag);
    std::vector<std::future<std::vector<Verdict>>> jobs;
    for (int j = 0; j < 4; ++j) {
        jobs.push_back(std::async(std::launch::async, [&] {
            std::vector<Verdict> out;
            for (const auto& s : pts) out.push_back(membership(m, s).tag);
            return out;
        }));
    }
    for (auto& j : jobs) CHECK(j.get() == serial);
}

TEST_CASE("without barrier arcs every constraint-satisfying state is interior") {
    const PendulumParams p{0.1, 0.1, 1.0, 10.0};
    const auto m = assemble(p, {}, {}, {}, default_assembly_options(p));
    CHECK(m.degenerate);
    CHECK(m.cells.empty());
    CHECK(tag(m, kPi, 0.0) == Verdict::Interior);
    CHECK(tag(m, -1.2, 3.5) == Verdict::Interior);
    CHECK(tag(m, 0.0, 0.0) == Verdict::OutsideG);
}

TEST_CASE("forward simulation") {
    const PendulumParams p{0.1, 0.1, 1.0, 10.0};
    SUBCASE("hanging at rest with zero control stays taut") {
        const auto r = forward_simulate(p, {kPi, 0.0, 0.0, 0.0}, constant_policy(0.0), 10.0);
        CHECK_FALSE(r.violation_time.has_value());
        CHECK(r.final_time == doctest::Approx(10.0));
        CHECK(std::abs(r.final_state.theta1 - kPi) < 1e-12);
        CHECK(std::abs(r.final_state.theta2) < 1e-12);
    }
    SUBCASE("slack start violates immediately") {
        const auto r = forward_simulate(p, {0.0, 0.0, 0.0, 0.0}, constant_policy(0.0), 1.0);
        REQUIRE(r.violation_time.has_value());
        CHECK(*r.violation_time == 0.0);
    }
    SUBCASE("step halving converges away from the constraint") {
        const FullState x0{3.0, 0.5, 0.0, 0.0};
        SimulationOptions a, b;
        a.dt = 1e-3;
        b.dt = 5e-4;
        const auto ra = forward_simulate(p, x0, bang_bang_policy(1.0, {0.3}), 1.0, a);
        const auto rb = forward_simulate(p, x0, bang_bang_policy(1.0, {0.3}), 1.0, b);
        REQUIRE_FALSE(ra.violation_time.has_value());
        for (std::size_t i = 0; i < ra.states.size(); ++i) {
            REQUIRE(mixed_constraint(p, {ra.states[i].theta1, ra.states[i].theta2}, ra.controls[i]) < -0.1);
        }
        CHECK(std::abs(ra.final_state.theta1 - rb.final_state.theta1) < 1e-9);
        CHECK(std::abs(ra.final_state.x1 - rb.final_state.x1) < 1e-9);
    }
    SUBCASE("cart coordinates follow the horizontal momentum balance") {
        // with u = 0 the horizontal momentum (M + m) x' + m l th2 cos th1 is conserved
        const FullState x0{2.0, 1.5, 0.0, 0.2};
        const auto r = forward_simulate(p, x0, constant_policy(0.0), 2.0);
        auto momentum = [&](const FullState& q) { return (p.M + p.m) * q.x2 + p.m * p.l * q.theta2 * std::cos(q.theta1); };
        if (!r.violation_time) CHECK(momentum(r.final_state) == doctest::Approx(momentum(x0)).epsilon(1e-9));
    }
}

TEST_CASE("small property and oracle runs pass") {
    const auto& m = small_cart();
    SemiPermeabilityOptions so;
    so.points = 8;
    so.policies = 4;
    const auto r = check_semi_permeability(m, so);
    CHECK(r.points_tested == 8);
    CHECK(r.reentries == 0);
    CHECK(r.max_replay_deviation <= 1e-4);

    OracleOptions oo;
    oo.grid_theta1 = 8;
    oo.grid_theta2 = 8;
    oo.t_max = 3.0;
    const auto o = membership_oracle(m, oo);
    CHECK(o.points.size() == 64);
    CHECK(o.disagreements == 0);
}
