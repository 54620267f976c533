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
#include <numbers>

#include "tautset/error.hpp"
#include "tautset/tangency.hpp"

using namespace tautset;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("smooth endpoints in closed form") {
    const PendulumParams p;
    const auto pts = smooth_endpoints(p, {0, 0});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].state.theta1 == doctest::Approx(-kPi / 4).epsilon(1e-15));
    CHECK(pts[1].state.theta1 == doctest::Approx(kPi / 4).epsilon(1e-15));
    for (const auto& tp : pts) {
        CHECK(tp.kind == EndpointKind::Smooth);
        CHECK(tp.state.theta2 == 0.0);
        CHECK(tp.final_adjoint.lambda2 == 0.0);
        CHECK(std::abs(g_tilde(p, tp.state)) < 1e-10);
        CHECK(verify_tangentiality(p, tp) < 1e-10);
    }
    CHECK(std::abs(pts[0].final_adjoint.lambda1 - std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(pts[1].final_adjoint.lambda1 + std::sqrt(2.0)) < 1e-12);
    CHECK(pts[0].final_control_set.is_singleton());
    CHECK(pts[0].final_control_set.lo == 1.0);
    CHECK(pts[1].final_control_set.lo == -1.0);

    const auto big = smooth_endpoints(PendulumParams{0.5, 0.1, 1, 10}, {0, 0});
    CHECK(big[0].state.theta1 == doctest::Approx(-1.373401).epsilon(1e-6));
    CHECK(big[1].state.theta1 == doctest::Approx(1.373401).epsilon(1e-6));
}

TEST_CASE("endpoint sets are 2 pi periodic") {
    const PendulumParams p;
    const auto pts = all_endpoints(p, {-1, 1});
    for (const auto& a : pts) {
        for (const auto& b : pts) {
            if (b.period_index == a.period_index + 1 && b.kind == a.kind && b.family_sign == a.family_sign) {
                CHECK(std::abs(b.state.theta1 - a.state.theta1 - 2 * kPi) < 1e-12);
                CHECK(b.state.theta2 == a.state.theta2);
                CHECK(b.final_adjoint.lambda1 == doctest::Approx(a.final_adjoint.lambda1).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("non-smooth endpoints and the mirror validation") {
    const PendulumParams p;
    const auto pts = nonsmooth_endpoints(p, {0, 0});
    REQUIRE(pts.size() == 2);
    const auto& up = pts[0];
    CHECK(up.state.theta1 == 0.0);
    CHECK(up.state.theta2 == doctest::Approx(3.162278).epsilon(1e-7));
    CHECK(std::abs(up.final_adjoint.lambda1 - 1.0) < 1e-12);
    CHECK(std::abs(up.final_adjoint.lambda2 + 2 * 0.1 * std::sqrt(10.0)) < 1e-12);
    CHECK(up.approach_side == ApproachSide::B);
    CHECK(std::abs(g_tilde(p, up.state)) < 1e-10);
    CHECK(verify_tangentiality(p, up) >= -1e-8);
    // left-limit control set along the zero-tension arc is [0, 1]
    CHECK(std::abs(up.final_control_set.lo) < 1e-5);
    CHECK(up.final_control_set.hi == 1.0);

    const auto& mir = pts[1];
    CHECK(mir.state.theta2 == doctest::Approx(-3.162278).epsilon(1e-7));
    CHECK(mir.final_adjoint.lambda1 == doctest::Approx(-1.0));
    CHECK(mir.final_adjoint.lambda2 == doctest::Approx(0.632456).epsilon(1e-6));
    // the mirrored adjoint equals the gradient of the branch valid for theta1 > 0
    const Vec2 right = g_tilde_branch_gradient(p, mir.state, +1);
    CHECK(mir.final_adjoint.lambda1 == doctest::Approx(right.x).epsilon(1e-12));
    CHECK(mir.final_adjoint.lambda2 == doctest::Approx(right.y).epsilon(1e-12));
    CHECK(verify_tangentiality(p, mir) >= -1e-8);
}

TEST_CASE("approach from C violates ultimate tangentiality") {
    const PendulumParams p;
    const double w = std::sqrt(10.0);
    const TangencyPoint c = approach_tangency(p, {0.0, w}, {1e-6, w});
    const double r = verify_tangentiality(p, c);
    CHECK(r < -1e-8);
    CHECK(r == doctest::Approx(-3 * w).epsilon(1e-4));
    CHECK_FALSE(tangentiality_holds(c, r));
}

TEST_CASE("free-fall series stays on G0 with zero tension") {
    const PendulumParams p;
    const auto up = nonsmooth_endpoints(p, {0, 0})[0];
    for (double d : {1e-4, 1e-3, 1e-2}) {
        const ReducedState s = free_fall_approach(p, up, d);
        CHECK(s.theta1 < 0.0);
        // h = 0 along the arc for u in U, i.e. the series satisfies the free-fall ODE
        const double u = constrained_arc_control(p, s);
        const Vec2 f = dynamics(p, s, u);
        const double h = 1e-7;
        const ReducedState s2 = free_fall_approach(p, up, d - h);
        const ReducedState s1 = free_fall_approach(p, up, d + h);
        CHECK((s2.theta2 - s1.theta2) / (2 * h) == doctest::Approx(f.y).epsilon(1e-5).scale(1.0));
        CHECK(std::abs(u) < 1.0);
    }
}

TEST_CASE("spurious root scan") {
    const auto rep = reject_spurious_roots(PendulumParams{});
    CHECK(rep.sign_changes == 0);
    CHECK(rep.factored_root == doctest::Approx(kPi / 4));
    CHECK(rep.interval_lo == doctest::Approx(-kPi / 4));
    CHECK(rep.log.find("no spurious root") != std::string::npos);
    const auto big = reject_spurious_roots(PendulumParams{0.5, 0.1, 1, 10});
    CHECK(big.factored_root == doctest::Approx(0.197396).epsilon(1e-6));
    CHECK(big.sign_changes == 0);
}
