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
#include <random>

#include "tautset/error.hpp"
#include "tautset/model.hpp"

using namespace tautset;

namespace {

constexpr double kPi = std::numbers::pi;

// Cart-pole Lagrangian written as M(q) qdd = b; solved by Cramer's rule.
// Returns (xdd, thdd).
std::pair<double, double> lagrangian_accel(const PendulumParams& p, const ReducedState& s, double u) {
    const double sn = std::sin(s.theta1), cs = std::cos(s.theta1);
    const double a11 = p.M + p.m, a12 = p.m * p.l * cs;
    const double a21 = p.m * p.l * cs, a22 = p.m * p.l * p.l;
    const double b1 = u + p.m * p.l * s.theta2 * s.theta2 * sn;
    const double b2 = p.m * p.g * p.l * sn;
    const double det = a11 * a22 - a12 * a21;
    return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
}

// Cable tension from Newton's law on the bob.
double bob_tension(const PendulumParams& p, const ReducedState& s, double u) {
    const auto [xdd, thdd] = lagrangian_accel(p, s, u);
    (void)thdd;
    return -p.m * (xdd * std::sin(s.theta1) - p.l * s.theta2 * s.theta2 + p.g * std::cos(s.theta1));
}

struct Sampler {
    std::mt19937_64 rng{20260517};
    double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    ReducedState state() { return {uni(-2 * kPi, 2 * kPi), uni(-10, 10)}; }
    PendulumParams params() { return {uni(0.05, 2.0), uni(0.05, 2.0), uni(0.3, 3.0), uni(1.0, 20.0)}; }
};

}  // namespace

TEST_CASE("dynamics matches the Lagrangian mass-matrix solve") {
    Sampler r;
    for (int i = 0; i < 1000; ++i) {
        const PendulumParams p = r.params();
        const ReducedState s = r.state();
        const double u = r.uni(-1, 1);
        const Vec2 f = dynamics(p, s, u);
        const auto [xdd, thdd] = lagrangian_accel(p, s, u);
        CHECK(f.x == s.theta2);
        CHECK(f.y == doctest::Approx(thdd).epsilon(1e-12));
        const FullState q{s.theta1, s.theta2, 0.3, -0.7};
        const FullState dq = full_dynamics(p, q, u);
        CHECK(dq.x1 == -0.7);
        CHECK(dq.x2 == doctest::Approx(xdd).epsilon(1e-12));
    }
}

TEST_CASE("dynamics worked values") {
    const PendulumParams p;
    Vec2 f = dynamics(p, {0.0, std::sqrt(10.0)}, -1.0);
    CHECK(f.x == doctest::Approx(3.16228).epsilon(1e-6));
    CHECK(f.y == doctest::Approx(10.0).epsilon(1e-12));
    const PendulumParams big{0.5, 0.1, 1.0, 10.0};
    f = dynamics(big, {kPi / 2, 0.0}, 1.0);
    CHECK(f.x == 0.0);
    CHECK(f.y == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("jacobian structure and finite differences") {
    Sampler r;
    for (const PendulumParams p : {PendulumParams{}, PendulumParams{0.5, 0.1, 1, 10}}) {
        const Mat2 J = dynamics_jacobian(p, {0.0, 0.0}, 0.0);
        CHECK(J.a21 == doctest::Approx((p.M + p.m) * p.g / (p.l * p.M)).epsilon(1e-14));
    }
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const PendulumParams p = r.params();
        const ReducedState s = r.state();
        const double u = r.uni(-1, 1);
        const Mat2 J = dynamics_jacobian(p, s, u);
        CHECK(J.a11 == 0.0);
        CHECK(J.a12 == 1.0);
        const double h = 1e-6;
        const double d21 =
            (dynamics(p, {s.theta1 + h, s.theta2}, u).y - dynamics(p, {s.theta1 - h, s.theta2}, u).y) / (2 * h);
        const double d22 =
            (dynamics(p, {s.theta1, s.theta2 + h}, u).y - dynamics(p, {s.theta1, s.theta2 - h}, u).y) / (2 * h);
        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
        if (rel(J.a21, d21) > 1e-6 || rel(J.a22, d22) > 1e-6) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("mixed constraint and envelope") {
    const PendulumParams p;
    CHECK(mixed_constraint(p, {0.0, std::sqrt(10.0)}, 0.37) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mixed_constraint(p, {kPi / 2, 0.0}, 1.0) == doctest::Approx(1.0));
    CHECK(mixed_constraint(p, {kPi, 0.0}, 0.0) == doctest::Approx(-1.0));
    CHECK(g_tilde(p, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(std::abs(g_tilde(p, {kPi / 4, 0.0})) < 1e-15);
    CHECK(std::abs(g_tilde(p, {0.0, std::sqrt(10.0)})) < 1e-14);

    Sampler r;
    for (int i = 0; i < 10000; ++i) {
        const PendulumParams q = r.params();
        const ReducedState s = r.state();
        const double lo = std::min(mixed_constraint(q, s, -1.0), mixed_constraint(q, s, 1.0));
        REQUIRE(g_tilde(q, s) == doctest::Approx(lo).epsilon(1e-12));
        const Vec2 gr = mixed_constraint_gradient(q, s, 0.4);
        const double hh = 1e-6;
        CHECK(gr.x == doctest::Approx((mixed_constraint(q, {s.theta1 + hh, s.theta2}, 0.4) -
                                       mixed_constraint(q, {s.theta1 - hh, s.theta2}, 0.4)) / (2 * hh))
                          .epsilon(1e-5));
    }
}

TEST_CASE("control set cases") {
    const PendulumParams p;
    ControlInterval U = control_set(p, {0.0, 4.0});
    CHECK(U.lo == -1.0);
    CHECK(U.hi == 1.0);
    U = control_set(p, {-std::atan(1.0), 0.0});
    REQUIRE(!U.empty);
    CHECK(U.lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(U.hi == doctest::Approx(1.0).epsilon(1e-12));
    U = control_set(p, {kPi / 2, 2.0});
    CHECK(U.lo == -1.0);
    CHECK(U.hi == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(control_set(p, {0.0, 0.0}).empty);

    Sampler r;
    for (int i = 0; i < 10000; ++i) {
        const PendulumParams q = r.params();
        const ReducedState s = r.state();
        const ControlInterval V = control_set(q, s);
        REQUIRE(V.empty == (g_tilde(q, s) > 1e-14));
        if (!V.empty) {
            // every member keeps the cable taut; just outside it does not
            CHECK(mixed_constraint(q, s, V.lo) <= 1e-12 * (1 + q.M * q.g + q.M * q.l * s.theta2 * s.theta2));
            CHECK(mixed_constraint(q, s, V.hi) <= 1e-12 * (1 + q.M * q.g + q.M * q.l * s.theta2 * s.theta2));
        }
    }
}

TEST_CASE("tension identity and independent bob balance") {
    const PendulumParams p;
    CHECK(tension(p, {kPi, 0.0}, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(tension(p, {-std::atan(1.0), 0.0}, 1.0)) < 1e-15);

    Sampler r;
    for (int i = 0; i < 1000; ++i) {
        const PendulumParams q = r.params();
        const ReducedState s = r.state();
        const double u = r.uni(-1, 1);
        const double T = tension(q, s, u);
        CHECK(T == doctest::Approx(bob_tension(q, s, u)).epsilon(1e-9).scale(1.0));
        if (std::abs(std::cos(s.theta1)) > 1e-2) {
            CHECK(T == doctest::Approx(tension_from_vertical_balance(q, s, u)).epsilon(1e-9).scale(1.0));
        }
        const double h = mixed_constraint(q, s, u);
        if (h != 0.0) CHECK((h < 0.0) == (T > 0.0));
    }
    CHECK_THROWS_AS(tension_from_vertical_balance(p, {kPi / 2, 1.0}, 0.0), Error);
}

TEST_CASE("hamiltonian is affine in u with the documented slope") {
    Sampler r;
    for (int i = 0; i < 1000; ++i) {
        const PendulumParams p = r.params();
        const ReducedState s = r.state();
        const Adjoint a{r.uni(-3, 3), r.uni(-3, 3)};
        const double h0 = hamiltonian(p, s, a, 0.0);
        const double hp = hamiltonian(p, s, a, 1.0);
        const double hm = hamiltonian(p, s, a, -1.0);
        const double slope = -a.lambda2 * std::cos(s.theta1) /
                             (p.l * (p.M + p.m * std::sin(s.theta1) * std::sin(s.theta1)));
        const double scale = 1.0 + std::abs(h0) + std::abs(slope);
        CHECK(std::abs((hp - h0) - slope) < 1e-12 * scale);
        CHECK(std::abs((h0 - hm) - slope) < 1e-12 * scale);
        CHECK(hamiltonian(p, s, {0.0, 0.0}, 0.3) == 0.0);
    }
    const PendulumParams p;
    CHECK(hamiltonian(p, {-std::atan(1.0), 0.0}, {std::sqrt(2.0), 0.0}, 1.0) == 0.0);
}

TEST_CASE("hamiltonian minimization against an exhaustive scan") {
    const PendulumParams p;
    HamiltonianMinimum hm = minimize_hamiltonian(p, {0.3, 4.0}, {0.0, -1.0});
    CHECK(hm.u == -1.0);
    CHECK(hm.mode == ControlMode::BangMinus);
    hm = minimize_hamiltonian(p, {-1.0, 4.0}, {0.0, 1.0});
    CHECK(hm.u == 1.0);
    CHECK(hm.mode == ControlMode::BangPlus);
    hm = minimize_hamiltonian(p, {kPi / 2, 2.0}, {0.0, 1e-3});
    CHECK(hm.u == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(hm.mode == ControlMode::Constrained);
    CHECK_THROWS_AS(minimize_hamiltonian(p, {0.0, 0.0}, {1.0, 1.0}), Error);

    Sampler r;
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const PendulumParams q = r.params();
        const ReducedState s = r.state();
        const ControlInterval U = control_set(q, s);
        if (U.empty) continue;
        const Adjoint a{r.uni(-3, 3), r.uni(-3, 3)};
        const HamiltonianMinimum best = minimize_hamiltonian(q, s, a);
        REQUIRE(U.contains(best.u, 1e-12));
        double scan = INFINITY;
        for (double u = U.lo; u <= U.hi; u += 1e-4) scan = std::min(scan, hamiltonian(q, s, a, u));
        scan = std::min(scan, hamiltonian(q, s, a, U.hi));
        CHECK(scan >= best.value - 1e-9);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("tie keeps the previous branch") {
    const PendulumParams p;
    const ReducedState s{-std::atan(1.0), 0.0};
    HamiltonianMinimum hm = minimize_hamiltonian(p, s, {std::sqrt(2.0), 0.0}, ControlMode::BangPlus);
    CHECK(hm.u == doctest::Approx(1.0).epsilon(1e-12));
    hm = minimize_hamiltonian(p, {2.0, 1.0}, {1.0, 0.0});
    CHECK(hm.mode == ControlMode::Tie);
    hm = minimize_hamiltonian(p, {2.0, 1.0}, {1.0, 0.0}, ControlMode::BangMinus);
    CHECK(hm.u == -1.0);
}

TEST_CASE("multiplier") {
    const PendulumParams p;
    CHECK(multiplier(p, {kPi, 0.0}, {1.0, 1.0}, 0.0) == 0.0);
    const ReducedState s{kPi / 2, 2.0};
    const double u = constrained_arc_control(p, s);
    CHECK(multiplier(p, s, {1.0, 0.0}, u) == 0.0);
    const double mu = multiplier(p, {1.0, 2.0}, {0.0, 1.0}, constrained_arc_control(p, {1.0, 2.0}));
    const double D = p.M + p.m * std::sin(1.0) * std::sin(1.0);
    CHECK(mu == doctest::Approx(std::cos(1.0) / std::sin(1.0) / (p.l * D)).epsilon(1e-13));
    CHECK_THROWS_AS(constrained_arc_control(p, {0.0, 1.0}), Error);
}

TEST_CASE("periodicity") {
    Sampler r;
    for (int i = 0; i < 1000; ++i) {
        const PendulumParams p = r.params();
        const ReducedState s = r.state();
        const ReducedState t{s.theta1 + 2 * kPi, s.theta2};
        const double u = r.uni(-1, 1);
        CHECK(dynamics(p, t, u).y == doctest::Approx(dynamics(p, s, u).y).epsilon(1e-9).scale(1.0));
        CHECK(g_tilde(p, t) == doctest::Approx(g_tilde(p, s)).epsilon(1e-9).scale(1.0));
        CHECK(tension(p, t, u) == doctest::Approx(tension(p, s, u)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((PendulumParams{0.0, 0.1, 1, 10}.validate()), Error);
    CHECK_THROWS_AS((PendulumParams{0.1, 0.1, -1, 10}.validate()), Error);
    CHECK_NOTHROW(PendulumParams{}.validate());
}
