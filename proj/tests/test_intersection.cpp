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

#include "tautset/intersection.hpp"
#include "tautset/tangency.hpp"

using namespace tautset;

namespace {

const PendulumParams kSmallCart{0.1, 0.1, 1.0, 10.0};
const PendulumParams kBigCart{0.5, 0.1, 1.0, 10.0};

std::vector<BarrierArc> arcs_for(const PendulumParams& p, const IntegratorOptions& opts) {
    return integrate_arcs(p, all_endpoints(p, {-1, 1}), opts);
}

// distance from x to the sampled polyline
double polyline_distance(const BarrierArc& arc, const ReducedState& x) {
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < arc.samples.size(); ++i) {
        const auto& a = arc.samples[i].state;
        const auto& b = arc.samples[i + 1].state;
        const double dx = b.theta1 - a.theta1, dy = b.theta2 - a.theta2;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0 ? ((x.theta1 - a.theta1) * dx + (x.theta2 - a.theta2) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::hypot(a.theta1 + t * dx - x.theta1, a.theta2 + t * dy - x.theta2));
    }
    return best;
}

}  // namespace

TEST_CASE("small cart mass: transversal stopping points in mirror pairs") {
    const PendulumParams p = kSmallCart;
    const auto arcs = arcs_for(p, default_integrator_options(p));
    const auto sps = find_stopping_points(p, arcs);
    REQUIRE(sps.size() >= 2);
    int in_period = 0;
    for (const auto& sp : sps) {
        CHECK(sp.transversal);
        CHECK(std::abs(sp.determinant) > kTransversalityThreshold);
        CHECK(sp.arc_a != sp.arc_b);
        CHECK(sp.t_a < 0.0);
        CHECK(sp.t_b < 0.0);
        // lies on both sampled arcs up to chord error
        CHECK(polyline_distance(arcs[sp.arc_a], sp.location) < 1e-5);
        CHECK(polyline_distance(arcs[sp.arc_b], sp.location) < 1e-5);
        // inside the constraint region
        CHECK(g_tilde(p, sp.location) < 0.0);
        if (sp.location.theta1 >= -std::numbers::pi && sp.location.theta1 < std::numbers::pi) ++in_period;
        bool mirrored = false;
        for (const auto& other : sps) {
            mirrored = mirrored || (std::abs(other.location.theta1 + sp.location.theta1) < 1e-8 &&
                                    std::abs(other.location.theta2 + sp.location.theta2) < 1e-8);
        }
        CHECK(mirrored);
    }
    CHECK(in_period >= 1);
    bool seen = false;
    for (const auto& sp : sps) {
        seen = seen || (std::abs(sp.location.theta1 + 2.149674) < 1e-5 && std::abs(sp.location.theta2 - 5.904117) < 1e-5);
    }
    CHECK(seen);
}

TEST_CASE("big cart mass: no intersections") {
    const PendulumParams p = kBigCart;
    CHECK(find_stopping_points(p, arcs_for(p, default_integrator_options(p))).empty());
}

TEST_CASE("an arc does not stop against a copy of itself") {
    const PendulumParams p = kSmallCart;
    const auto arcs = arcs_for(p, default_integrator_options(p));
    std::vector<BarrierArc> twins{arcs[2], arcs[2]};
    twins[0].id = 0;
    twins[1].id = 1;
    for (const auto& sp : find_stopping_points(p, twins)) CHECK_FALSE(sp.transversal);
}

TEST_CASE("truncation ends both arcs at the stopping point and is idempotent") {
    const PendulumParams p = kSmallCart;
    const auto arcs = arcs_for(p, default_integrator_options(p));
    const auto sps = find_stopping_points(p, arcs);
    REQUIRE_FALSE(sps.empty());
    const auto cut = truncate_at_stopping_points(p, arcs, sps);
    REQUIRE(cut.size() == arcs.size());
    for (const auto& sp : sps) {
        for (const int id : {sp.arc_a, sp.arc_b}) {
            const auto& arc = cut[static_cast<std::size_t>(id)];
            CHECK(arc.termination == Termination::StoppedAtIntersection);
            const auto& end = arc.samples.back();
            CHECK(std::abs(end.state.theta1 - sp.location.theta1) < 1e-8);
            CHECK(std::abs(end.state.theta2 - sp.location.theta2) < 1e-8);
            CHECK(hamiltonian_drift(arc) < 1e-6);
            for (const auto& e : arc.events) CHECK(e.t >= end.t);
        }
    }
    const auto again = truncate_at_stopping_points(p, cut, sps);
    for (std::size_t i = 0; i < cut.size(); ++i) {
        REQUIRE(again[i].samples.size() == cut[i].samples.size());
        CHECK(again[i].samples.back().t == cut[i].samples.back().t);
        CHECK(again[i].events.size() == cut[i].events.size());
    }
    CHECK(find_stopping_points(p, cut).empty());
}

TEST_CASE("stopping points are stable under tolerance refinement") {
    const PendulumParams p = kSmallCart;
    const auto base = find_stopping_points(p, arcs_for(p, default_integrator_options(p)));
    IntegratorOptions fine = default_integrator_options(p);
    fine.atol /= 2;
    fine.rtol /= 2;
    const auto refined = find_stopping_points(p, arcs_for(p, fine));
    REQUIRE(base.size() == refined.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(std::abs(base[i].location.theta1 - refined[i].location.theta1) < 1e-5);
        CHECK(std::abs(base[i].location.theta2 - refined[i].location.theta2) < 1e-5);
    }
}
