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

#include "tautset/tangency.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tautset/error.hpp"

namespace tautset {

const char* to_string(EndpointKind kind) {
    return kind == EndpointKind::Smooth ? "smooth" : "nonsmooth";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 as_vec(const Adjoint& a) { return {a.lambda1, a.lambda2}; }

TangencyPoint smooth_point(const PendulumParams& p, int k, int family_sign) {
    const double a = std::atan(p.M * p.g);
    TangencyPoint tp;
    tp.kind = EndpointKind::Smooth;
    tp.period_index = k;
    tp.family_sign = family_sign;
    tp.state = {-family_sign * a + kTwoPi * k, 0.0};
    // sin th1 has sign -family_sign here, so that is the differentiable branch
    const Vec2 grad = g_tilde_branch_gradient(p, tp.state, -family_sign);
    tp.final_adjoint = {grad.x, grad.y};
    // the limit of the constrained-arc value along G0 is +1 (resp. -1)
    const double u = family_sign > 0 ? 1.0 : -1.0;
    tp.final_control_set = {u, u, false};
    return tp;
}

}  // namespace

std::vector<TangencyPoint> smooth_endpoints(const PendulumParams& p, KRange k_range) {
    p.validate();
    std::vector<TangencyPoint> out;
    for (int k = k_range.lo; k <= k_range.hi; ++k) {
        out.push_back(smooth_point(p, k, +1));
        out.push_back(smooth_point(p, k, -1));
    }
    return out;
}

ReducedState free_fall_approach(const PendulumParams& p, const TangencyPoint& tp, double delta) {
    const double w = p.natural_rate();
    const double t = -delta;
    const double wt = w * t;
    const double wt2 = wt * wt;
    const double phi = wt * (1.0 + wt2 * (1.0 / 24.0 + wt2 * (3.0 / 640.0 + wt2 * 5.0 / 7168.0)));
    const double dphi = w * (1.0 + wt2 * (1.0 / 8.0 + wt2 * (15.0 / 640.0 + wt2 * 35.0 / 7168.0)));
    const double sign = tp.family_sign > 0 ? 1.0 : -1.0;
    return {kTwoPi * tp.period_index + sign * phi, sign * dphi};
}

TangencyPoint approach_tangency(const PendulumParams& p, const ReducedState& z,
                                const ReducedState& approach, int period_index) {
    TangencyPoint tp;
    tp.state = z;
    tp.kind = EndpointKind::NonSmooth;
    tp.period_index = period_index;
    const int side = std::sin(approach.theta1) >= 0.0 ? 1 : -1;
    const Vec2 grad = g_tilde_branch_gradient(p, z, side);
    tp.final_adjoint = {grad.x, grad.y};
    tp.final_control_set = control_set(p, approach);
    return tp;
}

std::vector<TangencyPoint> nonsmooth_endpoints(const PendulumParams& p, KRange k_range) {
    p.validate();
    constexpr double kApproachDelta = 1e-7;
    const double w = p.natural_rate();
    const PendulumSystem sys(p);

    std::vector<TangencyPoint> out;
    for (int k = k_range.lo; k <= k_range.hi; ++k) {
        TangencyPoint upper;
        upper.state = {kTwoPi * k, w};
        upper.period_index = k;
        upper.family_sign = +1;
        const ReducedState approach = free_fall_approach(p, upper, kApproachDelta);
        TangencyPoint tp = approach_tangency(p, upper.state, approach, k);
        tp.family_sign = +1;
        tp.approach_side = ApproachSide::B;
        out.push_back(tp);

        // (th1, th2, u) -> (-th1, -th2, -u) maps f to -f and leaves h invariant
        TangencyPoint mirror = tp;
        mirror.state = {kTwoPi * k, -w};
        mirror.family_sign = -1;
        mirror.final_adjoint = {-tp.final_adjoint.lambda1, -tp.final_adjoint.lambda2};
        mirror.final_control_set = {-tp.final_control_set.hi, -tp.final_control_set.lo, false};
        const double value = tangentiality_value(sys, mirror.state, as_vec(mirror.final_adjoint),
                                                 mirror.final_control_set);
        if (value < -kTangencyTolerance) {
            std::ostringstream os;
            os << "mirrored adjoint at (" << mirror.state.theta1 << ", " << mirror.state.theta2
               << ") violates ultimate tangentiality: " << value;
            throw Error(ErrorCode::SymmetryValidationFailed, os.str());
        }
        out.push_back(mirror);
    }
    return out;
}

std::vector<TangencyPoint> all_endpoints(const PendulumParams& p, KRange k_range) {
    std::vector<TangencyPoint> out = smooth_endpoints(p, k_range);
    const std::vector<TangencyPoint> ns = nonsmooth_endpoints(p, k_range);
    out.insert(out.end(), ns.begin(), ns.end());
    return out;
}

double tangentiality_value(const MixedConstrainedSystem& sys, const ReducedState& z,
                           const Vec2& grad, const ControlInterval& U) {
    auto at = [&](double u) {
        const Vec2 f = sys.vector_field(z, u);
        return grad.x * f.x + grad.y * f.y;
    };
    if (U.empty) return -INFINITY;
    return std::min(at(U.lo), at(U.hi));
}

double verify_tangentiality(const PendulumParams& p, const TangencyPoint& tp) {
    const PendulumSystem sys(p);
    const double v =
        tangentiality_value(sys, tp.state, as_vec(tp.final_adjoint), tp.final_control_set);
    return tp.kind == EndpointKind::Smooth ? std::abs(v) : v;
}

bool tangentiality_holds(const TangencyPoint& tp, double residual) {
    return tp.kind == EndpointKind::Smooth ? residual <= kTangencyTolerance
                                           : residual >= -kTangencyTolerance;
}

SpuriousRootReport reject_spurious_roots(const PendulumParams& p) {
    p.validate();
    SpuriousRootReport rep;
    rep.interval_lo = -std::atan(p.M * p.g);
    rep.interval_hi = 0.0;
    rep.factored_root = std::atan(1.0 / (p.M * p.g));

    // residual of min_{u in {1}} Dg~ f / theta2 on the theta1 < 0 branch of G0
    auto residual = [&](double th1) {
        const double s = std::sin(th1);
        const double c = std::cos(th1);
        const double w2 = (s + p.M * p.g * c) / (p.M * p.l);
        const double D = p.M + p.m * s * s;
        return (c - p.M * p.g * s) +
               2.0 * p.M * p.l * (c - (p.M + p.m) * p.g * s + p.m * p.l * w2 * c * s) / (p.l * D);
    };

    constexpr double kStep = 1e-4;
    const std::size_t n =
        static_cast<std::size_t>(std::ceil((rep.interval_hi - rep.interval_lo) / kStep));
    double prev = residual(rep.interval_lo);
    rep.min_abs_residual = std::abs(prev);
    std::ostringstream log;
    log << "# spurious-root scan of the smooth tangentiality condition\n";
    log << "params M=" << p.M << " m=" << p.m << " l=" << p.l << " g=" << p.g << "\n";
    log.precision(17);
    for (std::size_t i = 1; i < n; ++i) {
        const double th1 = rep.interval_lo + kStep * static_cast<double>(i);
        if (th1 >= rep.interval_hi) break;
        const double r = residual(th1);
        rep.min_abs_residual = std::min(rep.min_abs_residual, std::abs(r));
        if ((r > 0.0) != (prev > 0.0) || r == 0.0) {
            ++rep.sign_changes;
            log << "sign change near theta1=" << th1 << "\n";
        }
        prev = r;
    }
    rep.grid_points = n;
    const bool outside = rep.factored_root < rep.interval_lo || rep.factored_root >= rep.interval_hi;
    log << "interval [" << rep.interval_lo << ", " << rep.interval_hi << ")\n";
    log << "grid points " << rep.grid_points << " step " << kStep << "\n";
    log << "min |residual| " << rep.min_abs_residual << "\n";
    log << "sign changes " << rep.sign_changes << "\n";
    log << "factored root arctan(1/(Mg)) = " << rep.factored_root
        << (outside ? " (outside interval)" : " (INSIDE interval)") << "\n";
    log << "verdict " << (rep.sign_changes == 0 && outside ? "no spurious root" : "FAILED") << "\n";
    rep.log = log.str();

    if (rep.sign_changes != 0 || !outside) {
        throw Error(ErrorCode::SpuriousRootFound, rep.log);
    }
    return rep;
}

}  // namespace tautset
