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

#include "tautset/intersection.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <tuple>

#include "tautset/error.hpp"

namespace tautset {

namespace {

constexpr std::size_t kChunk = 32;

struct Box {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;

    void add(const ReducedState& s) {
        x0 = std::min(x0, s.theta1);
        x1 = std::max(x1, s.theta1);
        y0 = std::min(y0, s.theta2);
        y1 = std::max(y1, s.theta2);
    }
    bool overlaps(const Box& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
};

std::vector<Box> chunk_boxes(const BarrierArc& arc) {
    std::vector<Box> boxes;
    const std::size_t nseg = arc.samples.size() < 2 ? 0 : arc.samples.size() - 1;
    for (std::size_t c = 0; c * kChunk < nseg; ++c) {
        Box b;
        const std::size_t end = std::min(nseg, (c + 1) * kChunk);
        for (std::size_t k = c * kChunk; k <= end; ++k) b.add(arc.samples[k].state);
        boxes.push_back(b);
    }
    return boxes;
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Proper or touching crossing of segments pq and rs; returns parameters along each.
bool segment_hit(const ReducedState& p, const ReducedState& q, const ReducedState& r, const ReducedState& s,
                 double& alpha, double& beta) {
    const double dx1 = q.theta1 - p.theta1, dy1 = q.theta2 - p.theta2;
    const double dx2 = s.theta1 - r.theta1, dy2 = s.theta2 - r.theta2;
    const double den = cross(dx1, dy1, dx2, dy2);
    if (den == 0.0) return false;
    const double ex = r.theta1 - p.theta1, ey = r.theta2 - p.theta2;
    alpha = cross(ex, ey, dx2, dy2) / den;
    beta = cross(ex, ey, dx1, dy1) / den;
    return alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0;
}

struct RawHit {
    std::size_t seg_a, seg_b;
    double alpha, beta;
};

bool at_stopped_end(const BarrierArc& arc, std::size_t seg, double frac) {
    return arc.termination == Termination::StoppedAtIntersection && seg + 2 == arc.samples.size() &&
           frac >= 1.0 - 1e-9;
}

std::vector<RawHit> polyline_hits(const BarrierArc& a, const BarrierArc& b) {
    std::vector<RawHit> hits;
    const auto ba = chunk_boxes(a);
    const auto bb = chunk_boxes(b);
    const std::size_t na = a.samples.size() - 1, nb = b.samples.size() - 1;
    for (std::size_t ca = 0; ca < ba.size(); ++ca) {
        for (std::size_t cb = 0; cb < bb.size(); ++cb) {
            if (!ba[ca].overlaps(bb[cb])) continue;
            for (std::size_t i = ca * kChunk; i < std::min(na, (ca + 1) * kChunk); ++i) {
                for (std::size_t j = cb * kChunk; j < std::min(nb, (cb + 1) * kChunk); ++j) {
                    double al, be;
                    if (!segment_hit(a.samples[i].state, a.samples[i + 1].state, b.samples[j].state,
                                     b.samples[j + 1].state, al, be)) {
                        continue;
                    }
                    if (at_stopped_end(a, i, al) || at_stopped_end(b, j, be)) continue;
                    hits.push_back({i, j, al, be});
                }
            }
        }
    }
    return hits;
}

struct Refined {
    ReducedState location;
    double t_a, t_b;
    ControlMode mode_a, mode_b;
};

// Newton on the backward offsets from the segment starts.
Refined refine(const PendulumParams& p, const BarrierArc& a, const BarrierArc& b, const RawHit& h) {
    const ArcSample& sa = a.samples[h.seg_a];
    const ArcSample& sb = b.samples[h.seg_b];
    const double da = sa.t - a.samples[h.seg_a + 1].t;
    const double db = sb.t - b.samples[h.seg_b + 1].t;
    double ta = h.alpha * da, tb = h.beta * db;
    ReducedState xa{}, xb{};
    bool ok = false;
    for (int it = 0; it < 30; ++it) {
        xa = advance_state(p, sa.state, sa.mode, ta);
        xb = advance_state(p, sb.state, sb.mode, tb);
        const double rx = xa.theta1 - xb.theta1, ry = xa.theta2 - xb.theta2;
        if (std::hypot(rx, ry) < 1e-13) {
            ok = true;
            break;
        }
        const Vec2 fa = dynamics(p, xa, branch_control(p, xa, sa.mode));
        const Vec2 fb = dynamics(p, xb, branch_control(p, xb, sb.mode));
        // d xa / d ta = -fa, d xb / d tb = -fb
        const double j11 = -fa.x, j12 = fb.x, j21 = -fa.y, j22 = fb.y;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        ta -= (j22 * rx - j12 * ry) / det;
        tb -= (-j21 * rx + j11 * ry) / det;
    }
    const double slack = 1e-6;
    if (!ok || ta < -slack * da || ta > (1 + slack) * da || tb < -slack * db || tb > (1 + slack) * db) {
        // keep the polyline estimate
        ta = h.alpha * da;
        tb = h.beta * db;
        xa = advance_state(p, sa.state, sa.mode, ta);
        xb = advance_state(p, sb.state, sb.mode, tb);
        spdlog::warn("intersection refinement did not converge between arcs {} and {}", a.id, b.id);
    }
    return {{0.5 * (xa.theta1 + xb.theta1), 0.5 * (xa.theta2 + xb.theta2)}, sa.t - ta, sb.t - tb, sa.mode, sb.mode};
}

}  // namespace

std::vector<StoppingPoint> find_stopping_points(const PendulumParams& p, const std::vector<BarrierArc>& arcs) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        for (std::size_t j = i + 1; j < arcs.size(); ++j) {
            if (arcs[i].samples.size() < 2 || arcs[j].samples.size() < 2) continue;
            pairs.emplace_back(i, j);
        }
    }

    std::vector<std::future<std::vector<StoppingPoint>>> jobs;
    for (const auto& [i, j] : pairs) {
        jobs.push_back(std::async(std::launch::async, [&p, &arcs, i = i, j = j] {
            std::vector<StoppingPoint> out;
            const BarrierArc& a = arcs[i];
            const BarrierArc& b = arcs[j];
            for (const RawHit& h : polyline_hits(a, b)) {
                const Refined r = refine(p, a, b, h);
                StoppingPoint sp;
                sp.location = r.location;
                sp.arc_a = a.id;
                sp.arc_b = b.id;
                sp.t_a = r.t_a;
                sp.t_b = r.t_b;
                const Vec2 fa = dynamics(p, r.location, branch_control(p, r.location, r.mode_a));
                const Vec2 fb = dynamics(p, r.location, branch_control(p, r.location, r.mode_b));
                const double na = std::hypot(fa.x, fa.y), nb = std::hypot(fb.x, fb.y);
                sp.determinant = (na > 0 && nb > 0) ? (fa.x * fb.y - fa.y * fb.x) / (na * nb) : 0.0;
                sp.transversal = std::abs(sp.determinant) > kTransversalityThreshold;
                bool dup = false;
                for (const StoppingPoint& o : out) {
                    if (std::hypot(o.location.theta1 - sp.location.theta1, o.location.theta2 - sp.location.theta2) <
                        1e-9) {
                        dup = true;
                    }
                }
                if (!dup) out.push_back(sp);
            }
            return out;
        }));
    }
    std::vector<StoppingPoint> all;
    for (auto& j : jobs) {
        auto part = j.get();
        all.insert(all.end(), part.begin(), part.end());
    }

    // accept crossings in order of the backward time needed to reach them
    std::stable_sort(all.begin(), all.end(), [](const StoppingPoint& x, const StoppingPoint& y) {
        return std::max(-x.t_a, -x.t_b) < std::max(-y.t_a, -y.t_b);
    });
    std::map<int, double> cut;
    std::vector<StoppingPoint> kept;
    for (const StoppingPoint& sp : all) {
        if (!sp.transversal) {
            spdlog::info("tangential crossing of arcs {} and {} at ({}, {}) ignored (det {})", sp.arc_a, sp.arc_b,
                         sp.location.theta1, sp.location.theta2, sp.determinant);
            kept.push_back(sp);
            continue;
        }
        auto alive = [&](int id, double t) {
            auto it = cut.find(id);
            return it == cut.end() || t >= it->second;
        };
        if (!alive(sp.arc_a, sp.t_a) || !alive(sp.arc_b, sp.t_b)) continue;
        cut[sp.arc_a] = std::max(cut.count(sp.arc_a) ? cut[sp.arc_a] : -INFINITY, sp.t_a);
        cut[sp.arc_b] = std::max(cut.count(sp.arc_b) ? cut[sp.arc_b] : -INFINITY, sp.t_b);
        kept.push_back(sp);
    }
    std::sort(kept.begin(), kept.end(), [](const StoppingPoint& x, const StoppingPoint& y) {
        return std::tie(x.location.theta1, x.location.theta2) < std::tie(y.location.theta1, y.location.theta2);
    });
    return kept;
}

std::vector<BarrierArc> truncate_at_stopping_points(const PendulumParams& p, std::vector<BarrierArc> arcs,
                                                    const std::vector<StoppingPoint>& sps) {
    for (BarrierArc& arc : arcs) {
        double t_stop = -INFINITY;
        for (const StoppingPoint& sp : sps) {
            if (!sp.transversal) continue;
            if (sp.arc_a == arc.id) t_stop = std::max(t_stop, sp.t_a);
            if (sp.arc_b == arc.id) t_stop = std::max(t_stop, sp.t_b);
        }
        if (t_stop == -INFINITY || arc.samples.empty()) continue;
        if (arc.termination == Termination::StoppedAtIntersection && arc.samples.back().t == t_stop) continue;

        std::size_t keep = 0;
        while (keep < arc.samples.size() && arc.samples[keep].t > t_stop) ++keep;
        if (keep == 0) continue;
        const ArcSample& from = arc.samples[keep - 1];
        ArcSample end = advance_sample(p, from, from.t - t_stop);
        end.t = t_stop;
        arc.samples.resize(keep);
        if (arc.samples.back().t != t_stop) arc.samples.push_back(end);
        std::erase_if(arc.events, [&](const ArcEvent& e) { return e.t < t_stop; });
        arc.termination = Termination::StoppedAtIntersection;
    }
    return arcs;
}

}  // namespace tautset
