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

#include "tautset/setassembly.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tautset/error.hpp"

namespace tautset {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Interior: return "Interior";
        case Verdict::Boundary: return "Boundary";
        case Verdict::Inadmissible: return "Inadmissible";
        case Verdict::OutsideG: return "OutsideG";
    }
    return "?";
}

AssemblyOptions default_assembly_options(const PendulumParams& p) {
    AssemblyOptions o;
    o.window = default_window(p);
    return o;
}

std::size_t AdmissibleSetModel::bounded_components() const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(), [](const Component& c) { return c.bounded; }));
}

Vec2 barrier_normal(const ArcSample& s) {
    const double n = s.adjoint.norm();
    if (!(n > 0.0)) return {0.0, 0.0};
    return {s.adjoint.lambda1 / n, s.adjoint.lambda2 / n};
}

// ---- segment index ------------------------------------------------------------

class SegmentIndex {
public:
    explicit SegmentIndex(const std::vector<BoundaryCurve>& curves, double cell = 0.05) : cell_(cell) {
        for (const BoundaryCurve& c : curves) {
            for (std::size_t k = 0; k + 1 < c.points.size(); ++k) {
                const std::size_t id = segs_.size();
                segs_.push_back({c.points[k], c.points[k + 1]});
                const Seg& s = segs_.back();
                const long ix0 = key(std::min(s.a.theta1, s.b.theta1)), ix1 = key(std::max(s.a.theta1, s.b.theta1));
                const long iy0 = key(std::min(s.a.theta2, s.b.theta2)), iy1 = key(std::max(s.a.theta2, s.b.theta2));
                for (long ix = ix0; ix <= ix1; ++ix) {
                    for (long iy = iy0; iy <= iy1; ++iy) buckets_[pack(ix, iy)].push_back(id);
                }
            }
        }
    }

    /// Distance to the nearest segment, or `radius` when none is closer.
    double distance(const ReducedState& q, double radius) const {
        double best = radius;
        const long ix0 = key(q.theta1 - radius), ix1 = key(q.theta1 + radius);
        const long iy0 = key(q.theta2 - radius), iy1 = key(q.theta2 + radius);
        for (long ix = ix0; ix <= ix1; ++ix) {
            for (long iy = iy0; iy <= iy1; ++iy) {
                auto it = buckets_.find(pack(ix, iy));
                if (it == buckets_.end()) continue;
                for (std::size_t id : it->second) best = std::min(best, seg_distance(segs_[id], q));
            }
        }
        return best;
    }

private:
    struct Seg {
        ReducedState a, b;
    };

    long key(double v) const { return static_cast<long>(std::floor(v / cell_)); }
    static std::int64_t pack(long ix, long iy) { return (static_cast<std::int64_t>(ix) << 32) ^ (iy & 0xffffffffL); }

    static double seg_distance(const Seg& s, const ReducedState& q) {
        const double dx = s.b.theta1 - s.a.theta1, dy = s.b.theta2 - s.a.theta2;
        const double len2 = dx * dx + dy * dy;
        double w = len2 > 0.0 ? ((q.theta1 - s.a.theta1) * dx + (q.theta2 - s.a.theta2) * dy) / len2 : 0.0;
        w = std::clamp(w, 0.0, 1.0);
        return std::hypot(q.theta1 - s.a.theta1 - w * dx, q.theta2 - s.a.theta2 - w * dy);
    }

    double cell_;
    std::vector<Seg> segs_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

namespace {

// ---- G0 lenses --------------------------------------------------------------------
// Lens k is the closed curve G0 around theta1 = 2 k pi. The parameter sigma runs
// clockwise: [0, 1] is the upper branch from the left tip, [1, 2) the lower one.

struct Lens {
    const PendulumParams& p;
    double a;

    explicit Lens(const PendulumParams& pp) : p(pp), a(std::atan(pp.M * pp.g)) {}

    ReducedState point(int k, double sigma) const {
        sigma = std::fmod(sigma, 2.0);
        if (sigma < 0.0) sigma += 2.0;
        const double c = kTwoPi * k;
        double th1, sgn;
        if (sigma <= 1.0) {
            th1 = c - a * std::cos(std::numbers::pi * sigma);
            sgn = 1.0;
        } else {
            th1 = c + a * std::cos(std::numbers::pi * (sigma - 1.0));
            sgn = -1.0;
        }
        if (sigma == 0.5) th1 = c;
        if (sigma == 1.5) th1 = c;
        const double G = p.M * p.g * std::cos(th1 - c) - std::abs(std::sin(th1 - c));
        return {th1, sgn * std::sqrt(std::max(0.0, G / (p.M * p.l)))};
    }

    double sigma(int k, const ReducedState& s) const {
        const double rel = std::clamp((s.theta1 - kTwoPi * k) / a, -1.0, 1.0);
        if (s.theta2 >= 0.0) return std::acos(-rel) / std::numbers::pi;
        double sg = 1.0 + std::acos(rel) / std::numbers::pi;
        return sg >= 2.0 ? 0.0 : sg;
    }

    // Points strictly between sigma0 and sigma1 (sigma1 > sigma0), chord-limited.
    void fill(int k, double s0, double s1, double chord, std::vector<ReducedState>& out, int depth = 0) const {
        const ReducedState a0 = point(k, s0), a1 = point(k, s1);
        if (depth >= 4 && (std::hypot(a1.theta1 - a0.theta1, a1.theta2 - a0.theta2) < chord || depth > 30)) return;
        const double sm = 0.5 * (s0 + s1);
        fill(k, s0, sm, chord, out, depth + 1);
        out.push_back(point(k, sm));
        fill(k, sm, s1, chord, out, depth + 1);
    }

    std::vector<ReducedState> loop(int k, double chord) const {
        std::vector<ReducedState> pts{point(k, 0.0)};
        fill(k, 0.0, 2.0, chord, pts);
        pts.push_back(point(k, 0.0));
        return pts;
    }
};

double signed_area(const std::vector<ReducedState>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const ReducedState& a = poly[i];
        const ReducedState& b = poly[(i + 1) % poly.size()];
        s += a.theta1 * b.theta2 - b.theta1 * a.theta2;
    }
    return 0.5 * s;
}

bool inside_polygon(const InadmissibleCell& c, const ReducedState& q) {
    if (q.theta1 < c.theta1_min || q.theta1 > c.theta1_max || q.theta2 < c.theta2_min || q.theta2 > c.theta2_max) {
        return false;
    }
    bool in = false;
    const auto& P = c.polygon;
    for (std::size_t i = 0, j = P.size() - 1; i < P.size(); j = i++) {
        if ((P[i].theta2 > q.theta2) != (P[j].theta2 > q.theta2)) {
            const double x = P[j].theta1 + (q.theta2 - P[j].theta2) * (P[i].theta1 - P[j].theta1) /
                                               (P[i].theta2 - P[j].theta2);
            if (q.theta1 < x) in = !in;
        }
    }
    return in;
}

enum class End { Start, Finish };

struct LensNode {
    double sigma;
    int arc;
    End end;
};

struct ArcTopology {
    bool backward = true;  ///< traversed from the end point toward earlier times with A^C on the left
    int start_lens = 0;
    double start_sigma = 0.0;
    enum class Kind { Open, Stopping, Landing } end_kind = Kind::Open;
    int partner = -1;
    int end_lens = 0;
    double end_sigma = 0.0;
};

double reduce_angle(double th) {
    double r = std::fmod(th + std::numbers::pi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r - std::numbers::pi;
}

struct Classifier {
    const AdmissibleSetModel& m;

    MembershipVerdict operator()(const ReducedState& s, double radius) const {
        const PendulumParams& p = m.params;
        radius = std::max(radius, 2.0 * kBoundaryTolerance);
        MembershipVerdict v;
        const double gt = g_tilde(p, s);
        const double r = reduce_angle(s.theta1);
        double dist = radius;
        if (m.index) {
            for (int j = -1; j <= 1; ++j) dist = std::min(dist, m.index->distance({r + kTwoPi * j, s.theta2}, radius));
        }
        // distance to G0 from the local linearization
        const int side = std::sin(s.theta1) >= 0.0 ? 1 : -1;
        const Vec2 gr = g_tilde_branch_gradient(p, s, side);
        const double gn = std::hypot(gr.x, gr.y);
        const double g0_dist = gn > 0.0 ? std::abs(gt) / gn : INFINITY;
        v.distance_estimate = std::min(dist, g0_dist);
        if (gt > kOutsideTolerance) {
            v.tag = Verdict::OutsideG;
            return v;
        }
        if (dist <= kBoundaryTolerance || g0_dist <= kBoundaryTolerance) {
            v.tag = Verdict::Boundary;
            return v;
        }
        for (const InadmissibleCell& c : m.cells) {
            for (int j = -2; j <= 2; ++j) {
                if (inside_polygon(c, {r + kTwoPi * j, s.theta2})) {
                    v.tag = Verdict::Inadmissible;
                    return v;
                }
            }
        }
        v.tag = Verdict::Interior;
        return v;
    }
};

void label_components(AdmissibleSetModel& m, const AssemblyOptions& opts) {
    const int n1 = opts.grid_theta1, n2 = opts.grid_theta2;
    m.grid_theta1 = n1;
    m.grid_theta2 = n2;
    const double W = m.window.theta2_abs_max;
    const double d1 = kTwoPi / n1, d2 = 2.0 * W / n2;
    std::vector<char> interior(static_cast<std::size_t>(n1) * n2, 0);
    const Classifier cls{m};
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const ReducedState s{-std::numbers::pi + (i + 0.5) * d1, -W + (j + 0.5) * d2};
            interior[static_cast<std::size_t>(j) * n1 + i] = cls(s, kBoundaryTolerance).tag == Verdict::Interior;
        }
    }
    m.grid_labels.assign(interior.size(), -1);
    std::vector<int> lift(interior.size(), 0);
    m.components.clear();
    for (std::size_t start = 0; start < interior.size(); ++start) {
        if (!interior[start] || m.grid_labels[start] >= 0) continue;
        Component comp;
        comp.id = static_cast<int>(m.components.size());
        bool unbounded = false;
        std::deque<std::size_t> queue{start};
        m.grid_labels[start] = comp.id;
        lift[start] = 0;
        while (!queue.empty()) {
            const std::size_t c = queue.front();
            queue.pop_front();
            ++comp.grid_cells;
            const int i = static_cast<int>(c % n1), j = static_cast<int>(c / n1);
            if (j == 0 || j == n2 - 1) unbounded = true;
            const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& d : nbr) {
                int ni = i + d[0];
                const int nj = j + d[1];
                if (nj < 0 || nj >= n2) continue;
                int nl = lift[c];
                if (ni < 0) {
                    ni += n1;
                    nl -= 1;
                } else if (ni >= n1) {
                    ni -= n1;
                    nl += 1;
                }
                const std::size_t nc = static_cast<std::size_t>(nj) * n1 + ni;
                if (!interior[nc]) continue;
                if (m.grid_labels[nc] < 0) {
                    m.grid_labels[nc] = comp.id;
                    lift[nc] = nl;
                    queue.push_back(nc);
                } else if (lift[nc] != nl) {
                    // the component reaches its own 2 pi translate
                    unbounded = true;
                }
            }
        }
        const std::size_t si = start % n1, sj = start / n1;
        comp.representative = {-std::numbers::pi + (si + 0.5) * d1, -W + (sj + 0.5) * d2};
        comp.bounded = !unbounded;
        m.components.push_back(comp);
    }
}

}  // namespace

AdmissibleSetModel assemble(const PendulumParams& p, std::vector<BarrierArc> truncated_arcs,
                            std::vector<TangencyPoint> endpoints, std::vector<StoppingPoint> stopping_points,
                            const AssemblyOptions& opts) {
    p.validate();
    if (opts.grid_theta1 < 4 || opts.grid_theta2 < 4) throw Error(ErrorCode::InvalidArgument, "grid too coarse");
    AdmissibleSetModel m;
    m.params = p;
    m.window = opts.window;
    m.period = kTwoPi;
    m.arcs = std::move(truncated_arcs);
    m.endpoints = std::move(endpoints);
    m.stopping_points = std::move(stopping_points);
    m.degenerate = m.arcs.empty();

    const Lens lens(p);
    int kmin = 0, kmax = 0;
    for (const TangencyPoint& tp : m.endpoints) {
        kmin = std::min(kmin, tp.period_index);
        kmax = std::max(kmax, tp.period_index);
    }
    for (const BarrierArc& a : m.arcs) {
        kmin = std::min(kmin, a.source.period_index - 1);
        kmax = std::max(kmax, a.source.period_index + 1);
    }

    // topology of each arc
    std::unordered_map<int, std::size_t> by_id;
    for (std::size_t i = 0; i < m.arcs.size(); ++i) by_id[m.arcs[i].id] = i;
    std::vector<ArcTopology> topo(m.arcs.size());
    std::unordered_map<int, std::vector<LensNode>> nodes;
    for (std::size_t i = 0; i < m.arcs.size(); ++i) {
        const BarrierArc& a = m.arcs[i];
        ArcTopology& t = topo[i];
        if (a.samples.size() < 2) continue;
        const ArcSample& mid = a.samples[a.samples.size() / 2];
        const Vec2 f = dynamics(p, mid.state, mid.control);
        t.backward = mid.adjoint.lambda1 * f.y - mid.adjoint.lambda2 * f.x > 0.0;
        t.start_lens = a.source.period_index;
        t.start_sigma = lens.sigma(t.start_lens, a.source.state);
        nodes[t.start_lens].push_back({t.start_sigma, static_cast<int>(i), End::Start});
        const ArcSample& last = a.samples.back();
        if (a.termination == Termination::StoppedAtIntersection) {
            for (const StoppingPoint& sp : m.stopping_points) {
                if (!sp.transversal) continue;
                if (sp.arc_a == a.id && sp.t_a == last.t && by_id.count(sp.arc_b)) t.partner = static_cast<int>(by_id[sp.arc_b]);
                if (sp.arc_b == a.id && sp.t_b == last.t && by_id.count(sp.arc_a)) t.partner = static_cast<int>(by_id[sp.arc_a]);
            }
            if (t.partner >= 0) t.end_kind = ArcTopology::Kind::Stopping;
        } else if (a.termination == Termination::ReachedG0Again) {
            t.end_kind = ArcTopology::Kind::Landing;
            t.end_lens = static_cast<int>(std::lround(last.state.theta1 / kTwoPi));
            t.end_sigma = lens.sigma(t.end_lens, last.state);
            nodes[t.end_lens].push_back({t.end_sigma, static_cast<int>(i), End::Finish});
            kmin = std::min(kmin, t.end_lens);
            kmax = std::max(kmax, t.end_lens);
        }
    }

    auto g0_gap = [&](const ReducedState& s) {
        const int side = std::sin(s.theta1) >= 0.0 ? 1 : -1;
        const Vec2 gr = g_tilde_branch_gradient(p, s, side);
        return std::abs(g_tilde(p, s)) / std::hypot(gr.x, gr.y);
    };

    // trace counter-clockwise chains
    std::set<std::vector<int>> seen;
    for (std::size_t i0 = 0; i0 < m.arcs.size(); ++i0) {
        if (m.arcs[i0].samples.size() < 2) continue;
        std::vector<ReducedState> poly;
        std::vector<int> used;
        std::size_t cur = i0;
        bool backward = topo[i0].backward;
        bool closed = false;
        for (std::size_t step = 0; step < 4 * m.arcs.size() + 4; ++step) {
            const auto& smp = m.arcs[cur].samples;
            used.push_back(m.arcs[cur].id);
            if (backward) {
                for (const ArcSample& s : smp) poly.push_back(s.state);
            } else {
                for (auto it = smp.rbegin(); it != smp.rend(); ++it) poly.push_back(it->state);
            }
            const ArcTopology& t = topo[cur];
            int lens_k;
            double sigma0;
            if (backward) {
                if (t.end_kind == ArcTopology::Kind::Stopping) {
                    const std::size_t j = static_cast<std::size_t>(t.partner);
                    if (topo[j].backward) break;
                    const ReducedState a = smp.back().state, b = m.arcs[j].samples.back().state;
                    const double gap = std::hypot(a.theta1 - b.theta1, a.theta2 - b.theta2);
                    if (gap > opts.stitch_tolerance) {
                        std::ostringstream os;
                        os << "arcs " << m.arcs[cur].id << " and " << m.arcs[j].id << " meet with gap " << gap;
                        throw Error(ErrorCode::StitchGap, os.str());
                    }
                    cur = j;
                    backward = false;
                    poly.pop_back();
                    if (cur == i0 && backward == topo[i0].backward) {
                        closed = true;
                        break;
                    }
                    continue;
                }
                if (t.end_kind != ArcTopology::Kind::Landing) break;
                const double gap = g0_gap(smp.back().state);
                if (gap > opts.stitch_tolerance) {
                    std::ostringstream os;
                    os << "arc " << m.arcs[cur].id << " ends " << gap << " away from G0";
                    throw Error(ErrorCode::StitchGap, os.str());
                }
                lens_k = t.end_lens;
                sigma0 = t.end_sigma;
            } else {
                lens_k = t.start_lens;
                sigma0 = t.start_sigma;
            }
            // walk the lens clockwise to the next node
            const auto& ln = nodes[lens_k];
            const LensNode* next = nullptr;
            double best = INFINITY;
            for (const LensNode& n : ln) {
                if (n.arc == static_cast<int>(cur) && ((backward && n.end == End::Finish) || (!backward && n.end == End::Start))) {
                    continue;
                }
                double d = n.sigma - sigma0;
                if (d <= 1e-12) d += 2.0;
                if (d < best) {
                    best = d;
                    next = &n;
                }
            }
            if (next == nullptr) break;
            const std::size_t j = static_cast<std::size_t>(next->arc);
            const bool departs_backward = next->end == End::Start;
            if (topo[j].backward != departs_backward) break;
            poly.pop_back();
            poly.push_back(lens.point(lens_k, sigma0));
            lens.fill(lens_k, sigma0, sigma0 + best, opts.lens_chord, poly);
            cur = j;
            backward = departs_backward;
            if (cur == i0 && backward == topo[i0].backward) {
                closed = true;
                break;
            }
            // the next arc supplies the node point itself
        }
        if (!closed) continue;
        std::vector<int> key = used;
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second) continue;
        InadmissibleCell cell;
        cell.polygon = std::move(poly);
        cell.arc_ids = used;
        cell.area = signed_area(cell.polygon);
        if (cell.area <= 0.0) {
            spdlog::warn("discarding clockwise chain through {} arcs", used.size());
            continue;
        }
        cell.theta1_min = cell.theta2_min = INFINITY;
        cell.theta1_max = cell.theta2_max = -INFINITY;
        for (const ReducedState& s : cell.polygon) {
            cell.theta1_min = std::min(cell.theta1_min, s.theta1);
            cell.theta1_max = std::max(cell.theta1_max, s.theta1);
            cell.theta2_min = std::min(cell.theta2_min, s.theta2);
            cell.theta2_max = std::max(cell.theta2_max, s.theta2);
        }
        m.cells.push_back(std::move(cell));
    }

    // boundary curves: barriers and whole lenses
    for (const BarrierArc& a : m.arcs) {
        BoundaryCurve c;
        c.kind = CurveKind::Barrier;
        c.arc_id = a.id;
        c.period_index = a.source.period_index;
        for (const ArcSample& s : a.samples) c.points.push_back(s.state);
        m.curves.push_back(std::move(c));
    }
    for (int k = kmin; k <= kmax; ++k) {
        BoundaryCurve c;
        c.kind = CurveKind::G0;
        c.period_index = k;
        c.points = lens.loop(k, opts.lens_chord);
        m.curves.push_back(std::move(c));
    }
    m.index = std::make_shared<const SegmentIndex>(m.curves);

    label_components(m, opts);
    spdlog::debug("assembled {} cells, {} components ({} bounded)", m.cells.size(), m.components.size(),
                  m.bounded_components());
    return m;
}

MembershipVerdict membership(const AdmissibleSetModel& model, const ReducedState& s) {
    if (!std::isfinite(s.theta1) || !std::isfinite(s.theta2)) {
        throw Error(ErrorCode::InvalidArgument, "non-finite query");
    }
    if (std::abs(s.theta2) > model.window.theta2_abs_max) {
        std::ostringstream os;
        os << "|theta2| = " << std::abs(s.theta2) << " exceeds the model window " << model.window.theta2_abs_max;
        throw Error(ErrorCode::WindowExceeded, os.str());
    }
    return Classifier{model}(s, 1.0);
}

MembershipVerdict membership_within(const AdmissibleSetModel& model, const ReducedState& s, double radius) {
    return Classifier{model}(s, radius);
}

}  // namespace tautset
