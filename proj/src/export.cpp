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

#include "tautset/export.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "tautset/error.hpp"

namespace tautset {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json point(const ReducedState& s) { return json::array({s.theta1, s.theta2}); }

json polyline(const std::vector<ReducedState>& pts) {
    json a = json::array();
    for (const auto& s : pts) a.push_back(point(s));
    return a;
}

const char* kind_name(CurveKind k) { return k == CurveKind::Barrier ? "barrier" : "g0"; }

bool is_plus_marker(const ArcEvent& e) {
    return e.kind == EventKind::ModeChange && e.before == ControlMode::Constrained;
}

// plot frame
struct Frame {
    double x0, x1, y0, y1;
    double left = 80, top = 40, width = 1100, height = 560;

    double px(double theta1) const { return left + (theta1 - x0) / (x1 - x0) * width; }
    double py(double theta2) const { return top + (y1 - theta2) / (y1 - y0) * height; }
};

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string svg_polyline(const Frame& fr, const std::vector<ReducedState>& pts, const std::string& style) {
    std::string out = "<polyline fill=\"none\" " + style + " points=\"";
    double lx = 1e300, ly = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double x = fr.px(pts[i].theta1), y = fr.py(pts[i].theta2);
        // drop points closer than half a pixel, keep the last one
        if (i + 1 < pts.size() && std::hypot(x - lx, y - ly) < 0.5) continue;
        out += f2(x) + "," + f2(y) + " ";
        lx = x;
        ly = y;
    }
    out += "\"/>\n";
    return out;
}

std::string pi_label(int quarter) {
    // multiples of pi/2
    if (quarter == 0) return "0";
    const int num = quarter;
    std::string sign = num < 0 ? "&#8722;" : "";
    const int a = std::abs(num);
    if (a % 2 == 0) return sign + (a == 2 ? "" : std::to_string(a / 2)) + "&#960;";
    return sign + (a == 1 ? "" : std::to_string(a)) + "&#960;/2";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_endpoints_csv(std::ostream& out, const EndpointRun& run) {
    out << "kind,k,theta1,theta2,lambda1,lambda2,u_lo,u_hi,residual,valid\n";
    for (const auto& r : run.records) {
        const auto& tp = r.point;
        out << to_string(tp.kind) << ',' << tp.period_index << ',' << format_double(tp.state.theta1) << ','
            << format_double(tp.state.theta2) << ',' << format_double(tp.final_adjoint.lambda1) << ','
            << format_double(tp.final_adjoint.lambda2) << ',' << format_double(tp.final_control_set.lo) << ','
            << format_double(tp.final_control_set.hi) << ',' << format_double(r.residual) << ','
            << (r.valid ? 1 : 0) << '\n';
    }
}

void write_arc_csv(std::ostream& out, const BarrierArc& arc) {
    out << "t,theta1,theta2,lambda1,lambda2,u,mu,H,mode\n";
    for (const auto& s : arc.samples) {
        out << format_double(s.t) << ',' << format_double(s.state.theta1) << ',' << format_double(s.state.theta2)
            << ',' << format_double(s.adjoint.lambda1) << ',' << format_double(s.adjoint.lambda2) << ','
            << format_double(s.control) << ',' << format_double(s.multiplier) << ','
            << format_double(s.hamiltonian) << ',' << to_string(s.mode) << '\n';
    }
}

void write_events_csv(std::ostream& out, const std::vector<BarrierArc>& arcs) {
    out << "arc,t,kind,theta1,theta2,before,after\n";
    for (const auto& arc : arcs) {
        for (const auto& e : arc.events) {
            out << arc.id << ',' << format_double(e.t) << ',' << to_string(e.kind) << ','
                << format_double(e.state.theta1) << ',' << format_double(e.state.theta2) << ','
                << to_string(e.before) << ',' << to_string(e.after) << '\n';
        }
    }
}

void write_stopping_points_csv(std::ostream& out, const std::vector<StoppingPoint>& sps) {
    out << "theta1,theta2,arc_a,arc_b,t_a,t_b,transversal,determinant\n";
    for (const auto& sp : sps) {
        out << format_double(sp.location.theta1) << ',' << format_double(sp.location.theta2) << ',' << sp.arc_a
            << ',' << sp.arc_b << ',' << format_double(sp.t_a) << ',' << format_double(sp.t_b) << ','
            << (sp.transversal ? 1 : 0) << ',' << format_double(sp.determinant) << '\n';
    }
}

void write_oracle_csv(std::ostream& out, const OracleReport& report) {
    out << "theta1,theta2,oracle_admissible,computed,distance,in_band,disagreement,reverse_disagreement\n";
    for (const auto& p : report.points) {
        out << format_double(p.state.theta1) << ',' << format_double(p.state.theta2) << ','
            << (p.oracle_admissible ? 1 : 0) << ',' << to_string(p.computed) << ',' << format_double(p.distance)
            << ',' << (p.in_band ? 1 : 0) << ',' << (p.disagreement ? 1 : 0) << ','
            << (p.reverse_disagreement ? 1 : 0) << '\n';
    }
}

std::string model_to_json(const AdmissibleSetModel& model) {
    json doc;
    doc["schema"] = "tautset.admissible_set";
    doc["version"] = kModelSchemaVersion;
    doc["params"] = {{"M", model.params.M}, {"m", model.params.m}, {"l", model.params.l}, {"g", model.params.g}};
    doc["window"] = {{"theta1_min", model.window.theta1_min},
                     {"theta1_max", model.window.theta1_max},
                     {"theta2_abs_max", model.window.theta2_abs_max}};
    doc["period"] = model.period;
    doc["degenerate"] = model.degenerate;

    json eps = json::array();
    for (const auto& tp : model.endpoints) {
        eps.push_back({{"kind", to_string(tp.kind)},
                       {"k", tp.period_index},
                       {"state", point(tp.state)},
                       {"adjoint", json::array({tp.final_adjoint.lambda1, tp.final_adjoint.lambda2})},
                       {"control_set", json::array({tp.final_control_set.lo, tp.final_control_set.hi})}});
    }
    doc["endpoints"] = eps;

    json arcs = json::array();
    for (const auto& arc : model.arcs) {
        json events = json::array();
        for (const auto& e : arc.events) {
            events.push_back({{"kind", to_string(e.kind)},
                              {"t", e.t},
                              {"state", point(e.state)},
                              {"before", to_string(e.before)},
                              {"after", to_string(e.after)}});
        }
        arcs.push_back({{"id", arc.id},
                        {"endpoint", point(arc.source.state)},
                        {"termination", to_string(arc.termination)},
                        {"earliest_time", arc.earliest_time()},
                        {"adjoint_log_scale", arc.adjoint_log_scale},
                        {"events", events}});
    }
    doc["arcs"] = arcs;

    json sps = json::array();
    for (const auto& sp : model.stopping_points) {
        sps.push_back({{"state", point(sp.location)},
                       {"arcs", json::array({sp.arc_a, sp.arc_b})},
                       {"times", json::array({sp.t_a, sp.t_b})},
                       {"transversal", sp.transversal},
                       {"determinant", sp.determinant}});
    }
    doc["stopping_points"] = sps;

    json curves = json::array();
    for (const auto& c : model.curves) {
        json jc = {{"kind", kind_name(c.kind)}, {"period_index", c.period_index}, {"points", polyline(c.points)}};
        if (c.kind == CurveKind::Barrier) jc["arc_id"] = c.arc_id;
        curves.push_back(std::move(jc));
    }
    doc["curves"] = curves;

    json cells = json::array();
    for (const auto& c : model.cells) {
        cells.push_back({{"tag", "inadmissible"}, {"arc_ids", c.arc_ids}, {"area", c.area}, {"polygon", polyline(c.polygon)}});
    }
    doc["inadmissible_cells"] = cells;

    json comps = json::array();
    for (const auto& c : model.components) {
        comps.push_back({{"id", c.id},
                         {"tag", "interior"},
                         {"bounded", c.bounded},
                         {"grid_cells", c.grid_cells},
                         {"representative", point(c.representative)}});
    }
    doc["components"] = comps;

    // run-length encoded component labels over the period cell, -1 outside the interior
    json runs = json::array();
    for (std::size_t i = 0; i < model.grid_labels.size();) {
        std::size_t j = i;
        while (j < model.grid_labels.size() && model.grid_labels[j] == model.grid_labels[i]) ++j;
        runs.push_back(json::array({model.grid_labels[i], j - i}));
        i = j;
    }
    doc["component_grid"] = {{"theta1_range", json::array({-std::numbers::pi, std::numbers::pi})},
                             {"theta2_range", json::array({-model.window.theta2_abs_max, model.window.theta2_abs_max})},
                             {"n_theta1", model.grid_theta1},
                             {"n_theta2", model.grid_theta2},
                             {"row_major_runs", runs}};
    return doc.dump(1) + "\n";
}

std::string render_svg(const AdmissibleSetModel& model) {
    const Window& w = model.window;
    Frame fr{w.theta1_min, w.theta1_max, -w.theta2_abs_max, w.theta2_abs_max};
    const double W = fr.width + fr.left + 40, H = fr.height + fr.top + 90;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<defs><clipPath id=\"plot\"><rect x=\"" << fr.left << "\" y=\"" << fr.top << "\" width=\"" << fr.width
      << "\" height=\"" << fr.height << "\"/></clipPath></defs>\n";

    // components, tiled over the window: unbounded light, bounded darker
    o << "<g clip-path=\"url(#plot)\" stroke=\"none\">\n";
    const int n1 = model.grid_theta1, n2 = model.grid_theta2;
    if (n1 > 0 && n2 > 0) {
        const double d1 = kTwoPi / n1, d2 = 2.0 * w.theta2_abs_max / n2;
        const int c_lo = static_cast<int>(std::floor((w.theta1_min + std::numbers::pi) / d1));
        const int c_hi = static_cast<int>(std::ceil((w.theta1_max + std::numbers::pi) / d1));
        auto label_at = [&](int col, int row) {
            const int i = ((col % n1) + n1) % n1;
            return model.grid_labels[static_cast<std::size_t>(row) * n1 + i];
        };
        for (int row = 0; row < n2; ++row) {
            for (int col = c_lo; col < c_hi;) {
                const int lab = label_at(col, row);
                int end = col + 1;
                while (end < c_hi && label_at(end, row) == lab) ++end;
                if (lab >= 0) {
                    const bool bounded = model.components[static_cast<std::size_t>(lab)].bounded;
                    const double xa = fr.px(-std::numbers::pi + col * d1), xb = fr.px(-std::numbers::pi + end * d1);
                    const double ya = fr.py(-w.theta2_abs_max + (row + 1) * d2), yb = fr.py(-w.theta2_abs_max + row * d2);
                    o << "<rect x=\"" << f2(xa) << "\" y=\"" << f2(ya) << "\" width=\"" << f2(xb - xa + 0.3)
                      << "\" height=\"" << f2(yb - ya + 0.3) << "\" fill=\"" << (bounded ? "#7fb3e0" : "#c9e3c1")
                      << "\"/>\n";
                }
                col = end;
            }
        }
    }
    o << "</g>\n";

    o << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& c : model.curves) {
        if (c.kind == CurveKind::G0) o << svg_polyline(fr, c.points, "stroke=\"black\" stroke-width=\"1.2\"");
    }
    for (const auto& c : model.curves) {
        if (c.kind == CurveKind::Barrier) o << svg_polyline(fr, c.points, "stroke=\"#c0392b\" stroke-width=\"1.6\"");
    }
    // switch markers
    for (const auto& arc : model.arcs) {
        for (const auto& e : arc.events) {
            const double x = fr.px(e.state.theta1), y = fr.py(e.state.theta2);
            if (e.kind == EventKind::AdjointSwitch) {
                o << "<path d=\"M" << f2(x - 5) << ' ' << f2(y - 5) << " L" << f2(x + 5) << ' ' << f2(y + 5) << " M"
                  << f2(x - 5) << ' ' << f2(y + 5) << " L" << f2(x + 5) << ' ' << f2(y - 5)
                  << "\" stroke=\"black\" stroke-width=\"1.8\"/>\n";
            } else if (is_plus_marker(e)) {
                o << "<path d=\"M" << f2(x - 6) << ' ' << f2(y) << " L" << f2(x + 6) << ' ' << f2(y) << " M" << f2(x)
                  << ' ' << f2(y - 6) << " L" << f2(x) << ' ' << f2(y + 6)
                  << "\" stroke=\"black\" stroke-width=\"1.8\"/>\n";
            }
        }
    }
    for (const auto& sp : model.stopping_points) {
        o << "<circle cx=\"" << f2(fr.px(sp.location.theta1)) << "\" cy=\"" << f2(fr.py(sp.location.theta2))
          << "\" r=\"4.5\" fill=\"#1f4e9c\" stroke=\"white\" stroke-width=\"1\"/>\n";
    }
    for (const auto& tp : model.endpoints) {
        o << "<circle cx=\"" << f2(fr.px(tp.state.theta1)) << "\" cy=\"" << f2(fr.py(tp.state.theta2))
          << "\" r=\"3\" fill=\"black\"/>\n";
    }
    o << "</g>\n";

    // axes
    o << "<rect x=\"" << fr.left << "\" y=\"" << fr.top << "\" width=\"" << fr.width << "\" height=\"" << fr.height
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double ybase = fr.top + fr.height;
    for (int q = static_cast<int>(std::ceil(w.theta1_min / (std::numbers::pi / 2)));
         q * std::numbers::pi / 2 <= w.theta1_max; ++q) {
        const double x = fr.px(q * std::numbers::pi / 2);
        o << "<line x1=\"" << f2(x) << "\" y1=\"" << f2(ybase) << "\" x2=\"" << f2(x) << "\" y2=\"" << f2(ybase + 6)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << f2(x) << "\" y=\"" << f2(ybase + 20) << "\" text-anchor=\"middle\">" << pi_label(q)
          << "</text>\n";
    }
    const double ystep = w.theta2_abs_max > 6 ? 2.0 : 1.0;
    for (double v = -std::floor(w.theta2_abs_max / ystep) * ystep; v <= w.theta2_abs_max + 1e-12; v += ystep) {
        const double y = fr.py(v);
        o << "<line x1=\"" << f2(fr.left - 6) << "\" y1=\"" << f2(y) << "\" x2=\"" << f2(fr.left) << "\" y2=\"" << f2(y)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << f2(fr.left - 9) << "\" y=\"" << f2(y + 4) << "\" text-anchor=\"end\">"
          << (v < 0 ? "&#8722;" : "") << static_cast<int>(std::abs(v)) << "</text>\n";
    }
    o << "<text x=\"" << f2(fr.left + fr.width / 2) << "\" y=\"" << f2(ybase + 42)
      << "\" text-anchor=\"middle\" font-size=\"15\">&#952;&#8321; (rad)</text>\n";
    o << "<text x=\"22\" y=\"" << f2(fr.top + fr.height / 2) << "\" text-anchor=\"middle\" font-size=\"15\" transform=\"rotate(-90 22 "
      << f2(fr.top + fr.height / 2) << ")\">&#952;&#8322; (rad/s)</text>\n";
    char title[160];
    std::snprintf(title, sizeof title, "M = %g, m = %g, l = %g, g = %g", model.params.M, model.params.m, model.params.l,
                  model.params.g);
    o << "<text x=\"" << f2(fr.left) << "\" y=\"" << f2(fr.top - 14) << "\" font-size=\"14\">" << title << "</text>\n";

    // legend
    const double ly = ybase + 70;
    double lx = fr.left;
    auto swatch = [&](const std::string& shape, const std::string& label) {
        o << shape << "<text x=\"" << f2(lx + 24) << "\" y=\"" << f2(ly + 4) << "\">" << label << "</text>\n";
        lx += 40 + 7.5 * static_cast<double>(label.size());
    };
    swatch("<line x1=\"" + f2(lx) + "\" y1=\"" + f2(ly) + "\" x2=\"" + f2(lx + 18) + "\" y2=\"" + f2(ly) +
               "\" stroke=\"black\" stroke-width=\"1.2\"/>",
           "G0");
    swatch("<line x1=\"" + f2(lx) + "\" y1=\"" + f2(ly) + "\" x2=\"" + f2(lx + 18) + "\" y2=\"" + f2(ly) +
               "\" stroke=\"#c0392b\" stroke-width=\"1.6\"/>",
           "barrier");
    swatch("<rect x=\"" + f2(lx) + "\" y=\"" + f2(ly - 6) + "\" width=\"18\" height=\"12\" fill=\"#7fb3e0\"/>",
           "admissible, bounded");
    swatch("<rect x=\"" + f2(lx) + "\" y=\"" + f2(ly - 6) + "\" width=\"18\" height=\"12\" fill=\"#c9e3c1\"/>",
           "admissible, unbounded");
    swatch("<circle cx=\"" + f2(lx + 9) + "\" cy=\"" + f2(ly) + "\" r=\"4.5\" fill=\"#1f4e9c\"/>", "stopping point");
    swatch("<path d=\"M" + f2(lx + 4) + ' ' + f2(ly - 5) + " L" + f2(lx + 14) + ' ' + f2(ly + 5) + " M" + f2(lx + 4) +
               ' ' + f2(ly + 5) + " L" + f2(lx + 14) + ' ' + f2(ly - 5) + "\" stroke=\"black\" stroke-width=\"1.8\"/>",
           "control switch");
    swatch("<path d=\"M" + f2(lx + 3) + ' ' + f2(ly) + " L" + f2(lx + 15) + ' ' + f2(ly) + " M" + f2(lx + 9) + ' ' +
               f2(ly - 6) + " L" + f2(lx + 9) + ' ' + f2(ly + 6) + "\" stroke=\"black\" stroke-width=\"1.8\"/>",
           "constrained to bang");
    o << "</svg>\n";
    return o.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::error_code ec;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::vector<std::string> export_barrier(const PipelineResult& result, const std::string& dir) {
    const auto root = std::filesystem::path(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
        const auto p = (root / rel).string();
        write_text_file(p, content);
        written.push_back(p);
    };
    for (const auto& arc : result.model.arcs) {
        std::ostringstream s;
        write_arc_csv(s, arc);
        char name[32];
        std::snprintf(name, sizeof name, "arc_%02d.csv", arc.id);
        emit(std::filesystem::path("arcs") / name, s.str());
    }
    {
        std::ostringstream s;
        write_events_csv(s, result.model.arcs);
        emit("events.csv", s.str());
    }
    {
        std::ostringstream s;
        write_stopping_points_csv(s, result.model.stopping_points);
        emit("stopping_points.csv", s.str());
    }
    emit("model.json", model_to_json(result.model));
    emit("barrier.svg", render_svg(result.model));
    return written;
}

}  // namespace tautset
