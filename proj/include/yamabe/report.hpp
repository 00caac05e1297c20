#ifndef YAMABE_REPORT_HPP
#define YAMABE_REPORT_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "yamabe/diagnostics.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/shooting.hpp"
#include "yamabe/singular_ivp.hpp"

// CSV / JSON / SVG serialization.  Identical inputs produce byte-identical
// files: fixed number formatting, no timestamps, deterministic ordering.

namespace yamabe::report {

using json = nlohmann::ordered_json;

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int schema_version = 1;

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

// CSV schema: r,w,wprime with 17 significant digits, '.' decimal separator
inline std::string trajectory_csv(const std::vector<singular_ivp::Node>& nodes) {
    std::string out = "r,w,wprime\n";
    for (auto& n : nodes)
        out += fmt17(n.r) + "," + fmt17(n.w) + "," + fmt17(n.wp) + "\n";
    return out;
}

inline json base_report(const json& resolved_config) {
    json j;
    j["schema_version"] = schema_version;
    j["tool_version"] = tool_version;
    j["sigma_calibration"] = geometry::sigma_calibration();
    j["config"] = resolved_config;
    return j;
}

inline json termination_json(const singular_ivp::Termination& t) {
    json j;
    j["kind"] = singular_ivp::termination_name(t.kind);
    if (t.kind == singular_ivp::TerminationKind::BlowUp) {
        j["R_est"] = t.R_est;
        j["fit_exponent"] = t.fit_exponent;
        j["low_confidence"] = t.low_confidence;
    }
    if (t.kind == singular_ivp::TerminationKind::StepCollapse) j["r_stop"] = t.r_stop;
    return j;
}

inline json events_json(const std::vector<singular_ivp::Event>& events) {
    json arr = json::array();
    for (auto& e : events) {
        json j;
        j["kind"] = e.kind == singular_ivp::EventKind::zero ? "zero" : "critical_point";
        j["r"] = e.r;
        arr.push_back(j);
    }
    return arr;
}

inline json qualitative_json(const diagnostics::QualitativeReport& q) {
    json j;
    j["observed"] = diagnostics::class_name(q.observed);
    j["predicted"] = diagnostics::class_name(q.predicted);
    j["zero_count"] = q.zero_count;
    j["amplitude_trend"] = diagnostics::trend_name(q.amplitude_trend);
    j["agreement"] = q.agreement;
    j["envelope_decay_exponent"] = q.envelope_decay_exponent;
    if (q.observed == diagnostics::SolutionClass::inconclusive)
        j["recommended_horizon"] = q.recommended_horizon;
    return j;
}

inline json compact_solution_json(const shooting::CompactSolution& s) {
    json j;
    j["found"] = s.found;
    j["constant_solution"] = s.constant_solution;
    j["message"] = s.message;
    j["k"] = s.k;
    j["d"] = s.d;
    j["e"] = s.e;
    j["defect"] = {{"value", s.defect.value}, {"derivative", s.defect.derivative}};
    j["zero_count"] = s.zero_count;
    j["zeros"] = s.zeros;
    j["subcriticality"] = {{"k_zeroes_bound", s.bound_k_zeroes},
                           {"k_zeroes_ok", s.subcritical_k_zeroes},
                           {"nodal_bound", s.bound_nodal},
                           {"nodal_ok", s.subcritical_nodal}};
    if (!s.warning.empty()) j["warning"] = s.warning;
    return j;
}

inline json glued_solution_json(const shooting::GluedSolution& g) {
    json j;
    j["case_tag"] = g.case_tag;
    j["image"] = shooting::image_type_name(g.image);
    j["k"] = g.k;
    j["d"] = g.d;
    j["e"] = g.e;
    j["R_plus"] = g.R_plus;
    j["R_minus"] = g.R_minus;
    j["natural_condition"] = {{"plus_formula", g.natural_plus_formula},
                              {"plus_defect", g.natural_plus_defect},
                              {"minus_formula", g.natural_minus_formula},
                              {"minus_defect", g.natural_minus_defect}};
    j["middle_zero_count"] = g.middle_zero_count;
    j["outer_zero_count"] = g.outer_zero_count;
    j["middle"] = compact_solution_json(g.middle);
    json pieces = json::array();
    for (auto& p : g.profile.pieces) {
        json pj;
        auto [lo, hi] = p.t_range();
        pj["t_lo"] = lo;
        pj["t_hi"] = hi;
        pj["sign"] = p.sign;
        pj["nodes"] = p.traj.nodes.size();
        pieces.push_back(pj);
    }
    j["pieces"] = pieces;
    return j;
}

// ---------------------------------------------------------------------------
// Minimal single-file SVG plots (deterministic output, no external assets)
// ---------------------------------------------------------------------------

struct SvgCurve {
    std::vector<double> x, y;
};

inline std::string plot_svg(const std::vector<SvgCurve>& curves,
                            const std::vector<double>& vertical_asymptotes,
                            const std::string& title) {
    const int W = 720, H = 480, ML = 56, MR = 16, MT = 36, MB = 40;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& c : curves)
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            xmin = std::min(xmin, c.x[i]);
            xmax = std::max(xmax, c.x[i]);
            ymin = std::min(ymin, c.y[i]);
            ymax = std::max(ymax, c.y[i]);
        }
    for (double a : vertical_asymptotes) {
        xmin = std::min(xmin, a);
        xmax = std::max(xmax, a);
    }
    if (!(xmax > xmin)) {
        xmin -= 1;
        xmax += 1;
    }
    if (!(ymax > ymin)) {
        ymin -= 1;
        ymax += 1;
    }
    const double padx = 0.03 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;
    auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
    char buf[160];
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
    s += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"22\" font-family=\"monospace\" font-size=\"14\">",
                  ML);
    s += buf;
    s += title + "</text>\n";
    // axes box
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                  "stroke=\"black\" stroke-width=\"1\"/>\n",
                  ML, MT, W - ML - MR, H - MT - MB);
    s += buf;
    // zero line
    if (ymin < 0.0 && ymax > 0.0) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%d\" y1=\"%.2f\" x2=\"%d\" y2=\"%.2f\" "
                      "stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n",
                      ML, Y(0.0), W - MR, Y(0.0));
        s += buf;
    }
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    int ci = 0;
    for (auto& c : curves) {
        s += "<polyline fill=\"none\" stroke=\"";
        s += colors[ci++ % 4];
        s += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(c.x[i]),
                          std::min(1e4, std::max(-1e4, Y(c.y[i]))));
            s += buf;
        }
        s += "\"/>\n";
    }
    for (double a : vertical_asymptotes) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%d\" "
                      "stroke=\"#d62728\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n",
                      X(a), MT, X(a), H - MB);
        s += buf;
    }
    // axis extremes
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" font-size=\"11\">"
                  "%.6g</text>\n",
                  ML, H - MB + 16, xmin + padx);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" font-size=\"11\" "
                  "text-anchor=\"end\">%.6g</text>\n",
                  W - MR, H - MB + 16, xmax - padx);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" font-size=\"11\" "
                  "text-anchor=\"end\">%.6g</text>\n",
                  ML - 4, H - MB, ymin + pady);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" font-size=\"11\" "
                  "text-anchor=\"end\">%.6g</text>\n",
                  ML - 4, MT + 10, ymax - pady);
    s += buf;
    s += "</svg>\n";
    return s;
}

inline std::string trajectory_svg(const singular_ivp::Trajectory& traj,
                                  const std::string& title) {
    SvgCurve c;
    for (auto& n : traj.nodes) {
        if (std::abs(n.w) > 1e6) continue;  // clip the blow-up spike
        c.x.push_back(n.r);
        c.y.push_back(n.w);
    }
    std::vector<double> asym;
    if (traj.termination.kind == singular_ivp::TerminationKind::BlowUp)
        asym.push_back(traj.termination.R_est);
    return plot_svg({c}, asym, title);
}

inline std::string profile_svg(const profile::PiecewiseProfile& prof,
                               const std::string& title) {
    std::vector<SvgCurve> curves;
    for (auto& p : prof.pieces) {
        SvgCurve c;
        for (auto& n : p.traj.nodes) {
            double v = p.sign * n.w;
            if (std::abs(v) > 50.0) continue;
            c.x.push_back(p.t_of_r(n.r));
            c.y.push_back(v);
        }
        if (p.map == profile::MapKind::identity_neg ||
            p.map == profile::MapKind::square_neg ||
            p.map == profile::MapKind::cosh_neg || p.map == profile::MapKind::cos_map)
            std::reverse(c.x.begin(), c.x.end()), std::reverse(c.y.begin(), c.y.end());
        curves.push_back(std::move(c));
    }
    return plot_svg(curves, prof.blowup_ts, title);
}

}  // namespace yamabe::report

#endif  // YAMABE_REPORT_HPP
