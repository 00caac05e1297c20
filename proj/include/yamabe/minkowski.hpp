#ifndef YAMABE_MINKOWSKI_HPP
#define YAMABE_MINKOWSKI_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "yamabe/diagnostics.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/singular_ivp.hpp"

// Piecewise entire profiles for the reduced equation
//   (gamma t + delta) v'' + beta v' = -mu |v|^(p-1) v
// built from one or two trajectories of w'' + (theta/r) w' = -Lambda |w|^(p-1) w
// under the maps t = r^2 / t = -r^2 (or the identity when the quadratic part
// vanishes), with the case taxonomy driven by the sign of mu*gamma and the
// position of p relative to (beta+gamma)/(beta-gamma) = (k+n+2)/(k+n-2).

namespace yamabe::singular_ivp {

enum class MinkowskiCase { M1_1, M1_2, M2_1, M2_2, M2_3, M2_4, M3_1, M3_2 };

inline const char* minkowski_case_name(MinkowskiCase c) {
    switch (c) {
        case MinkowskiCase::M1_1: return "M1.1";
        case MinkowskiCase::M1_2: return "M1.2";
        case MinkowskiCase::M2_1: return "M2.1";
        case MinkowskiCase::M2_2: return "M2.2";
        case MinkowskiCase::M2_3: return "M2.3";
        case MinkowskiCase::M2_4: return "M2.4";
        case MinkowskiCase::M3_1: return "M3.1";
        default: return "M3.2";
    }
}

struct MinkowskiCaseParams {
    bool A_zero = false;
    double gamma = 0.0;  // 4*alpha
    double delta = 0.0;  // 4*<a,a>
    double beta = 0.0;   // 2*tr A
    double mu = 1.0;
    int k = 0;
    int n = 0;
    double p = 3.0;
    double d = 1.0;  // initial value v(0)
};

struct MinkowskiPieceReport {
    std::string side;  // "right" / "left" / "even"
    double Lambda = 0.0;
    diagnostics::QualitativeReport qual;
};

struct MinkowskiProfile {
    MinkowskiCase case_tag = MinkowskiCase::M1_1;
    bool boundary_flag = false;  // p exactly on the case threshold
    double theta = 0.0;
    profile::PiecewiseProfile profile;
    std::vector<MinkowskiPieceReport> piece_reports;
    bool prediction_agrees = true;  // predictions matched observations everywhere
};

struct MinkowskiBuildOptions {
    double horizon = 200.0;  // r_max for globally defined sides
    Settings ode{};
};

namespace detail {

inline Trajectory run_piece(double theta, double Lambda, double p, double d,
                            const MinkowskiBuildOptions& opt) {
    SingularIVP prob{CoefficientFamily(coefficients::PowerLaw{theta}),
                     Nonlinearity(coefficients::PurePower{Lambda, p}), Sign::minus, d,
                     opt.horizon};
    return integrate(prob, opt.ode);
}

inline MinkowskiPieceReport report_piece(const std::string& side, const Trajectory& t,
                                         double theta, double Lambda, double p,
                                         double d) {
    MinkowskiPieceReport rep;
    rep.side = side;
    rep.Lambda = Lambda;
    rep.qual = diagnostics::classify(t, theta, Lambda, p, d);
    return rep;
}

}  // namespace detail

inline MinkowskiProfile build_minkowski_profile(const MinkowskiCaseParams& cp,
                                                const MinkowskiBuildOptions& opt = {}) {
    using profile::MapKind;
    if (!(cp.p > 1.0)) throw std::invalid_argument("build_minkowski_profile: need p > 1");
    if (!(cp.d > 0.0)) throw std::invalid_argument("build_minkowski_profile: need d > 0");
    if (cp.mu == 0.0) throw std::invalid_argument("build_minkowski_profile: need mu != 0");

    MinkowskiProfile out;
    out.profile.psi = [mu = cp.mu, p = cp.p](double u) {
        return mu * std::pow(std::abs(u), p - 1.0) * u;
    };

    const bool linear_case = cp.A_zero || cp.gamma == 0.0;
    if (linear_case) {
        if (cp.delta == 0.0)
            throw std::invalid_argument(
                "build_minkowski_profile: A=0 (or tr-free) case needs delta != 0");
        const double Lambda = cp.mu / cp.delta;
        out.theta = 0.0;
        out.case_tag = Lambda > 0.0 ? MinkowskiCase::M1_1 : MinkowskiCase::M1_2;
        Trajectory t = detail::run_piece(0.0, Lambda, cp.p, cp.d, opt);
        out.piece_reports.push_back(
            detail::report_piece("even", t, 0.0, Lambda, cp.p, cp.d));
        profile::Piece right{t, MapKind::identity_pos, 1.0};
        profile::Piece left{t, MapKind::identity_neg, 1.0};
        if (t.termination.kind == TerminationKind::BlowUp) {
            out.profile.blowup_ts.push_back(t.termination.R_est);
            out.profile.blowup_ts.push_back(-t.termination.R_est);
        }
        out.profile.pieces = {left, right};
    } else {
        if (std::abs(cp.delta) > 1e-12)
            throw std::invalid_argument(
                "build_minkowski_profile: quadratic cases require delta = 0");
        if (cp.k < 0 || cp.n < 0 || cp.k + cp.n < 1)
            throw std::invalid_argument("build_minkowski_profile: need k+n >= 1");
        if (std::abs(cp.beta - 0.5 * cp.gamma * (cp.k + cp.n)) >
            1e-9 * std::max(1.0, std::abs(cp.beta)))
            throw std::invalid_argument(
                "build_minkowski_profile: inconsistent beta (expected gamma*(k+n)/2)");

        const int kn = cp.k + cp.n;
        out.theta = kn - 1;
        const double Lambda1 = 4.0 * cp.mu / cp.gamma;   // t >= 0 side
        const double Lambda2 = -Lambda1;                  // t <= 0 side
        const double thr = kn > 2 ? double(kn + 2) / double(kn - 2)
                                  : std::numeric_limits<double>::infinity();
        const double mug = cp.mu * cp.gamma;

        if (cp.k > 0 && cp.n > 0) {
            // image is all of R: two pieces
            out.case_tag = cp.p < thr ? MinkowskiCase::M3_1 : MinkowskiCase::M3_2;
            out.boundary_flag = cp.p == thr;
            Trajectory tr = detail::run_piece(out.theta, Lambda1, cp.p, cp.d, opt);
            Trajectory tl = detail::run_piece(out.theta, Lambda2, cp.p, cp.d, opt);
            out.piece_reports.push_back(
                detail::report_piece("right", tr, out.theta, Lambda1, cp.p, cp.d));
            out.piece_reports.push_back(
                detail::report_piece("left", tl, out.theta, Lambda2, cp.p, cp.d));
            if (tr.termination.kind == TerminationKind::BlowUp)
                out.profile.blowup_ts.push_back(std::pow(tr.termination.R_est, 2));
            if (tl.termination.kind == TerminationKind::BlowUp)
                out.profile.blowup_ts.push_back(-std::pow(tl.termination.R_est, 2));
            out.profile.pieces = {profile::Piece{tl, MapKind::square_neg, 1.0},
                                  profile::Piece{tr, MapKind::square_pos, 1.0}};
            (void)mug;
        } else {
            // one-sided image
            const bool side_positive =
                (cp.k == 0 && cp.gamma > 0.0) || (cp.n == 0 && cp.gamma < 0.0);
            const double mug_eff = side_positive ? mug : -mug;
            if (mug_eff > 0.0) {
                if (kn == 1)
                    out.case_tag = MinkowskiCase::M2_1;
                else if (cp.p < thr)
                    out.case_tag = MinkowskiCase::M2_2;
                else {
                    out.case_tag = MinkowskiCase::M2_3;
                    out.boundary_flag = cp.p == thr;
                }
            } else {
                out.case_tag = MinkowskiCase::M2_4;
            }
            const double Lambda = side_positive ? Lambda1 : Lambda2;
            Trajectory t = detail::run_piece(out.theta, Lambda, cp.p, cp.d, opt);
            out.piece_reports.push_back(detail::report_piece(
                side_positive ? "right" : "left", t, out.theta, Lambda, cp.p, cp.d));
            if (t.termination.kind == TerminationKind::BlowUp) {
                double R = std::pow(t.termination.R_est, 2);
                out.profile.blowup_ts.push_back(side_positive ? R : -R);
            }
            out.profile.pieces = {profile::Piece{
                t, side_positive ? MapKind::square_pos : MapKind::square_neg, 1.0}};
        }
    }

    // compare the taxonomy's predicted behavior with what was observed;
    // a mismatch is reported, never discarded
    out.prediction_agrees = true;
    for (auto& pr : out.piece_reports)
        if (!pr.qual.agreement) out.prediction_agrees = false;
    return out;
}

}  // namespace yamabe::singular_ivp

#endif  // YAMABE_MINKOWSKI_HPP
