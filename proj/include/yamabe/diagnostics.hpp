#ifndef YAMABE_DIAGNOSTICS_HPP
#define YAMABE_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "yamabe/singular_ivp.hpp"

// Energies, the Pohozaev identity residual, and qualitative classification of
// trajectories against the regime table for w'' + (theta/r) w' = -Lambda |w|^(p-1) w.

namespace yamabe::diagnostics {

using singular_ivp::Sign;
using singular_ivp::SingularIVP;
using singular_ivp::Trajectory;

// ---------------------------------------------------------------------------
// Energy along a trajectory.
//   sign = minus:  E(r) = w'^2/2 + F(w)   (non-increasing)
//   sign = plus :  E(r) = w'^2/2 - F(w)   (non-increasing)
// ---------------------------------------------------------------------------

struct EnergyReport {
    std::vector<double> r;
    std::vector<double> E;
    bool non_increasing = true;
    double drift_per_unit_r = 0.0;  // cumulative positive creep / span
    double max_deviation = 0.0;     // max |E - E_first|
};

inline EnergyReport energy(const Trajectory& traj, const coefficients::Nonlinearity& nl,
                           Sign sign) {
    if (traj.nodes.empty()) throw std::invalid_argument("energy: empty trajectory");
    EnergyReport rep;
    const double s = sign == Sign::plus ? 1.0 : -1.0;
    rep.r.reserve(traj.nodes.size());
    rep.E.reserve(traj.nodes.size());
    for (auto& n : traj.nodes) {
        rep.r.push_back(n.r);
        rep.E.push_back(0.5 * n.wp * n.wp - s * nl.primitive(n.w));
    }
    double creep = 0.0;
    for (std::size_t i = 1; i < rep.E.size(); ++i) {
        if (rep.E[i] > rep.E[i - 1]) creep += rep.E[i] - rep.E[i - 1];
        rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.E[i] - rep.E[0]));
    }
    const double span = std::max(rep.r.back() - rep.r.front(), 1e-300);
    rep.drift_per_unit_r = creep / span;
    rep.non_increasing = rep.drift_per_unit_r <= 1e-9;
    return rep;
}

// ---------------------------------------------------------------------------
// Pohozaev identity residual, valid for (A-) with q = theta/r and
// f = Lambda |w|^(p-1) w, Lambda > 0:
//   -r^(theta+1) E_w(r) - (theta-1)/2 r^theta w w'
//       = Lambda [ (theta-1)/2 - (theta+1)/(p+1) ] int_0^r s^theta |w|^(p+1) ds
// with E_w = |w'|^2/2 + Lambda |w|^(p+1)/(p+1).
// ---------------------------------------------------------------------------

inline double pohozaev_residual(const Trajectory& traj, double theta, double Lambda,
                                double p) {
    auto* pl = std::get_if<coefficients::PowerLaw>(&traj.family.variant());
    if (!pl || std::abs(pl->theta - theta) > 1e-12)
        throw std::invalid_argument("pohozaev_residual: trajectory family is not power(theta)");
    auto* pp = std::get_if<coefficients::PurePower>(&traj.rhs.f.variant());
    if (!pp || !(Lambda > 0.0) || traj.rhs.s != -1.0 ||
        std::abs(pp->Lambda - Lambda) > 1e-12 || std::abs(pp->p - p) > 1e-12)
        throw std::invalid_argument(
            "pohozaev_residual: identity requires (A-) with f = Lambda|w|^(p-1)w, Lambda>0");

    const double c = Lambda * (0.5 * (theta - 1.0) - (theta + 1.0) / (p + 1.0));
    auto gint = [&](double r) {  // s^theta |w(s)|^(p+1) at dense points
        return std::pow(r, theta) * std::pow(std::abs(traj.eval_w(r)), p + 1.0);
    };

    double acc = 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.nodes.size(); ++i) {
        const auto& A = traj.nodes[i - 1];
        const auto& B = traj.nodes[i];
        if (A.r == 0.0) {
            // power-weight startup panel: w(s) ~ w0 + (w1-w0)(s/r1)^2
            const double g0 = std::pow(std::abs(A.w), p + 1.0);
            const double g1 = std::pow(std::abs(B.w), p + 1.0);
            acc += std::pow(B.r, theta + 1.0) *
                   (g0 / (theta + 1.0) + (g1 - g0) / (theta + 3.0));
        } else {
            const double m = 0.5 * (A.r + B.r);
            acc += (B.r - A.r) / 6.0 * (gint(A.r) + 4.0 * gint(m) + gint(B.r));
        }
        const double Ew =
            0.5 * B.wp * B.wp + Lambda * std::pow(std::abs(B.w), p + 1.0) / (p + 1.0);
        const double lhs = -std::pow(B.r, theta + 1.0) * Ew -
                           0.5 * (theta - 1.0) * std::pow(B.r, theta) * B.w * B.wp;
        const double res = std::abs(lhs - c * acc) / (1.0 + std::abs(lhs));
        worst = std::max(worst, res);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Regime table and observed classification
// ---------------------------------------------------------------------------

enum class SolutionClass {
    oscillatory_stable,
    oscillatory_not_stable,
    positive_monotone_decreasing_stable,
    positive_increasing_blowup,
    constant,
    inconclusive
};

inline const char* class_name(SolutionClass c) {
    switch (c) {
        case SolutionClass::oscillatory_stable: return "oscillatory_stable";
        case SolutionClass::oscillatory_not_stable: return "oscillatory_not_stable";
        case SolutionClass::positive_monotone_decreasing_stable:
            return "positive_monotone_decreasing_stable";
        case SolutionClass::positive_increasing_blowup:
            return "positive_increasing_blowup";
        case SolutionClass::constant: return "constant";
        default: return "inconclusive";
    }
}

inline double regime_threshold(double p) { return (p + 3.0) / (p - 1.0); }

inline SolutionClass predict_class(double theta, double Lambda, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("predict_class: requires p > 1");
    if (Lambda < 0.0) return SolutionClass::positive_increasing_blowup;
    if (theta == 0.0) return SolutionClass::oscillatory_not_stable;
    if (theta < regime_threshold(p)) return SolutionClass::oscillatory_stable;
    return SolutionClass::positive_monotone_decreasing_stable;
}

enum class AmplitudeTrend { decaying, constant, growing };

inline const char* trend_name(AmplitudeTrend t) {
    switch (t) {
        case AmplitudeTrend::decaying: return "decaying";
        case AmplitudeTrend::constant: return "constant";
        default: return "growing";
    }
}

struct QualitativeReport {
    SolutionClass observed = SolutionClass::inconclusive;
    SolutionClass predicted = SolutionClass::inconclusive;
    std::size_t zero_count = 0;
    AmplitudeTrend amplitude_trend = AmplitudeTrend::constant;
    bool agreement = false;
    // evidence
    double envelope_decay_exponent = 0.0;  // fitted sigma in env ~ C r^-sigma
    double envelope_target_r = std::numeric_limits<double>::quiet_NaN();
    // where env reaches 1e-3 |a| per the fit
    double recommended_horizon = 0.0;  // set when inconclusive
};

namespace detail {

// |w| at the critical points (the oscillation envelope)
inline void envelope_points(const Trajectory& traj, std::vector<double>& r,
                            std::vector<double>& env) {
    for (auto& e : traj.events) {
        if (e.kind != singular_ivp::EventKind::critical_point) continue;
        double v = std::abs(traj.eval_w(e.r));
        if (v > 0.0) {
            r.push_back(e.r);
            env.push_back(v);
        }
    }
}

struct DecayFit {
    double sigma = 0.0;    // env ~ C r^-sigma
    double logC = 0.0;
    bool ok = false;
};

inline DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& env) {
    DecayFit out;
    if (r.size() < 3) return out;
    // last half when the envelope is well sampled, everything otherwise
    std::size_t lo = r.size() >= 6 ? r.size() / 2 : 0;
    std::vector<double> x, y;
    for (std::size_t i = lo; i < r.size(); ++i) {
        if (r[i] <= 0.0) continue;
        x.push_back(std::log(r[i]));
        y.push_back(std::log(env[i]));
    }
    if (x.size() < 3) return out;
    LineFit f = fit_line(x, y);
    out.sigma = -f.slope;
    out.logC = f.intercept;
    out.ok = true;
    return out;
}

}  // namespace detail

// "stable" proxy: the fitted envelope decays (sigma above noise) and the fit
// extrapolates below 1e-3 |a| at a finite abscissa.
inline QualitativeReport classify(const Trajectory& traj, double theta, double Lambda,
                                  double p, double a) {
    QualitativeReport rep;
    rep.predicted = predict_class(theta, Lambda, p);
    rep.zero_count = traj.zero_count();

    const double scale = std::max(std::abs(a), 1e-300);
    const double stable_level = 1e-3 * scale;
    const double sigma_min = 0.02;

    // constant (stationary) trajectory
    double dev = 0.0;
    for (auto& n : traj.nodes) dev = std::max(dev, std::abs(n.w - a));
    if (dev <= 1e-10 * std::max(1.0, scale) && rep.zero_count == 0) {
        rep.observed = SolutionClass::constant;
        rep.agreement = rep.observed == rep.predicted;
        return rep;
    }

    if (traj.termination.kind == singular_ivp::TerminationKind::BlowUp) {
        bool increasing = true, positive = true;
        for (auto& n : traj.nodes) {
            if (n.wp < -1e-9 * std::max(1.0, std::abs(n.w))) increasing = false;
            if (n.w < 0.0) positive = false;
        }
        rep.observed = (increasing && positive) ? SolutionClass::positive_increasing_blowup
                                                : SolutionClass::inconclusive;
        rep.amplitude_trend = AmplitudeTrend::growing;
        rep.agreement = rep.observed == rep.predicted;
        return rep;
    }

    std::vector<double> er, ev;
    detail::envelope_points(traj, er, ev);

    if (rep.zero_count >= 3) {
        // oscillatory; stability from the envelope fit
        detail::DecayFit fit = detail::fit_decay(er, ev);
        rep.envelope_decay_exponent = fit.sigma;
        if (!ev.empty()) {
            std::size_t k = std::min<std::size_t>(3, ev.size());
            double head = 0.0, tail = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                head += ev[i] / k;
                tail += ev[ev.size() - 1 - i] / k;
            }
            rep.amplitude_trend = tail < 0.9 * head   ? AmplitudeTrend::decaying
                                  : tail > 1.1 * head ? AmplitudeTrend::growing
                                                      : AmplitudeTrend::constant;
        }
        if (!fit.ok) {
            // oscillation confirmed but too few envelope points to judge the
            // decay: ask for a longer horizon
            rep.observed = SolutionClass::inconclusive;
            rep.recommended_horizon = 2.0 * traj.r_end();
            return rep;
        }
        const bool stable = fit.sigma >= sigma_min;
        if (stable)
            rep.envelope_target_r =
                std::exp((fit.logC - std::log(stable_level)) / fit.sigma);
        rep.observed = stable ? SolutionClass::oscillatory_stable
                              : SolutionClass::oscillatory_not_stable;
        rep.agreement = rep.observed == rep.predicted;
        return rep;
    }

    if (rep.zero_count == 0) {
        bool positive = true, decreasing = true;
        for (auto& n : traj.nodes) {
            if (n.w <= 0.0) positive = false;
            if (n.r > traj.nodes.front().r + 1e-6 &&
                n.wp > 1e-9 * std::max(1.0, std::abs(n.w)))
                decreasing = false;
        }
        // a monotone verdict needs visible, shape-consistent algebraic decay;
        // otherwise the horizon may simply be too short for the first zero
        if (positive && decreasing && traj.nodes.back().w <= 0.2 * scale) {
            std::vector<double> x, y;
            const double r_end = traj.r_end();
            for (auto& n : traj.nodes) {
                if (n.r >= 0.25 * r_end && n.r > 0.0 && n.w > 0.0) {
                    x.push_back(std::log(n.r));
                    y.push_back(std::log(n.w));
                }
            }
            LineFit f = fit_line(x, y);
            const double sigma = -f.slope;
            rep.envelope_decay_exponent = sigma;
            rep.amplitude_trend = AmplitudeTrend::decaying;
            // local decay exponent -r w'/w: bounded for algebraic decay,
            // exploding when the solution is plunging toward a zero
            const auto& last = traj.nodes.back();
            const double mu_end = -last.r * last.wp / std::max(last.w, 1e-300);
            const bool straight = f.rms_residual <= 0.05;
            const bool no_plunge = mu_end <= std::max(3.0, 2.0 * sigma);
            if (sigma >= sigma_min && straight && no_plunge) {
                rep.envelope_target_r =
                    std::exp((f.intercept - std::log(stable_level)) / sigma);
                rep.observed = SolutionClass::positive_monotone_decreasing_stable;
                rep.agreement = rep.observed == rep.predicted;
                return rep;
            }
        }
    }

    rep.observed = SolutionClass::inconclusive;
    rep.recommended_horizon = 2.0 * traj.r_end();
    rep.agreement = false;
    return rep;
}

// Driver with the automatic horizon doubling (at most 3 doublings) on an
// inconclusive verdict.
inline QualitativeReport run_and_classify(SingularIVP problem, double theta,
                                          double Lambda, double p,
                                          const singular_ivp::Settings& st = {},
                                          int max_doublings = 3,
                                          Trajectory* out_traj = nullptr) {
    QualitativeReport rep;
    for (int k = 0; k <= max_doublings; ++k) {
        Trajectory traj = singular_ivp::integrate(problem, st);
        rep = classify(traj, theta, Lambda, p, problem.a);
        if (out_traj) *out_traj = std::move(traj);
        if (rep.observed != SolutionClass::inconclusive) return rep;
        problem.r_max *= 2.0;
    }
    return rep;
}

}  // namespace yamabe::diagnostics

#endif  // YAMABE_DIAGNOSTICS_HPP
