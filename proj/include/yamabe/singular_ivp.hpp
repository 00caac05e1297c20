#ifndef YAMABE_SINGULAR_IVP_HPP
#define YAMABE_SINGULAR_IVP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "yamabe/coefficients.hpp"
#include "yamabe/numerics.hpp"

// Singular initial value problems  w'' + q(r) w' = +- f(w),  w(0)=a, w'(0)=0:
// fixed-point start at the singularity, adaptive Dormand-Prince(4,5)
// integration with event detection, and blow-up estimation.

namespace yamabe::singular_ivp {

using coefficients::CoefficientFamily;
using coefficients::Nonlinearity;

enum class Sign { plus, minus };

struct SingularIVP {
    CoefficientFamily family;
    Nonlinearity nl;
    Sign sign = Sign::minus;
    double a = 1.0;       // w(0)
    double r_max = 10.0;  // integration horizon (<= pi for SinRatio)
};

// rhs written as  w'' = s * f(w) - q(r) w'  with the leading coefficient of f
// positive; a PurePower with Lambda < 0 flips the sign instead.
struct EffectiveRhs {
    Nonlinearity f;
    double s = 1.0;
};

inline EffectiveRhs effective_rhs(const Nonlinearity& nl, Sign sign) {
    double s = (sign == Sign::plus) ? 1.0 : -1.0;
    if (auto* pp = std::get_if<coefficients::PurePower>(&nl.variant())) {
        if (pp->Lambda < 0.0)
            return {Nonlinearity(coefficients::PurePower{-pp->Lambda, pp->p}), -s};
    }
    return {nl, s};
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

struct Node {
    double r = 0.0, w = 0.0, wp = 0.0;
};

enum class EventKind { zero, critical_point };

struct Event {
    EventKind kind;
    double r;
};

enum class TerminationKind { ReachedEnd, BlowUp, StepCollapse };

struct Termination {
    TerminationKind kind = TerminationKind::ReachedEnd;
    double R_est = std::numeric_limits<double>::quiet_NaN();
    double fit_exponent = std::numeric_limits<double>::quiet_NaN();
    double r_stop = std::numeric_limits<double>::quiet_NaN();
    bool low_confidence = false;
};

inline const char* termination_name(TerminationKind k) {
    switch (k) {
        case TerminationKind::ReachedEnd: return "ReachedEnd";
        case TerminationKind::BlowUp: return "BlowUp";
        default: return "StepCollapse";
    }
}

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
    // cumulative upward creep of the monotone energy, per unit r
    double energy_drift_per_unit_r = 0.0;
    double energy_range = 0.0;  // max |E - E(0)| over the run
};

class Trajectory {
public:
    std::vector<Node> nodes;
    std::vector<Event> events;
    Termination termination;
    StepStats stats;
    // problem copy so the trajectory is self-contained for dense evaluation
    CoefficientFamily family{coefficients::PowerLaw{0.0}};
    EffectiveRhs rhs{Nonlinearity(coefficients::PurePower{1.0, 2.0}), -1.0};

    double r_begin() const { return nodes.front().r; }
    double r_end() const { return nodes.back().r; }

    std::size_t zero_count() const {
        std::size_t n = 0;
        for (auto& e : events)
            if (e.kind == EventKind::zero) ++n;
        return n;
    }

    std::vector<double> zeros() const {
        std::vector<double> out;
        for (auto& e : events)
            if (e.kind == EventKind::zero) out.push_back(e.r);
        return out;
    }

    std::vector<double> critical_points() const {
        std::vector<double> out;
        for (auto& e : events)
            if (e.kind == EventKind::critical_point) out.push_back(e.r);
        return out;
    }

    // dense evaluation (cubic Hermite between stored nodes)
    double eval_w(double r) const {
        auto [i, j] = segment(r);
        const Node &A = nodes[i], &B = nodes[j];
        return hermite_value(r, A.r, B.r, A.w, A.wp, B.w, B.wp);
    }

    double eval_wp(double r) const {
        auto [i, j] = segment(r);
        const Node &A = nodes[i], &B = nodes[j];
        return hermite_value(r, A.r, B.r, A.wp, wpp_at(A), B.wp, wpp_at(B));
    }

    // w'' from the differential equation at a given state; at a singular
    // endpoint the limit w'' = s f(w) / (1 + Gamma) replaces the indeterminate
    // q w' term
    double wpp_of(const Node& n) const {
        const double lo = family.domain_lo(), hi = family.domain_hi();
        if (n.r > lo && n.r < hi)
            return rhs.s * rhs.f.eval(n.w) - coefficients::q_eval(family, n.r) * n.wp;
        double G = 0.0;
        if (n.r <= lo && family.has_singular_origin())
            G = coefficients::gamma_limit(family, 0.0);
        else if (family.is_sin() && n.r >= hi)
            G = coefficients::gamma_limit(family, pi_const);
        return rhs.s * rhs.f.eval(n.w) / (1.0 + G);
    }

    // w'' from the differential equation at interpolated (w, w')
    double eval_wpp_ode(double r) const {
        Node n{r, eval_w(r), eval_wp(r)};
        return wpp_of(n);
    }

    // w'' by centered finite differences of the dense w' (independent of the
    // equation; used by the residual checks)
    double eval_wpp_fd(double r, double eta) const {
        double lo = std::max(r - eta, r_begin());
        double hi = std::min(r + eta, r_end());
        return (eval_wp(hi) - eval_wp(lo)) / (hi - lo);
    }

    // machine-accurate local evaluation: classic RK4 substeps from the nearest
    // node (used where interpolation noise would pollute finite differences)
    Node eval_refined(double r) const {
        auto [i, j] = segment(r);
        // prefer a start node away from a singular origin
        std::size_t start = (std::abs(nodes[i].r - r) <= std::abs(nodes[j].r - r)) ? i : j;
        if (nodes[start].r == 0.0 && family.has_singular_origin()) start = j;
        if (nodes[start].r == 0.0 && family.has_singular_origin())
            return {r, eval_w(r), eval_wp(r)};
        double rr = nodes[start].r, w = nodes[start].w, wp = nodes[start].wp;
        const int nsub = 6;
        const double dh = (r - rr) / nsub;
        if (dh == 0.0) return {r, w, wp};
        auto fw = [&](double x, double a, double b, double& da, double& db) {
            da = b;
            double q = (x > family.domain_lo() && x < family.domain_hi())
                           ? coefficients::q_eval(family, x)
                           : 0.0;
            db = rhs.s * rhs.f.eval(a) - q * b;
        };
        for (int step = 0; step < nsub; ++step) {
            double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
            fw(rr, w, wp, k1a, k1b);
            fw(rr + 0.5 * dh, w + 0.5 * dh * k1a, wp + 0.5 * dh * k1b, k2a, k2b);
            fw(rr + 0.5 * dh, w + 0.5 * dh * k2a, wp + 0.5 * dh * k2b, k3a, k3b);
            fw(rr + dh, w + dh * k3a, wp + dh * k3b, k4a, k4b);
            w += dh / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
            wp += dh / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
            rr += dh;
        }
        return {r, w, wp};
    }

private:
    double wpp_at(const Node& n) const { return wpp_of(n); }

    std::pair<std::size_t, std::size_t> segment(double r) const {
        if (nodes.size() < 2) return {0, 0};
        if (r <= nodes.front().r) return {0, 1};
        if (r >= nodes.back().r) return {nodes.size() - 2, nodes.size() - 1};
        std::size_t lo = 0, hi = nodes.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (nodes[mid].r <= r)
                lo = mid;
            else
                hi = mid;
        }
        return {lo, hi};
    }
};

// ---------------------------------------------------------------------------
// Picard starter (contraction at the singular endpoint)
// ---------------------------------------------------------------------------

struct PicardRadius {
    double delta = 0.0;     // admissible radius min{delta0/2MN, 1/4CN, T}
    double delta0 = 0.0;    // Lipschitz neighborhood radius
    double M = 0.0;         // bound of |f| on the neighborhood
    double C = 0.0;         // Lipschitz constant of f on the neighborhood
    double N = 0.0;         // (rho1) bound
    double Gamma = 0.0;     // q ~ Gamma / r strength at the singularity
};

inline PicardRadius picard_radius(const SingularIVP& p) {
    if (!p.family.has_singular_origin())
        throw std::invalid_argument("picard_radius: problem has a regular start");
    PicardRadius out;
    EffectiveRhs e = effective_rhs(p.nl, p.sign);
    out.Gamma = coefficients::gamma_limit(p.family, 0.0);
    out.N = coefficients::rho1_bound(p.family);
    out.delta0 = 0.5 * std::max(1.0, std::abs(p.a));
    out.M = coefficients::sup_abs_f(e.f, p.a, out.delta0);
    out.C = coefficients::sup_abs_fprime(e.f, p.a, out.delta0);
    const double T = std::min({1.0, 0.5 * p.family.domain_hi(), p.r_max});
    out.delta = std::min({out.delta0 / (2.0 * out.M * out.N),
                          1.0 / (4.0 * out.C * out.N), T});
    return out;
}

struct PicardResult {
    double w = 0.0;
    double wp = 0.0;
    int iterations = 0;
    double delta = 0.0;
};

namespace detail {

// local cubic Lagrange interpolation on a uniform grid
inline double interp_uniform_cubic(const std::vector<double>& v, double h, double x) {
    const std::size_t n = v.size();
    if (n == 1) return v[0];
    double u = x / h;
    std::ptrdiff_t i = std::ptrdiff_t(std::floor(u)) - 1;
    i = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(i, std::ptrdiff_t(n) - 4));
    if (n < 4) i = 0;
    const std::size_t k = std::min<std::size_t>(3, n - 1);
    double result = 0.0;
    for (std::size_t a = 0; a <= k; ++a) {
        double num = 1.0, den = 1.0;
        const double xa = (i + double(a)) * h;
        for (std::size_t b = 0; b <= k; ++b) {
            if (a == b) continue;
            const double xb = (i + double(b)) * h;
            num *= (x - xb);
            den *= (xa - xb);
        }
        result += v[std::size_t(i) + a] * num / den;
    }
    return result;
}

}  // namespace detail

// Fixed point of  S(v)(t) = a + int_0^t rho(s)^{-1} { int_0^s rho(tau) g(v(tau)) dtau } ds
// evaluated at h, with g = s*f.  Requires h <= picard_radius(p).delta.
inline PicardResult picard_start(const SingularIVP& p, double h) {
    const PicardRadius rad = picard_radius(p);
    if (!(h > 0.0)) throw std::invalid_argument("picard_start: h must be positive");
    if (h > rad.delta) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "picard_start: step h=%.6g exceeds the contraction radius delta=%.6g",
                      h, rad.delta);
        throw std::invalid_argument(buf);
    }
    const EffectiveRhs e = effective_rhs(p.nl, p.sign);
    if (e.f.eval(p.a) == 0.0) {
        // stationary solution w == a; keep it exact (the equilibrium can be
        // unstable, so interpolation dust must not leak into the start state)
        PicardResult out;
        out.w = p.a;
        out.wp = 0.0;
        out.iterations = 1;
        out.delta = rad.delta;
        return out;
    }
    auto rho = [&](double r) { return coefficients::rho_eval(p.family, r); };

    const int n = 24;
    const double dh = h / n;
    std::vector<double> v(n + 1, p.a), vnew(n + 1, p.a), P(n + 1, 0.0), Pp(n + 1, 0.0);
    double prev_diff = std::numeric_limits<double>::infinity();
    const double tol = 1e-14 * std::max(1.0, std::abs(p.a));
    PicardResult out;
    out.delta = rad.delta;

    for (int it = 1; it <= 80; ++it) {
        auto g_of = [&](double tau) {
            return e.s * e.f.eval(detail::interp_uniform_cubic(v, dh, tau));
        };
        // cumulative inner integral I(s_i) = int_0^{s_i} rho * g
        double acc = integrate_graded_left([&](double t) { return rho(t) * g_of(t); },
                                           0.0, dh);
        P[0] = 0.0;
        Pp[0] = g_of(0.0) / (1.0 + rad.Gamma);
        for (int i = 1; i <= n; ++i) {
            if (i > 1)
                acc += gauss5([&](double t) { return rho(t) * g_of(t); }, (i - 1) * dh,
                              i * dh);
            P[i] = acc / rho(i * dh);
            Pp[i] = g_of(i * dh) - coefficients::q_eval(p.family, i * dh) * P[i];
        }
        // outer integral by corrected trapezoid (4th order with P' data)
        vnew[0] = p.a;
        for (int i = 1; i <= n; ++i)
            vnew[i] = vnew[i - 1] + 0.5 * dh * (P[i - 1] + P[i]) +
                      dh * dh / 12.0 * (Pp[i - 1] - Pp[i]);
        double diff = 0.0;
        for (int i = 0; i <= n; ++i) diff = std::max(diff, std::abs(vnew[i] - v[i]));
        v = vnew;
        out.iterations = it;
        if (diff <= tol) break;
        if (it > 3 && diff > prev_diff && diff > 1e-12 * std::max(1.0, std::abs(p.a)))
            throw std::runtime_error(
                "picard_start: successive differences not decreasing (no contraction)");
        prev_diff = diff;
        if (it == 80)
            throw std::runtime_error("picard_start: did not converge in 80 iterations");
    }
    out.w = v[n];
    out.wp = P[n];
    return out;
}

// quadratic (Taylor) starter used as an independent cross-check of the Picard
// handoff:  w(h) = a + s f(a) h^2 / (2(1+Gamma)) + O(h^4)
inline PicardResult series_start(const SingularIVP& p, double h) {
    const EffectiveRhs e = effective_rhs(p.nl, p.sign);
    const double G = coefficients::gamma_limit(p.family, 0.0);
    PicardResult out;
    out.w = p.a + e.s * e.f.eval(p.a) * h * h / (2.0 * (1.0 + G));
    out.wp = e.s * e.f.eval(p.a) * h / (1.0 + G);
    return out;
}

// ---------------------------------------------------------------------------
// Blow-up estimation:  w ~ K (R - r)^(-kappa) fitted on the last decade of
// growth; R optimized by golden section on the fit residual.
// ---------------------------------------------------------------------------

struct BlowupFit {
    double R_est = std::numeric_limits<double>::quiet_NaN();
    double fit_exponent = std::numeric_limits<double>::quiet_NaN();
    bool low_confidence = false;
    std::size_t tail_nodes = 0;
};

inline BlowupFit estimate_blowup_nodes(const std::vector<Node>& nodes) {
    BlowupFit out;
    if (nodes.size() < 4) {
        out.low_confidence = true;
        return out;
    }
    const double w_end = std::abs(nodes.back().w);
    const double r_end = nodes.back().r;
    std::vector<double> rr, ww;
    for (auto& n : nodes) {
        if (std::abs(n.w) >= 0.1 * w_end && std::abs(n.w) > 0.0 && n.r < r_end) {
            rr.push_back(n.r);
            ww.push_back(std::log(std::abs(n.w)));
        }
    }
    out.tail_nodes = rr.size();
    if (rr.size() < 20) out.low_confidence = true;
    if (rr.size() < 4) return out;

    const double span = std::max(r_end - rr.front(), 1e-30);
    auto sse = [&](double lg) {
        const double R = r_end + std::pow(10.0, lg);
        std::vector<double> x(rr.size());
        for (std::size_t i = 0; i < rr.size(); ++i) x[i] = std::log(R - rr[i]);
        return fit_line(x, ww).rms_residual;
    };
    const double lg_lo = std::log10(std::max(1e-18, 1e-6 * (r_end - rr.back() + 1e-300) +
                                                  1e-300));
    const double lg_hi = std::log10(span);
    const double lg = golden_minimize(sse, std::min(lg_lo, lg_hi - 1.0), lg_hi, 1e-12, 300);
    const double R = r_end + std::pow(10.0, lg);
    std::vector<double> x(rr.size());
    for (std::size_t i = 0; i < rr.size(); ++i) x[i] = std::log(R - rr[i]);
    LineFit f = fit_line(x, ww);
    out.R_est = R;
    out.fit_exponent = -f.slope;
    return out;
}

inline BlowupFit estimate_blowup(const Trajectory& traj, const Nonlinearity&) {
    if (traj.termination.kind != TerminationKind::BlowUp)
        throw std::invalid_argument("estimate_blowup: trajectory did not terminate in BlowUp");
    return estimate_blowup_nodes(traj.nodes);
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

struct Settings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double blowup_cap = 1e8;        // |w| threshold, combined with step shrink
    double collapse_step_frac = 1e-13;  // of the span
    double handoff_scale = 1e-3;    // times min(1, r_max)
    std::size_t max_steps = 2'000'000;
    bool skip_hypothesis_check = false;
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct Dp5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

// Which hypotheses gate a given run: the q block and rho1 only for singular
// starts; f1-f3 always.  not_applicable entries never block.
inline std::vector<std::string> required_hypotheses(const SingularIVP& p) {
    std::vector<std::string> req = {"f1", "f2", "f3"};
    if (p.family.has_singular_origin())
        for (auto* k : {"q1", "q2", "q3", "q4", "rho1"}) req.push_back(k);
    return req;
}

inline Trajectory integrate(const SingularIVP& p, const Settings& st = {}) {
    using coefficients::Verdict;
    if (!(p.r_max > 0.0)) throw std::invalid_argument("integrate: r_max must be positive");
    if (p.family.is_sin() && p.r_max > pi_const + 1e-12)
        throw std::invalid_argument("integrate: r_max beyond pi for a SinRatio family");

    const EffectiveRhs rhs = effective_rhs(p.nl, p.sign);
    if (!st.skip_hypothesis_check) {
        auto rep = coefficients::check_hypotheses(p.family, rhs.f, false);
        for (auto& key : required_hypotheses(p)) {
            const auto& e = rep.at(key);
            if (e.verdict == Verdict::fail)
                throw std::invalid_argument("integrate: hypothesis (" + key +
                                            ") fails for this problem");
            if (e.verdict == Verdict::inconclusive)
                throw std::invalid_argument("integrate: hypothesis (" + key +
                                            ") is inconclusive for this problem");
        }
    }

    Trajectory traj;
    traj.family = p.family;
    traj.rhs = rhs;

    auto q_of = [&](double r) {
        return p.family.has_singular_origin() || p.family.is_sin()
                   ? coefficients::q_eval(p.family, r)
                   : 0.0;
    };
    auto f_of = [&](double w) { return rhs.s * rhs.f.eval(w); };
    std::size_t* evals = &traj.stats.rhs_evals;
    auto deriv = [&](double r, double w, double wp, double& dw, double& dwp) {
        ++*evals;
        dw = wp;
        dwp = f_of(w) - q_of(r) * wp;
    };

    // energy that is non-increasing along exact solutions of either sign:
    // 0.5 w'^2 - s F(w)
    auto energy = [&](double w, double wp) {
        return 0.5 * wp * wp - rhs.s * rhs.f.primitive(w);
    };

    double r, w, wp;
    traj.nodes.push_back({0.0, p.a, 0.0});
    if (p.family.has_singular_origin()) {
        const PicardRadius rad = picard_radius(p);
        const double h0 =
            std::min(rad.delta, st.handoff_scale * std::min(1.0, p.r_max));
        PicardResult start = picard_start(p, h0);
        r = h0;
        w = start.w;
        wp = start.wp;
        traj.nodes.push_back({r, w, wp});
    } else {
        r = 0.0;
        w = p.a;
        wp = 0.0;
    }

    const double span = p.r_max;
    const double e0 = energy(p.a, 0.0);
    double e_prev = energy(w, wp), drift = 0.0, e_range = 0.0;

    double h = p.family.has_singular_origin() ? 0.5 * r : 1e-4 * span;
    if (p.family.is_sin()) h = std::min(h, 1e-3);
    double err_prev = 1e-4;
    const double safe = 0.9, beta_pi = 0.04, expo = 0.2 - beta_pi * 0.75;
    bool rejected_last = false;

    auto finish_blowup_or_collapse = [&](double h_now) {
        if (std::abs(w) >= st.blowup_cap) {
            traj.termination.kind = TerminationKind::BlowUp;
            BlowupFit fit = estimate_blowup_nodes(traj.nodes);
            traj.termination.R_est = is_finite(fit.R_est) ? fit.R_est : r;
            traj.termination.fit_exponent = fit.fit_exponent;
            traj.termination.low_confidence = fit.low_confidence;
        } else {
            traj.termination.kind = TerminationKind::StepCollapse;
            traj.termination.r_stop = r;
        }
        (void)h_now;
    };

    double k1w, k1p;
    deriv(r, w, wp, k1w, k1p);

    while (r < p.r_max) {
        if (traj.stats.accepted + traj.stats.rejected > st.max_steps) {
            traj.termination.kind = TerminationKind::StepCollapse;
            traj.termination.r_stop = r;
            break;
        }
        bool last = false;
        if (r + h >= p.r_max) {
            h = p.r_max - r;
            last = true;
            if (h <= 4e-16 * p.r_max) {  // horizon reached to roundoff
                traj.termination.kind = TerminationKind::ReachedEnd;
                break;
            }
        }
        if (h < st.collapse_step_frac * span || r + h == r) {
            finish_blowup_or_collapse(h);
            break;
        }

        using T = detail::Dp5;
        double k2w, k2p, k3w, k3p, k4w, k4p, k5w, k5p, k6w, k6p, k7w, k7p;
        deriv(r + T::c2 * h, w + h * T::a21 * k1w, wp + h * T::a21 * k1p, k2w, k2p);
        deriv(r + T::c3 * h, w + h * (T::a31 * k1w + T::a32 * k2w),
              wp + h * (T::a31 * k1p + T::a32 * k2p), k3w, k3p);
        deriv(r + T::c4 * h, w + h * (T::a41 * k1w + T::a42 * k2w + T::a43 * k3w),
              wp + h * (T::a41 * k1p + T::a42 * k2p + T::a43 * k3p), k4w, k4p);
        deriv(r + T::c5 * h,
              w + h * (T::a51 * k1w + T::a52 * k2w + T::a53 * k3w + T::a54 * k4w),
              wp + h * (T::a51 * k1p + T::a52 * k2p + T::a53 * k3p + T::a54 * k4p), k5w,
              k5p);
        deriv(r + h,
              w + h * (T::a61 * k1w + T::a62 * k2w + T::a63 * k3w + T::a64 * k4w +
                       T::a65 * k5w),
              wp + h * (T::a61 * k1p + T::a62 * k2p + T::a63 * k3p + T::a64 * k4p +
                        T::a65 * k5p),
              k6w, k6p);
        const double wn =
            w + h * (T::b1 * k1w + T::b3 * k3w + T::b4 * k4w + T::b5 * k5w + T::b6 * k6w);
        const double wpn = wp + h * (T::b1 * k1p + T::b3 * k3p + T::b4 * k4p +
                                     T::b5 * k5p + T::b6 * k6p);
        deriv(r + h, wn, wpn, k7w, k7p);  // FSAL

        const double ew = h * (T::e1 * k1w + T::e3 * k3w + T::e4 * k4w + T::e5 * k5w +
                               T::e6 * k6w + T::e7 * k7w);
        const double ep = h * (T::e1 * k1p + T::e3 * k3p + T::e4 * k4p + T::e5 * k5p +
                               T::e6 * k6p + T::e7 * k7p);
        double err = 0.0;
        bool bad = !is_finite(wn) || !is_finite(wpn) || !is_finite(ew) || !is_finite(ep);
        if (!bad) {
            const double skw = st.atol + st.rtol * std::max(std::abs(w), std::abs(wn));
            const double skp = st.atol + st.rtol * std::max(std::abs(wp), std::abs(wpn));
            const double a1 = ew / skw, a2 = ep / skp;
            err = std::sqrt(0.5 * (a1 * a1 + a2 * a2));
        } else {
            err = 1e10;
        }

        if (err <= 1.0) {
            // accepted
            const double r_old = r, w_old = w, wp_old = wp;
            r += h;
            if (last && err <= 1.0) r = p.r_max;  // land exactly
            w = wn;
            wp = wpn;
            traj.stats.accepted++;
            traj.stats.min_step = std::min(traj.stats.min_step, h);
            traj.stats.max_step = std::max(traj.stats.max_step, h);
            traj.nodes.push_back({r, w, wp});

            // events via sign changes on the step, refined on the dense output
            if (w_old * w < 0.0) {
                auto g = [&](double x) {
                    return hermite_value(x, r_old, r, w_old, wp_old, w, wp);
                };
                double rz = refine_root(g, r_old, r, w_old, w, 1e-12);
                traj.events.push_back({EventKind::zero, rz});
            } else if (w == 0.0 && w_old != 0.0) {
                traj.events.push_back({EventKind::zero, r});
            }
            if (wp_old * wp < 0.0) {
                const double d_old = f_of(w_old) - (r_old > 0.0 ? q_of(r_old) : 0.0) * wp_old;
                const double d_new = f_of(w) - q_of(r) * wp;
                auto g = [&](double x) {
                    return hermite_value(x, r_old, r, wp_old, d_old, wp, d_new);
                };
                double rc = refine_root(g, r_old, r, wp_old, wp, 1e-12);
                traj.events.push_back({EventKind::critical_point, rc});
            }

            // energy bookkeeping
            const double e_now = energy(w, wp);
            if (e_now > e_prev) drift += e_now - e_prev;
            e_range = std::max(e_range, std::abs(e_now - e0));
            e_prev = e_now;

            k1w = k7w;
            k1p = k7p;
            // PI step controller
            double fac = safe * std::pow(std::max(err, 1e-10), -expo) *
                         std::pow(err_prev, beta_pi);
            fac = std::min(rejected_last ? 1.0 : 10.0, std::max(0.2, fac));
            h *= fac;
            err_prev = std::max(err, 1e-10);
            rejected_last = false;

            if (std::abs(w) > 1e50) {  // far past the cap; steps are vanishing
                finish_blowup_or_collapse(h);
                break;
            }
            if (r >= p.r_max) {
                traj.termination.kind = TerminationKind::ReachedEnd;
                break;
            }
        } else {
            traj.stats.rejected++;
            double fac = std::max(0.1, safe * std::pow(err, -0.2));
            h *= std::min(1.0, fac);
            rejected_last = true;
        }
    }
    if (traj.nodes.back().r < p.r_max &&
        traj.termination.kind == TerminationKind::ReachedEnd) {
        // loop exhausted without reaching the horizon
        traj.termination.kind = TerminationKind::StepCollapse;
        traj.termination.r_stop = traj.nodes.back().r;
    }
    traj.stats.energy_drift_per_unit_r =
        drift / std::max(traj.nodes.back().r - traj.nodes.front().r, 1e-300);
    traj.stats.energy_range = e_range;
    return traj;
}

}  // namespace yamabe::singular_ivp

#endif  // YAMABE_SINGULAR_IVP_HPP
