#ifndef YAMABE_SHOOTING_HPP
#define YAMABE_SHOOTING_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "yamabe/numerics.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/singular_ivp.hpp"

// Double shooting for the compact problem
//   w'' + (h0(r)/sin r) w' + (lambda/l^2) [ |w|^(p-1) w - w ] = 0  on [0, pi],
//   w'(0) = w'(pi) = 0,  h0(r) = ((m-1)/l) cos r - beta,
// and the gluing of compact and hyperbolic pieces into entire profiles on the
// isoparametric image with blow-up ends.

namespace yamabe::shooting {

using singular_ivp::CoefficientFamily;
using singular_ivp::Nonlinearity;
using singular_ivp::Settings;
using singular_ivp::Sign;
using singular_ivp::SingularIVP;
using singular_ivp::Trajectory;

struct CompactProblem {
    int ell = 1;  // in {1,2,3,4,6}
    int m = 3;
    int n1 = 0;
    int n2 = 0;
    double lambda = 1.0;
    double p = 2.0;

    double beta() const { return 0.5 * (n1 - n2); }
    double alpha() const { return double(m - 1) / ell; }
    int kappa() const { return std::min(n1, n2); }
    double Lambda() const { return lambda / double(ell * ell); }

    // two subcritical bounds recorded side by side; the first gates existence
    // in the nodal theorem, the second in the geometric statement
    double bound_k_zeroes() const {
        const int mk = m - kappa();
        return mk - 1 > 0 ? double(mk + 1) / double(mk - 1)
                          : std::numeric_limits<double>::infinity();
    }
    double bound_nodal() const {
        const int mk = m - kappa();
        return mk - 2 > 0 ? double(mk + 2) / double(mk - 2)
                          : std::numeric_limits<double>::infinity();
    }
    bool subcritical_k_zeroes() const { return p < bound_k_zeroes(); }
    bool subcritical_nodal() const { return p < bound_nodal(); }

    // explicit first bifurcation value, available for ell = 1
    std::optional<double> lambda_one() const {
        if (ell == 1) return double(m) / (p - 1.0);
        return std::nullopt;
    }

    void validate() const {
        const bool ell_ok = ell == 1 || ell == 2 || ell == 3 || ell == 4 || ell == 6;
        if (!ell_ok) throw std::invalid_argument("CompactProblem: ell must be 1,2,3,4 or 6");
        if (m < 3) throw std::invalid_argument("CompactProblem: m >= 3");
        if (n1 < 0 || n1 > m - 2 || n2 < 0 || n2 > m - 2)
            throw std::invalid_argument("CompactProblem: n1, n2 in {0,...,m-2}");
        if (2 * (m - 1) * (ell - 1) != ell * (n1 + n2))
            throw std::invalid_argument(
                "CompactProblem: (m-1)(ell-1)/ell = (n1+n2)/2 violated");
        if (!(lambda > 0.0)) throw std::invalid_argument("CompactProblem: lambda > 0");
        if (!(p > 1.0)) throw std::invalid_argument("CompactProblem: p > 1");
        if (!(alpha() - beta() > 0.0 && alpha() + beta() > 0.0))
            throw std::invalid_argument("CompactProblem: (m-1)/ell +- beta must be positive");
    }

    Nonlinearity nonlinearity() const {
        return Nonlinearity(coefficients::PowerMinusLinear{Lambda(), p});
    }
};

// ---------------------------------------------------------------------------
// Half integrations to the matching point pi/2
// ---------------------------------------------------------------------------

enum class HalfStart { zero, pi };

struct HalfResult {
    Trajectory traj;  // local variable: distance from the start endpoint
    HalfStart from = HalfStart::zero;
    bool ok = false;       // reached the midpoint
    double w_mid = 0.0;    // w(pi/2)
    double wp_mid = 0.0;   // dw/dr(pi/2) in the global variable
    std::size_t zeros = 0;
};

inline HalfResult integrate_compact_half(const CompactProblem& cp, HalfStart from,
                                         double value, const Settings& st = {}) {
    cp.validate();
    if (!is_finite(value))
        throw std::invalid_argument("integrate_compact_half: value must be finite");
    const double beta_local = from == HalfStart::zero ? cp.beta() : -cp.beta();
    SingularIVP prob{CoefficientFamily(coefficients::SinRatio{cp.alpha(), beta_local}),
                     cp.nonlinearity(), Sign::minus, value, 0.5 * pi_const};
    HalfResult out;
    out.from = from;
    out.traj = singular_ivp::integrate(prob, st);
    out.ok = out.traj.termination.kind == singular_ivp::TerminationKind::ReachedEnd;
    if (out.ok) {
        const auto& last = out.traj.nodes.back();
        out.w_mid = last.w;
        out.wp_mid = from == HalfStart::zero ? last.wp : -last.wp;
    }
    out.zeros = out.traj.zero_count();
    return out;
}

// ---------------------------------------------------------------------------
// Compact solutions
// ---------------------------------------------------------------------------

struct MatchDefect {
    double value = 0.0;
    double derivative = 0.0;
};

struct CompactSolution {
    bool found = false;
    bool constant_solution = false;
    std::string message;
    int k = 0;
    double d = 1.0;  // w(0)
    double e = 1.0;  // w(pi)
    MatchDefect defect;
    std::size_t zero_count = 0;
    std::vector<double> zeros;  // ascending in (0, pi)
    Trajectory assembled;       // full trajectory on [0, pi] (SinRatio(alpha,beta))
    // recorded subcriticality flags (soft gate; see warning)
    double bound_k_zeroes = 0.0;
    double bound_nodal = 0.0;
    bool subcritical_k_zeroes = false;
    bool subcritical_nodal = false;
    std::string warning;
};

struct ShootOptions {
    double d_max = 100.0;
    int scan_points = 72;
    double match_tol = 1e-9;     // scaled matching tolerance
    double e_max_factor = 3.0;   // right-end magnitudes scanned up to factor*d_max
    Settings ode{};
    unsigned jobs = 0;
};

namespace detail {

// merge the two halves into one trajectory over [0, pi]
inline Trajectory assemble_compact(const CompactProblem& cp, const Trajectory& left,
                                   const Trajectory& right) {
    Trajectory full;
    full.family = CoefficientFamily(coefficients::SinRatio{cp.alpha(), cp.beta()});
    full.rhs = left.rhs;
    full.nodes = left.nodes;
    for (auto it = right.nodes.rbegin(); it != right.nodes.rend(); ++it) {
        double r = pi_const - it->r;
        if (!full.nodes.empty() && r <= full.nodes.back().r + 1e-14) continue;
        full.nodes.push_back({r, it->w, -it->wp});
    }
    full.events = left.events;
    for (auto& e : right.events)
        full.events.push_back({e.kind, pi_const - e.r});
    std::sort(full.events.begin(), full.events.end(),
              [](const singular_ivp::Event& a, const singular_ivp::Event& b) {
                  return a.r < b.r;
              });
    full.termination.kind = singular_ivp::TerminationKind::ReachedEnd;
    return full;
}

// zero certification: sign changes only, no grazing |w| minima
inline bool certify_zero_count(const Trajectory& t, std::size_t expected) {
    if (t.zero_count() != expected) return false;
    auto zs = t.zeros();
    // between consecutive zeros (and before/after), |w| must rise above 1e-8
    // and no unrecorded near-zero local minimum may occur
    std::size_t zi = 0;
    for (std::size_t i = 1; i + 1 < t.nodes.size(); ++i) {
        const double a = std::abs(t.nodes[i - 1].w), b = std::abs(t.nodes[i].w),
                     c = std::abs(t.nodes[i + 1].w);
        if (b <= a && b <= c && b < 1e-8) {
            // local minimum of |w| below threshold: must be a recorded zero
            bool near_recorded = false;
            for (double z : zs)
                if (std::abs(z - t.nodes[i].r) < 1e-4) near_recorded = true;
            if (!near_recorded) return false;
        }
        (void)zi;
    }
    return true;
}

struct InnerMatch {
    bool ok = false;
    double e = 0.0;
    HalfResult right;
};

// given the left state at pi/2, find e on the lattice branch with
// w_R(pi/2; e) = wL_mid by bracketing + hybrid refinement
inline InnerMatch match_right(const CompactProblem& cp, double wL_mid, double e_lo,
                              double e_hi, const Settings& ode) {
    InnerMatch out;
    auto psi = [&](double e) {
        HalfResult h = integrate_compact_half(cp, HalfStart::pi, e, ode);
        if (!h.ok) return std::numeric_limits<double>::quiet_NaN();
        return h.w_mid - wL_mid;
    };
    double f_lo = psi(e_lo), f_hi = psi(e_hi);
    if (!is_finite(f_lo) || !is_finite(f_hi) || f_lo * f_hi > 0.0) return out;
    double e = refine_root(psi, e_lo, e_hi, f_lo, f_hi, 1e-13, 80);
    out.right = integrate_compact_half(cp, HalfStart::pi, e, ode);
    out.ok = out.right.ok;
    out.e = e;
    return out;
}

// continuation solve: track the root of psi(e) = wR_mid(e) - wL_mid nearest to
// the seed by a damped secant (the midpoint map can have many roots in e, so
// global re-bracketing is not an option)
inline InnerMatch match_right_near(const CompactProblem& cp, double wL_mid,
                                   double e_seed, const Settings& ode) {
    InnerMatch out;
    auto psi = [&](double e) {
        HalfResult h = integrate_compact_half(cp, HalfStart::pi, e, ode);
        if (!h.ok) return std::numeric_limits<double>::quiet_NaN();
        return h.w_mid - wL_mid;
    };
    double e0 = e_seed, e1 = e_seed * (1.0 + 1e-5) + (e_seed == 0.0 ? 1e-5 : 0.0);
    double f0 = psi(e0), f1 = psi(e1);
    const double scale = 1.0 + std::abs(wL_mid);
    for (int it = 0; it < 40; ++it) {
        if (!is_finite(f0) || !is_finite(f1)) return out;
        if (std::abs(f1) <= 1e-11 * scale) break;
        if (f1 == f0) return out;
        double step = -f1 * (e1 - e0) / (f1 - f0);
        const double cap = 0.25 * std::max(std::abs(e1), 1.0);
        if (std::abs(step) > cap) step = step > 0 ? cap : -cap;
        e0 = e1;
        f0 = f1;
        e1 += step;
        f1 = psi(e1);
    }
    if (!is_finite(f1) || std::abs(f1) > 1e-9 * scale) return out;
    out.right = integrate_compact_half(cp, HalfStart::pi, e1, ode);
    out.ok = out.right.ok;
    out.e = e1;
    return out;
}

}  // namespace detail

// Constant solution w == value (value in {0, +-1}); defect identically zero.
inline CompactSolution constant_compact_solution(const CompactProblem& cp, double value) {
    CompactSolution out;
    out.found = true;
    out.constant_solution = true;
    out.k = 0;
    out.d = value;
    out.e = value;
    out.message = "constant solution";
    HalfResult l = integrate_compact_half(cp, HalfStart::zero, value);
    HalfResult r = integrate_compact_half(cp, HalfStart::pi, value);
    out.assembled = detail::assemble_compact(cp, l.traj, r.traj);
    out.bound_k_zeroes = cp.bound_k_zeroes();
    out.bound_nodal = cp.bound_nodal();
    out.subcritical_k_zeroes = cp.subcritical_k_zeroes();
    out.subcritical_nodal = cp.subcritical_nodal();
    return out;
}

// Double shooting for a solution with exactly k sign changes in (0, pi).
// k = 0 scans for nonconstant positive solutions; when none exists in range
// the constant solution is returned with found=false semantics in `message`.
inline CompactSolution shoot_k_nodal(const CompactProblem& cp, int k,
                                     const ShootOptions& opt = {}) {
    cp.validate();
    if (k < 0) throw std::invalid_argument("shoot_k_nodal: k must be >= 0");

    CompactSolution out;
    out.k = k;
    out.bound_k_zeroes = cp.bound_k_zeroes();
    out.bound_nodal = cp.bound_nodal();
    out.subcritical_k_zeroes = cp.subcritical_k_zeroes();
    out.subcritical_nodal = cp.subcritical_nodal();
    if (!out.subcritical_k_zeroes)
        out.warning =
            "p >= (m-kappa+1)/(m-kappa-1): the nodal existence theorem does not "
            "guarantee this solution; the scan result is reported as computed";

    const double parity = (k % 2 == 0) ? 1.0 : -1.0;

    // scan lattices
    std::vector<double> d_lattice;
    const int nd = std::max(opt.scan_points, 8);
    if (k >= 1) {
        const double lo = 1.02;
        for (int i = 0; i < nd; ++i)
            d_lattice.push_back(lo * std::pow(opt.d_max / lo, double(i) / (nd - 1)));
    } else {
        // positive solutions: look on both sides of the constant branch
        for (int i = 0; i < nd / 3; ++i)
            d_lattice.push_back(0.05 + (0.93 - 0.05) * double(i) / (nd / 3 - 1));
        const double lo = 1.07;
        for (int i = 0; i < nd; ++i)
            d_lattice.push_back(lo * std::pow(opt.d_max / lo, double(i) / (nd - 1)));
    }

    std::vector<double> e_lattice;  // magnitudes
    {
        const double lo = k >= 1 ? 1.02 : 0.05;
        const double hi = opt.e_max_factor * opt.d_max;
        const int ne = nd + nd / 2;
        for (int i = 0; i < ne; ++i) {
            if (k == 0 && lo < 1.0) {
                // composite lattice below and above 1
                double x = i < ne / 3
                               ? 0.05 + (0.93 - 0.05) * double(i) / (ne / 3 - 1)
                               : 1.07 * std::pow(hi / 1.07,
                                                 double(i - ne / 3) / (ne - ne / 3 - 1));
                e_lattice.push_back(x);
            } else {
                e_lattice.push_back(lo * std::pow(hi / lo, double(i) / (ne - 1)));
            }
        }
    }

    // precompute both tables in parallel
    std::vector<HalfResult> left_tab(d_lattice.size()), right_tab(e_lattice.size());
    parallel_for_index(d_lattice.size(), opt.jobs, [&](std::size_t i) {
        left_tab[i] = integrate_compact_half(cp, HalfStart::zero, d_lattice[i], opt.ode);
    });
    parallel_for_index(e_lattice.size(), opt.jobs, [&](std::size_t j) {
        right_tab[j] =
            integrate_compact_half(cp, HalfStart::pi, parity * e_lattice[j], opt.ode);
    });

    struct Candidate {
        double d, e, g;
        std::size_t k_tot;
    };

    // derivative mismatch of the value-matched pair for a given d
    auto candidates_for = [&](double d, const HalfResult& left) {
        std::vector<Candidate> cands;
        if (!left.ok) return cands;
        for (std::size_t j = 1; j < right_tab.size(); ++j) {
            const HalfResult &A = right_tab[j - 1], &B = right_tab[j];
            if (!A.ok || !B.ok) continue;
            const double fa = A.w_mid - left.w_mid, fb = B.w_mid - left.w_mid;
            if (fa * fb > 0.0) continue;
            detail::InnerMatch m = detail::match_right(
                cp, left.w_mid, parity * e_lattice[j - 1], parity * e_lattice[j], opt.ode);
            if (!m.ok) continue;
            const std::size_t k_tot = left.zeros + m.right.zeros;
            cands.push_back({d, m.e, left.wp_mid - m.right.wp_mid, k_tot});
        }
        return cands;
    };

    std::vector<std::vector<Candidate>> all(d_lattice.size());
    parallel_for_index(d_lattice.size(), opt.jobs, [&](std::size_t i) {
        all[i] = candidates_for(d_lattice[i], left_tab[i]);
    });

    // walk the lattice for a sign change of g along candidates with the right
    // zero count, pairing branches by nearest e
    struct Bracket {
        double d_lo, d_hi, e_lo, e_hi;
    };
    std::vector<Bracket> brackets;
    for (std::size_t i = 1; i < d_lattice.size(); ++i) {
        if (d_lattice[i - 1] > d_lattice[i]) continue;  // lattice seam (k=0 composite)
        for (const auto& c0 : all[i - 1]) {
            if (c0.k_tot != std::size_t(k)) continue;
            if (k == 0 && std::abs(c0.d - 1.0) < 0.05) continue;
            const Candidate* best = nullptr;
            double best_gap = std::numeric_limits<double>::infinity();
            for (const auto& c1 : all[i]) {
                if (c1.k_tot != std::size_t(k)) continue;
                double gap = std::abs(std::log(std::abs(c1.e / c0.e)));
                if (gap < best_gap) {
                    best_gap = gap;
                    best = &c1;
                }
            }
            if (!best || best_gap > 1.0) continue;
            // never bracket across the constant branch d = 1 (its trivial root)
            if (k == 0 && (c0.d - 1.0) * (best->d - 1.0) < 0.0) continue;
            if (k == 0 && std::abs(best->d - 1.0) < 0.05) continue;
            if (c0.g == 0.0 || c0.g * best->g < 0.0)
                brackets.push_back({c0.d, best->d, c0.e, best->e});
        }
    }

    if (brackets.empty()) {
        out.found = false;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "no %s found in scan range d in (%g, %g]",
                      k == 0 ? "nonconstant positive solution" : "k-nodal bracket",
                      k == 0 ? 0.05 : 1.02, opt.d_max);
        out.message = buf;
        if (k == 0) {
            CompactSolution c = constant_compact_solution(cp, 1.0);
            c.found = false;
            c.message = out.message;
            c.warning = out.warning;
            return c;
        }
        return out;
    }

    // refine the first bracket (smallest d): hybrid bisection/secant on g(d)
    const Bracket br = brackets.front();
    double e_seed = br.e_lo;
    bool inner_failed = false;
    auto g_of_d = [&](double d) {
        HalfResult left = integrate_compact_half(cp, HalfStart::zero, d, opt.ode);
        if (!left.ok) {
            inner_failed = true;
            return 0.0;
        }
        detail::InnerMatch m = detail::match_right_near(cp, left.w_mid, e_seed, opt.ode);
        if (!m.ok) {
            inner_failed = true;
            return 0.0;  // forces the hybrid toward bisection; flagged below
        }
        e_seed = m.e;
        return left.wp_mid - m.right.wp_mid;
    };
    double d_star = refine_root(g_of_d, br.d_lo, br.d_hi, 1e-12, 70);
    if (inner_failed) {
        out.found = false;
        out.message = "inner value-match lost its bracket during refinement";
        return out;
    }

    // final 2D damped Newton polish on M(d,e) with finite-difference Jacobian
    double d_cur = d_star, e_cur = e_seed;
    auto mismatch = [&](double d, double e, HalfResult* L = nullptr,
                        HalfResult* R = nullptr) {
        HalfResult left = integrate_compact_half(cp, HalfStart::zero, d, opt.ode);
        HalfResult right = integrate_compact_half(cp, HalfStart::pi, e, opt.ode);
        std::pair<double, double> M{std::numeric_limits<double>::quiet_NaN(),
                                    std::numeric_limits<double>::quiet_NaN()};
        if (left.ok && right.ok)
            M = {left.w_mid - right.w_mid, left.wp_mid - right.wp_mid};
        if (L) *L = left;
        if (R) *R = right;
        return M;
    };
    const double scale_w = std::max(1.0, std::abs(d_cur));
    auto norm_of = [&](std::pair<double, double> M) {
        return std::max(std::abs(M.first) / scale_w, std::abs(M.second) / scale_w);
    };
    HalfResult left_fin, right_fin;
    auto M0 = mismatch(d_cur, e_cur, &left_fin, &right_fin);
    for (int it = 0; it < 30 && is_finite(M0.first) && norm_of(M0) > opt.match_tol; ++it) {
        const double hd = 1e-7 * std::max(1.0, std::abs(d_cur));
        const double he = 1e-7 * std::max(1.0, std::abs(e_cur));
        auto Md = mismatch(d_cur + hd, e_cur);
        auto Me = mismatch(d_cur, e_cur + he);
        const double j11 = (Md.first - M0.first) / hd, j12 = (Me.first - M0.first) / he;
        const double j21 = (Md.second - M0.second) / hd,
                     j22 = (Me.second - M0.second) / he;
        const double det = j11 * j22 - j12 * j21;
        if (!is_finite(det) || std::abs(det) < 1e-30) break;
        const double dd = (-M0.first * j22 + M0.second * j12) / det;
        const double de = (-M0.second * j11 + M0.first * j21) / det;
        double lam = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 8; ++bt, lam *= 0.5) {
            auto Mt = mismatch(d_cur + lam * dd, e_cur + lam * de, &left_fin, &right_fin);
            if (is_finite(Mt.first) && norm_of(Mt) < norm_of(M0)) {
                d_cur += lam * dd;
                e_cur += lam * de;
                M0 = Mt;
                improved = true;
                break;
            }
        }
        if (!improved) break;  // Newton stagnation: keep the bisection result
    }

    out.found = is_finite(M0.first) && norm_of(M0) <= 1e-6;
    out.d = d_cur;
    out.e = e_cur;
    out.defect = {M0.first, M0.second};
    out.assembled = detail::assemble_compact(cp, left_fin.traj, right_fin.traj);
    out.zero_count = out.assembled.zero_count();
    out.zeros = out.assembled.zeros();
    if (k == 0 && out.found) {
        // reject convergence onto the constant branch
        double dev = 0.0;
        for (auto& n : out.assembled.nodes) dev = std::max(dev, std::abs(n.w - 1.0));
        if (dev < 1e-3) {
            CompactSolution c = constant_compact_solution(cp, 1.0);
            c.found = false;
            c.message = "scan converged to the constant solution only";
            c.warning = out.warning;
            return c;
        }
    }
    if (out.found && !detail::certify_zero_count(out.assembled, std::size_t(k))) {
        if (out.zero_count != std::size_t(k)) {
            out.found = false;
            out.message = "matched solution has the wrong zero count";
        } else {
            out.warning += (out.warning.empty() ? "" : "; ");
            out.warning += "grazing |w| minimum below 1e-8 between zeros";
        }
    }
    if (out.found && out.message.empty()) out.message = "ok";
    return out;
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

enum class ImageType { P1, P2, P3 };

inline const char* image_type_name(ImageType t) {
    switch (t) {
        case ImageType::P1: return "P1";
        case ImageType::P2: return "P2";
        default: return "P3";
    }
}

struct GluedSolution {
    ImageType image = ImageType::P2;
    std::string case_tag;  // "P1.k", "P2.k" or "P3.1"
    int k = 0;
    double d = 1.0;
    double e = 1.0;
    profile::PiecewiseProfile profile;
    double R_plus = std::numeric_limits<double>::infinity();
    double R_minus = std::numeric_limits<double>::infinity();
    // natural initial condition checks at t = +-1: the formula value and the
    // worst deviation of the piecewise estimates from it
    double natural_plus_formula = 0.0, natural_plus_defect = 0.0;
    double natural_minus_formula = 0.0, natural_minus_defect = 0.0;
    std::size_t middle_zero_count = 0;
    std::size_t outer_zero_count = 0;
    CompactSolution middle;
};

namespace detail {

// intercept of the least-squares quadratic y = c0 + c1 x + c2 x^2
inline double quadratic_intercept(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
    double S0 = double(xs.size()), S1 = 0, S2 = 0, S3 = 0, S4 = 0, T0 = 0, T1 = 0,
           T2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i], y = ys[i];
        S1 += x;
        S2 += x * x;
        S3 += x * x * x;
        S4 += x * x * x * x;
        T0 += y;
        T1 += x * y;
        T2 += x * x * y;
    }
    const double A[3][3] = {{S0, S1, S2}, {S1, S2, S3}, {S2, S3, S4}};
    const double B[3] = {T0, T1, T2};
    auto det3 = [](const double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    double M0[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) M0[r][c] = c == 0 ? B[r] : A[r][c];
    return det3(M0) / det3(A);
}

// v'(t*) at a singular junction by quadratic extrapolation of v'(t) sampled at
// small radii on the given piece
inline double junction_derivative(const profile::Piece& piece, double t_star) {
    std::vector<double> xs, ys;
    for (double r : {0.002, 0.004, 0.006, 0.008, 0.01}) {
        double rr = piece.traj.r_begin() + r;
        double t = piece.t_of_r(rr);
        profile::PieceValue pv = piece.eval(t);
        xs.push_back(t - t_star);
        ys.push_back(pv.dv);
    }
    return quadratic_intercept(xs, ys);
}

// same extrapolation for the compact middle approached from r = pi
inline double junction_derivative_middle_pi(const Trajectory& mid) {
    std::vector<double> xs, ys;
    for (double u : {0.002, 0.004, 0.006, 0.008, 0.01}) {
        const double r = pi_const - u;
        xs.push_back(std::cos(r) + 1.0);            // t - (-1)
        ys.push_back(-mid.eval_wp(r) / std::sin(r));  // v'(t) = -w'(r)/sin r
    }
    return quadratic_intercept(xs, ys);
}

}  // namespace detail

// natural derivative value at t = +-1 for boundary value `val`
inline double natural_condition(const CompactProblem& cp, double t_pm, double val) {
    const double l = cp.ell;
    const double num = cp.lambda * (std::pow(std::abs(val), cp.p - 1.0) * val - val);
    const double den = l * l * (-(double(cp.m) - 1.0 + l) / l * t_pm + cp.beta());
    return -num / den;
}

struct GlueOptions {
    Settings ode{};
    double hyperbolic_horizon = 50.0;  // r_max for the (A+) pieces
    double natural_tol = 1e-6;         // assembly gate on the derivative match
};

inline GluedSolution glue_entire(const CompactProblem& cp, const CompactSolution& mid,
                                 ImageType image, const GlueOptions& opt = {}) {
    cp.validate();
    if (!mid.found && !mid.constant_solution)
        throw std::invalid_argument("glue_entire: middle compact solution not available");
    using profile::MapKind;
    using profile::Piece;

    GluedSolution out;
    out.image = image;
    out.k = mid.k;
    out.d = mid.d;
    out.e = mid.e;
    out.middle = mid;
    char tag[16];
    if (image == ImageType::P3)
        std::snprintf(tag, sizeof tag, "P3.1");
    else
        std::snprintf(tag, sizeof tag, "%s.%d", image_type_name(image), mid.k);
    out.case_tag = tag;
    out.profile.psi = [lam = cp.lambda, p = cp.p](double u) {
        return lam * (std::pow(std::abs(u), p - 1.0) * u - u);
    };

    const double alpha = cp.alpha(), beta = cp.beta();
    const bool right_constant = std::abs(out.d - 1.0) < 1e-12 || std::abs(out.d) < 1e-12;

    // right piece: w'' + (h_+/sinh) w' = f(w), h_+ = alpha cosh - beta
    SingularIVP right_prob{
        CoefficientFamily(coefficients::SinhRatio{alpha, beta,
                                                  coefficients::SinhBranch::minus}),
        cp.nonlinearity(), Sign::plus, out.d, opt.hyperbolic_horizon};
    const Settings& st = opt.ode;
    Trajectory right = singular_ivp::integrate(right_prob, st);
    if (right.termination.kind == singular_ivp::TerminationKind::BlowUp)
        out.R_plus = std::cosh(right.termination.R_est);
    Piece right_piece{right, MapKind::cosh_pos, 1.0};
    out.outer_zero_count = right.zero_count();

    // middle piece under t = cos r (not for P3)
    Piece middle_piece{mid.assembled, MapKind::cos_map, 1.0};
    out.middle_zero_count = mid.assembled.zero_count();

    // left piece (P2 only): sign (-1)^k, initial value |e|, family h_-
    Piece left_piece;
    if (image == ImageType::P2) {
        const double sigma = (mid.k % 2 == 0) ? 1.0 : -1.0;
        if (sigma * out.e < 0.0)
            throw std::invalid_argument("glue_entire: parity of w(pi) violates (-1)^k");
        SingularIVP left_prob{
            CoefficientFamily(coefficients::SinhRatio{alpha, beta,
                                                      coefficients::SinhBranch::plus}),
            cp.nonlinearity(), Sign::plus, std::abs(out.e), opt.hyperbolic_horizon};
        Trajectory left = singular_ivp::integrate(left_prob, st);
        if (left.termination.kind == singular_ivp::TerminationKind::BlowUp)
            out.R_minus = std::cosh(left.termination.R_est);
        left_piece = Piece{left, MapKind::cosh_neg, sigma};
        out.outer_zero_count += left.zero_count();
    }

    switch (image) {
        case ImageType::P1:
            out.profile.pieces = {middle_piece, right_piece};
            break;
        case ImageType::P2:
            out.profile.pieces = {left_piece, middle_piece, right_piece};
            break;
        case ImageType::P3:
            out.profile.pieces = {right_piece};
            break;
    }
    if (is_finite(out.R_plus)) out.profile.blowup_ts.push_back(out.R_plus);
    if (image == ImageType::P2 && is_finite(out.R_minus))
        out.profile.blowup_ts.push_back(-out.R_minus);

    // natural-condition verification at the junctions
    out.natural_plus_formula = natural_condition(cp, +1.0, out.d);
    double worst_plus = 0.0;
    if (!right_constant) {
        worst_plus = std::max(
            worst_plus, std::abs(detail::junction_derivative(right_piece, 1.0) -
                                 out.natural_plus_formula));
    }
    if (image != ImageType::P3 && !mid.constant_solution) {
        worst_plus = std::max(
            worst_plus, std::abs(detail::junction_derivative(middle_piece, 1.0) -
                                 out.natural_plus_formula));
    }
    out.natural_plus_defect = worst_plus;

    if (image == ImageType::P2) {
        out.natural_minus_formula = natural_condition(cp, -1.0, out.e);
        double worst_minus = 0.0;
        if (!mid.constant_solution) {
            worst_minus = std::max(
                worst_minus, std::abs(detail::junction_derivative_middle_pi(mid.assembled) -
                                      out.natural_minus_formula));
        }
        const bool left_constant =
            std::abs(std::abs(out.e) - 1.0) < 1e-12 || std::abs(out.e) < 1e-12;
        if (!left_constant) {
            worst_minus = std::max(
                worst_minus, std::abs(detail::junction_derivative(out.profile.pieces[0],
                                                                  -1.0) -
                                      out.natural_minus_formula));
        }
        out.natural_minus_defect = worst_minus;
    }

    const double gate_plus =
        opt.natural_tol * (1.0 + std::abs(out.natural_plus_formula));
    const double gate_minus =
        opt.natural_tol * (1.0 + std::abs(out.natural_minus_formula));
    if (out.natural_plus_defect > gate_plus || out.natural_minus_defect > gate_minus) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "glue_entire: natural-condition mismatch (t=+1: defect %.3g vs "
                      "formula %.6g; t=-1: defect %.3g vs formula %.6g)",
                      out.natural_plus_defect, out.natural_plus_formula,
                      out.natural_minus_defect, out.natural_minus_formula);
        throw std::runtime_error(buf);
    }
    return out;
}

}  // namespace yamabe::shooting

#endif  // YAMABE_SHOOTING_HPP
