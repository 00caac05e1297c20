#ifndef YAMABE_PROFILE_HPP
#define YAMABE_PROFILE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "yamabe/singular_ivp.hpp"

// Piecewise profiles v(t) assembled from trajectories w(r) under the variable
// maps used by the entire-solution constructions:
//   identity:  t =  r  /  t = -r
//   square  :  t = r^2 /  t = -r^2
//   cos     :  t = cos r        (compact middle piece, r in [0, pi])
//   cosh    :  t = cosh r / t = -cosh r
// Each piece may carry a sign flip (the negated outer piece of odd-parity
// gluings).

namespace yamabe::profile {

using singular_ivp::Trajectory;

enum class MapKind { identity_pos, identity_neg, square_pos, square_neg, cos_map,
                     cosh_pos, cosh_neg };

struct PieceValue {
    double v = 0.0, dv = 0.0, ddv = 0.0;
};

struct Piece {
    Trajectory traj;
    MapKind map = MapKind::identity_pos;
    double sign = 1.0;

    // r as a function of t, plus dr/dt and d2r/dt2
    double r_of_t(double t) const {
        switch (map) {
            case MapKind::identity_pos: return t;
            case MapKind::identity_neg: return -t;
            case MapKind::square_pos: return std::sqrt(std::max(t, 0.0));
            case MapKind::square_neg: return std::sqrt(std::max(-t, 0.0));
            case MapKind::cos_map: return std::acos(std::min(1.0, std::max(-1.0, t)));
            case MapKind::cosh_pos: return std::acosh(std::max(t, 1.0));
            default: return std::acosh(std::max(-t, 1.0));
        }
    }

    double t_of_r(double r) const {
        switch (map) {
            case MapKind::identity_pos: return r;
            case MapKind::identity_neg: return -r;
            case MapKind::square_pos: return r * r;
            case MapKind::square_neg: return -r * r;
            case MapKind::cos_map: return std::cos(r);
            case MapKind::cosh_pos: return std::cosh(r);
            default: return -std::cosh(r);
        }
    }

    // t-interval covered by the trajectory (lo < hi)
    std::pair<double, double> t_range() const {
        double t0 = t_of_r(traj.r_begin()), t1 = t_of_r(traj.r_end());
        return t0 < t1 ? std::make_pair(t0, t1) : std::make_pair(t1, t0);
    }

    enum class Accuracy { interpolated, refined, fd_second };

    PieceValue eval(double t, bool fd_second = false) const {
        return eval_mode(t, fd_second ? Accuracy::fd_second : Accuracy::interpolated);
    }

    PieceValue eval_mode(double t, Accuracy acc) const {
        const double r = r_of_t(t);
        double drdt, d2rdt2;
        switch (map) {
            case MapKind::identity_pos: drdt = 1.0; d2rdt2 = 0.0; break;
            case MapKind::identity_neg: drdt = -1.0; d2rdt2 = 0.0; break;
            case MapKind::square_pos:
                drdt = 0.5 / r;
                d2rdt2 = -0.25 / (r * r * r);
                break;
            case MapKind::square_neg:
                drdt = -0.5 / r;
                d2rdt2 = -0.25 / (r * r * r);
                break;
            case MapKind::cos_map: {
                const double s = std::sin(r);
                drdt = -1.0 / s;
                d2rdt2 = -std::cos(r) / (s * s * s);
                break;
            }
            case MapKind::cosh_pos: {
                const double s = std::sinh(r);
                drdt = 1.0 / s;
                d2rdt2 = -std::cosh(r) / (s * s * s);
                break;
            }
            default: {
                const double s = std::sinh(r);
                drdt = -1.0 / s;
                d2rdt2 = -std::cosh(r) / (s * s * s);
                break;
            }
        }
        double w, wp, wpp;
        if (acc == Accuracy::refined) {
            singular_ivp::Node n = traj.eval_refined(r);
            w = n.w;
            wp = n.wp;
            wpp = traj.wpp_of(n);
        } else {
            w = traj.eval_w(r);
            wp = traj.eval_wp(r);
            wpp = acc == Accuracy::fd_second
                      ? traj.eval_wpp_fd(r, 1e-3 * (1.0 + std::abs(r)))
                      : traj.eval_wpp_ode(r);
        }
        PieceValue out;
        out.v = sign * w;
        out.dv = sign * wp * drdt;
        out.ddv = sign * (wpp * drdt * drdt + wp * d2rdt2);
        return out;
    }
};

class PiecewiseProfile {
public:
    std::vector<Piece> pieces;  // ordered by increasing t
    // Psi(u): the right-hand side of -box u = Psi(u) for the underlying PDE
    std::function<double(double)> psi;
    // finite endpoints (in t) where |v| -> infinity
    std::vector<double> blowup_ts;

    double t_min() const {
        double lo = std::numeric_limits<double>::infinity();
        for (auto& p : pieces) lo = std::min(lo, p.t_range().first);
        return lo;
    }
    double t_max() const {
        double hi = -std::numeric_limits<double>::infinity();
        for (auto& p : pieces) hi = std::max(hi, p.t_range().second);
        return hi;
    }

    bool contains(double t) const {
        for (auto& p : pieces) {
            auto [lo, hi] = p.t_range();
            if (t >= lo && t <= hi) return true;
        }
        return false;
    }

    double margin_to_blowup(double t) const {
        double m = std::numeric_limits<double>::infinity();
        for (double b : blowup_ts) m = std::min(m, std::abs(t - b));
        return m;
    }

    PieceValue eval(double t, bool fd_second = false) const {
        return eval_mode(t, fd_second ? Piece::Accuracy::fd_second
                                      : Piece::Accuracy::interpolated);
    }

    PieceValue eval_mode(double t, Piece::Accuracy acc) const {
        const Piece* best = nullptr;
        double best_margin = -1.0;
        for (auto& p : pieces) {
            auto [lo, hi] = p.t_range();
            if (t < lo || t > hi) continue;
            double margin = std::min(t - lo, hi - t);
            if (margin > best_margin) {
                best_margin = margin;
                best = &p;
            }
        }
        if (!best) throw std::invalid_argument("PiecewiseProfile: t outside the domain");
        return best->eval_mode(t, acc);
    }

    double v(double t) const { return eval(t).v; }

    // all t in the domain with v(t) = c, by bracketing on the node grids
    std::vector<double> solve_v_equals(double c) const {
        std::vector<double> roots;
        for (auto& p : pieces) {
            const auto& nodes = p.traj.nodes;
            for (std::size_t i = 1; i < nodes.size(); ++i) {
                double g0 = p.sign * nodes[i - 1].w - c;
                double g1 = p.sign * nodes[i].w - c;
                if (g0 == 0.0 && i == 1) roots.push_back(p.t_of_r(nodes[0].r));
                if (g0 * g1 < 0.0 || (g1 == 0.0 && g0 != 0.0)) {
                    double r0 = nodes[i - 1].r, r1 = nodes[i].r;
                    auto f = [&](double r) { return p.sign * p.traj.eval_w(r) - c; };
                    double rz = (g1 == 0.0) ? r1 : refine_root(f, r0, r1, g0, g1, 1e-13);
                    roots.push_back(p.t_of_r(rz));
                }
            }
        }
        std::sort(roots.begin(), roots.end());
        // collapse duplicates at piece junctions
        std::vector<double> out;
        for (double t : roots)
            if (out.empty() || std::abs(t - out.back()) > 1e-9 * (1.0 + std::abs(t)))
                out.push_back(t);
        return out;
    }

    // t-locations where v'(t) = 0 (interior critical points of the profile)
    std::vector<double> critical_ts() const {
        std::vector<double> out;
        for (auto& p : pieces) {
            for (auto& e : p.traj.events) {
                if (e.kind != singular_ivp::EventKind::critical_point) continue;
                out.push_back(p.t_of_r(e.r));
            }
            // an identity-map piece starting at r=0 has v'(0)=0 by construction
            if ((p.map == MapKind::identity_pos || p.map == MapKind::identity_neg) &&
                p.traj.r_begin() == 0.0)
                out.push_back(p.t_of_r(0.0));
        }
        std::sort(out.begin(), out.end());
        std::vector<double> uniq;
        for (double t : out)
            if (uniq.empty() || std::abs(t - uniq.back()) > 1e-9 * (1.0 + std::abs(t)))
                uniq.push_back(t);
        return uniq;
    }
};

}  // namespace yamabe::profile

#endif  // YAMABE_PROFILE_HPP
