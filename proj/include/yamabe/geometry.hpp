#ifndef YAMABE_GEOMETRY_HPP
#define YAMABE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "yamabe/numerics.hpp"
#include "yamabe/profile.hpp"

// Isoparametric functions on the semi-Euclidean space R^m_s and on the
// pseudosphere S^m_s, their defining identities, level-set classification,
// and the PDE <-> ODE composition checks.

namespace yamabe::geometry {

// ---------------------------------------------------------------------------
// Ambient points
// ---------------------------------------------------------------------------

struct AmbientPoint {
    std::vector<double> z;
    int s = 0;  // first s coordinates carry metric sign -1

    int dim() const { return int(z.size()); }
};

inline double inner(const AmbientPoint& u, const AmbientPoint& v) {
    if (u.z.size() != v.z.size() || u.s != v.s)
        throw std::invalid_argument("inner: mismatched ambient spaces");
    double acc = 0.0;
    for (int i = 0; i < u.dim(); ++i)
        acc += (i < u.s ? -1.0 : 1.0) * u.z[i] * v.z[i];
    return acc;
}

inline double metric_sign(const AmbientPoint& p, int i) { return i < p.s ? -1.0 : 1.0; }

// ---------------------------------------------------------------------------
// Isoparametric specs
// ---------------------------------------------------------------------------

// phi(z) = 2 <a, z>; level sets are parallel hyperplanes
struct FlatLinear {
    AmbientPoint a;
};

// phi(z) = alpha * ( -sum_{i<=k} t_i^2 + sum_{j<=n} x_j^2 ) on R^m_s
struct FlatQuadratic {
    double alpha = 1.0;
    int k = 0;
    int n = 0;
    int m = 3;
    int s = 1;
};

// phi(z) = sum_{i<=s} (t_i - eps_i x_i)^2 + 2 sum_{j=s+1..s+omega} x_j on R^m_s
struct FlatParabolic {
    std::vector<int> epsilons;  // size s, entries +-1
    int omega = 1;
    int m = 3;
    int s = 1;
};

// phi = <z,Q> restricted to the pseudosphere S^m_s (Q on the pseudosphere)
struct PSLinear {
    AmbientPoint Q;
};

// phi = <Az,z>|_S with A = diag(-1 x k1, +1 x k2), k1+k2 = m+1
struct PSQuadratic {
    int k1 = 3;
    int k2 = 3;
    int s = 1;
};

// Clifford data (degree-4 Cartan-Munzner family): parameter data only, no
// pointwise evaluator (no concrete Clifford system matrices are built).
struct PSCliffordData {
    int k = 4;    // ambient R^{2k}_s, pseudosphere dimension m = 2k-1
    int n_c = 2;  // size of the Clifford system
    double beta() const { return 0.5 * (k + 1 - 2 * n_c); }
    int m1() const { return n_c - 1; }
    int m2() const { return k - n_c; }
};

class IsoparametricSpec {
public:
    using Variant =
        std::variant<FlatLinear, FlatQuadratic, FlatParabolic, PSLinear, PSQuadratic,
                     PSCliffordData>;

    IsoparametricSpec(FlatLinear v) : v_(std::move(v)) {
        auto& a = std::get<FlatLinear>(v_).a;
        double norm = 0.0;
        for (double c : a.z) norm += c * c;
        if (norm == 0.0) throw std::invalid_argument("FlatLinear: direction must be nonzero");
    }
    IsoparametricSpec(FlatQuadratic v) : v_(v) {
        if (v.alpha == 0.0) throw std::invalid_argument("FlatQuadratic: alpha != 0");
        if (v.k < 0 || v.k > v.s || v.n < 0 || v.n > v.m - v.s || v.k + v.n < 1)
            throw std::invalid_argument("FlatQuadratic: need 0<=k<=s, 0<=n<=m-s, k+n>=1");
    }
    IsoparametricSpec(FlatParabolic v) : v_(std::move(v)) {
        auto& p = std::get<FlatParabolic>(v_);
        if (int(p.epsilons.size()) != p.s)
            throw std::invalid_argument("FlatParabolic: epsilons must have length s");
        for (int e : p.epsilons)
            if (e != 1 && e != -1)
                throw std::invalid_argument("FlatParabolic: epsilons must be +-1");
        if (p.omega < 1 || p.omega > p.m - 2 * p.s)
            throw std::invalid_argument("FlatParabolic: need 1 <= omega <= m-2s");
    }
    IsoparametricSpec(PSLinear v) : v_(std::move(v)) {
        auto& q = std::get<PSLinear>(v_).Q;
        if (std::abs(inner(q, q) - 1.0) > 1e-12)
            throw std::invalid_argument("PSLinear: Q must lie on the pseudosphere");
    }
    IsoparametricSpec(PSQuadratic v) : v_(v) {
        if (v.k1 + v.k2 < 4 || v.k1 <= std::max(v.s, 2) || v.k2 <= 2)
            throw std::invalid_argument("PSQuadratic: need k1 > max(s,2) and k2 > 2");
    }
    IsoparametricSpec(PSCliffordData v) : v_(v) {
        if (v.n_c < 1 || v.m1() < 0 || v.m2() < 0)
            throw std::invalid_argument("PSCliffordData: invalid (k, n_c)");
    }

    const Variant& variant() const { return v_; }

    bool is_pseudosphere() const {
        return std::holds_alternative<PSLinear>(v_) ||
               std::holds_alternative<PSQuadratic>(v_) ||
               std::holds_alternative<PSCliffordData>(v_);
    }

    bool has_evaluator() const { return !std::holds_alternative<PSCliffordData>(v_); }

    // number of ambient coordinates
    int ambient_dim() const {
        if (auto* f = std::get_if<FlatLinear>(&v_)) return f->a.dim();
        if (auto* f = std::get_if<FlatQuadratic>(&v_)) return f->m;
        if (auto* f = std::get_if<FlatParabolic>(&v_)) return f->m;
        if (auto* f = std::get_if<PSLinear>(&v_)) return f->Q.dim();
        if (auto* f = std::get_if<PSQuadratic>(&v_)) return f->k1 + f->k2;
        return 2 * std::get_if<PSCliffordData>(&v_)->k;
    }

    int signature() const {
        if (auto* f = std::get_if<FlatLinear>(&v_)) return f->a.s;
        if (auto* f = std::get_if<FlatQuadratic>(&v_)) return f->s;
        if (auto* f = std::get_if<FlatParabolic>(&v_)) return f->s;
        if (auto* f = std::get_if<PSLinear>(&v_)) return f->Q.s;
        if (auto* f = std::get_if<PSQuadratic>(&v_)) return f->s;
        throw std::invalid_argument("PSCliffordData: signature not fixed by the data");
    }

    // hypersurface ambient dimension m: flat specs live in R^m_s, pseudosphere
    // specs restrict to S^m_s inside R^{m+1}_s
    int manifold_dim() const {
        return is_pseudosphere() ? ambient_dim() - 1 : ambient_dim();
    }

    // Cartan-Munzner degree; 0 when the spec is not homogeneous (parabolic)
    int cm_degree() const {
        if (std::holds_alternative<FlatLinear>(v_) || std::holds_alternative<PSLinear>(v_))
            return 1;
        if (std::holds_alternative<FlatQuadratic>(v_) ||
            std::holds_alternative<PSQuadratic>(v_))
            return 2;
        if (std::holds_alternative<PSCliffordData>(v_)) return 4;
        return 0;
    }

    double cm_beta() const {
        if (std::holds_alternative<PSLinear>(v_)) return 0.0;
        if (auto* f = std::get_if<PSQuadratic>(&v_)) return 0.5 * (f->k2 - f->k1);
        if (auto* f = std::get_if<PSCliffordData>(&v_)) return f->beta();
        throw std::invalid_argument("cm_beta: flat specs carry no Cartan-Munzner beta");
    }

    // a(t) with box phi = a(phi)
    double a_coef(double t) const {
        if (std::holds_alternative<FlatLinear>(v_) ||
            std::holds_alternative<FlatParabolic>(v_))
            return 0.0;
        if (auto* f = std::get_if<FlatQuadratic>(&v_))
            return 2.0 * f->alpha * (f->k + f->n);  // 2 tr A
        const int l = cm_degree();
        const int m = manifold_dim();
        return double(l) * l * cm_beta() - double(l) * (m + l - 1) * t;
    }

    // b(t) with <grad phi, grad phi> = b(phi)
    double b_coef(double t) const {
        if (auto* f = std::get_if<FlatLinear>(&v_)) return 4.0 * inner(f->a, f->a);
        if (auto* f = std::get_if<FlatQuadratic>(&v_)) return 4.0 * f->alpha * t;
        if (auto* f = std::get_if<FlatParabolic>(&v_)) return 4.0 * f->omega;
        const int l = cm_degree();
        return double(l) * l * (1.0 - t * t);
    }

    std::string describe() const {
        char buf[160];
        if (auto* f = std::get_if<FlatLinear>(&v_)) {
            std::snprintf(buf, sizeof buf, "flat-linear(m=%d,s=%d)", f->a.dim(), f->a.s);
        } else if (auto* f = std::get_if<FlatQuadratic>(&v_)) {
            std::snprintf(buf, sizeof buf, "flat-quadratic(alpha=%g,k=%d,n=%d,m=%d,s=%d)",
                          f->alpha, f->k, f->n, f->m, f->s);
        } else if (auto* f = std::get_if<FlatParabolic>(&v_)) {
            std::snprintf(buf, sizeof buf, "flat-parabolic(omega=%d,m=%d,s=%d)", f->omega,
                          f->m, f->s);
        } else if (auto* f = std::get_if<PSLinear>(&v_)) {
            std::snprintf(buf, sizeof buf, "ps-linear(m=%d,s=%d)", f->Q.dim() - 1, f->Q.s);
        } else if (auto* f = std::get_if<PSQuadratic>(&v_)) {
            std::snprintf(buf, sizeof buf, "ps-quadratic(k1=%d,k2=%d,s=%d)", f->k1, f->k2,
                          f->s);
        } else {
            auto* cd = std::get_if<PSCliffordData>(&v_);
            std::snprintf(buf, sizeof buf, "ps-clifford(k=%d,n=%d,beta=%g)", cd->k,
                          cd->n_c, cd->beta());
        }
        return buf;
    }

private:
    Variant v_;
};

// ---------------------------------------------------------------------------
// Ambient polynomial Phi and closed-form gradients
// ---------------------------------------------------------------------------

namespace detail {

inline void check_point(const IsoparametricSpec& spec, const AmbientPoint& z) {
    if (!spec.has_evaluator())
        throw std::invalid_argument("PSCliffordData has no pointwise evaluator");
    if (z.dim() != spec.ambient_dim() || z.s != spec.signature())
        throw std::invalid_argument("point does not match the spec's ambient space");
}

}  // namespace detail

// the ambient polynomial (for flat specs this is phi itself)
inline double ambient_poly(const IsoparametricSpec& spec, const AmbientPoint& z) {
    detail::check_point(spec, z);
    if (auto* f = std::get_if<FlatLinear>(&spec.variant())) return 2.0 * inner(f->a, z);
    if (auto* f = std::get_if<FlatQuadratic>(&spec.variant())) {
        double acc = 0.0;
        for (int i = 0; i < f->k; ++i) acc -= z.z[i] * z.z[i];
        for (int j = 0; j < f->n; ++j) acc += z.z[f->s + j] * z.z[f->s + j];
        return f->alpha * acc;
    }
    if (auto* f = std::get_if<FlatParabolic>(&spec.variant())) {
        double acc = 0.0;
        for (int i = 0; i < f->s; ++i) {
            double d = z.z[i] - f->epsilons[i] * z.z[f->s + i];
            acc += d * d;
        }
        for (int j = 0; j < f->omega; ++j) acc += 2.0 * z.z[2 * f->s + j];
        return acc;
    }
    if (auto* f = std::get_if<PSLinear>(&spec.variant())) return inner(z, f->Q);
    auto* f = std::get_if<PSQuadratic>(&spec.variant());
    double acc = 0.0;
    for (int i = 0; i < z.dim(); ++i) {
        double Az = (i < f->k1 ? -1.0 : 1.0) * z.z[i];
        acc += metric_sign(z, i) * Az * z.z[i];
    }
    return acc;
}

// semi-Riemannian gradient (metric-sign-weighted coordinate partials)
inline AmbientPoint ambient_grad(const IsoparametricSpec& spec, const AmbientPoint& z) {
    detail::check_point(spec, z);
    AmbientPoint g{std::vector<double>(z.z.size(), 0.0), z.s};
    if (auto* f = std::get_if<FlatLinear>(&spec.variant())) {
        for (int i = 0; i < z.dim(); ++i) g.z[i] = 2.0 * f->a.z[i];
        return g;
    }
    if (auto* f = std::get_if<FlatQuadratic>(&spec.variant())) {
        for (int i = 0; i < f->k; ++i) g.z[i] = 2.0 * f->alpha * z.z[i];
        for (int j = 0; j < f->n; ++j) g.z[f->s + j] = 2.0 * f->alpha * z.z[f->s + j];
        return g;
    }
    if (auto* f = std::get_if<FlatParabolic>(&spec.variant())) {
        for (int i = 0; i < f->s; ++i) {
            double d = z.z[i] - f->epsilons[i] * z.z[f->s + i];
            g.z[i] = -2.0 * d;                       // eps_time * partial
            g.z[f->s + i] = -2.0 * f->epsilons[i] * d;
        }
        for (int j = 0; j < f->omega; ++j) g.z[2 * f->s + j] = 2.0;
        return g;
    }
    if (auto* f = std::get_if<PSLinear>(&spec.variant())) {
        g.z = f->Q.z;
        return g;
    }
    auto* f = std::get_if<PSQuadratic>(&spec.variant());
    for (int i = 0; i < z.dim(); ++i) g.z[i] = 2.0 * (i < f->k1 ? -1.0 : 1.0) * z.z[i];
    return g;
}

// phi itself: for pseudosphere specs the point must lie on S^m_s
inline double phi_eval(const IsoparametricSpec& spec, const AmbientPoint& z) {
    detail::check_point(spec, z);
    if (spec.is_pseudosphere()) {
        if (std::abs(inner(z, z) - 1.0) > 1e-12)
            throw std::invalid_argument("phi_eval: point not on the pseudosphere");
    }
    return ambient_poly(spec, z);
}

// ---------------------------------------------------------------------------
// Sign calibration of the flat Laplacian: sigma such that
// sigma * sum_i eps_i d^2_i phi = 2 tr A on the quadratic example.
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double raw_fd_laplacian(F&& f, const AmbientPoint& z, double h) {
    AmbientPoint zp = z, zm = z;
    const double f0 = f(z);
    double acc = 0.0;
    for (int i = 0; i < z.dim(); ++i) {
        zp.z[i] = z.z[i] + h;
        zm.z[i] = z.z[i] - h;
        acc += metric_sign(z, i) * (f(zp) - 2.0 * f0 + f(zm)) / (h * h);
        zp.z[i] = z.z[i];
        zm.z[i] = z.z[i];
    }
    return acc;
}

}  // namespace detail

inline int sigma_calibration() {
    static const int sigma = [] {
        IsoparametricSpec spec(FlatQuadratic{1.0, 1, 1, 3, 1});
        AmbientPoint z{{0.3, -0.7, 1.1}, 1};
        double raw = detail::raw_fd_laplacian(
            [&](const AmbientPoint& y) { return ambient_poly(spec, y); }, z, 1e-3);
        const double expected = 2.0 * 1.0 * 2.0;  // 2 tr A, A = diag(1,1,0)
        return raw * expected > 0.0 ? 1 : -1;
    }();
    return sigma;
}

template <class F>
double fd_laplacian(F&& f, const AmbientPoint& z, double h) {
    return sigma_calibration() * detail::raw_fd_laplacian(f, z, h);
}

// ---------------------------------------------------------------------------
// Identity residuals
// ---------------------------------------------------------------------------

struct IdentityResiduals {
    double grad_residual = 0.0;       // |<grad phi, grad phi> - b(phi)| (closed form)
    double laplacian_residual = 0.0;  // |box_fd phi - a(phi)|, O(h^2)
    bool near_focal = false;
};

inline IdentityResiduals identity_residuals(const IsoparametricSpec& spec,
                                            const AmbientPoint& z, double h) {
    detail::check_point(spec, z);
    if (!(h > 0.0)) throw std::invalid_argument("identity_residuals: h must be positive");
    IdentityResiduals out;
    if (!spec.is_pseudosphere()) {
        const double phi = ambient_poly(spec, z);
        AmbientPoint g = ambient_grad(spec, z);
        out.grad_residual = std::abs(inner(g, g) - spec.b_coef(phi));
        double lap = fd_laplacian(
            [&](const AmbientPoint& y) { return ambient_poly(spec, y); }, z, h);
        out.laplacian_residual = std::abs(lap - spec.a_coef(phi));
        // focal proximity: vanishing gradient
        double gn = 0.0;
        for (double c : g.z) gn += c * c;
        out.near_focal = std::sqrt(gn) < h;
        return out;
    }
    // pseudosphere: tangential gradient grad^S = grad^L Phi - <grad^L Phi, z> z
    const double phi = phi_eval(spec, z);
    const int l = spec.cm_degree();
    const int m = spec.manifold_dim();
    AmbientPoint gL = ambient_grad(spec, z);
    const double gz = inner(gL, z);
    AmbientPoint gS = gL;
    for (int i = 0; i < z.dim(); ++i) gS.z[i] -= gz * z.z[i];
    out.grad_residual = std::abs(inner(gS, gS) - double(l) * l * (1.0 - phi * phi));
    // restricted Laplacian from the ambient one: box^S phi = box^L Phi - l(l+m-1) Phi
    double lapL = fd_laplacian(
        [&](const AmbientPoint& y) { return ambient_poly(spec, y); }, z, h);
    const double lapS = lapL - double(l) * (l + m - 1) * phi;
    out.laplacian_residual = std::abs(lapS - spec.a_coef(phi));
    out.near_focal = std::min(std::abs(phi - 1.0), std::abs(phi + 1.0)) < h;
    return out;
}

// Euler identity |<grad^L Phi, z> - l Phi(z)| for the homogeneous variants.
inline double euler_check(const IsoparametricSpec& spec, const AmbientPoint& z) {
    detail::check_point(spec, z);
    const int l = spec.cm_degree();
    if (l == 0)
        throw std::invalid_argument("euler_check: spec polynomial is not homogeneous");
    AmbientPoint g = ambient_grad(spec, z);
    return std::abs(inner(g, z) - double(l) * ambient_poly(spec, z));
}

// Cartan-Munzner defining-equation residuals at an arbitrary ambient point.
struct CmResiduals {
    double grad = 0.0;  // |<grad Phi, grad Phi> - l^2 <z,z>^(l-1)|
    double lap = 0.0;   // |box_fd Phi - l^2 beta <z,z>^((l-2)/2)|
};

inline CmResiduals cm_polynomial_residuals(const IsoparametricSpec& spec,
                                           const AmbientPoint& z, double h) {
    detail::check_point(spec, z);
    if (!spec.is_pseudosphere())
        throw std::invalid_argument("cm_polynomial_residuals: pseudosphere specs only");
    const int l = spec.cm_degree();
    const double zz = inner(z, z);
    CmResiduals out;
    AmbientPoint g = ambient_grad(spec, z);
    out.grad = std::abs(inner(g, g) - double(l) * l * std::pow(zz, l - 1));
    double lap = fd_laplacian(
        [&](const AmbientPoint& y) { return ambient_poly(spec, y); }, z, h);
    out.lap = std::abs(lap - double(l) * l * spec.cm_beta() *
                                 std::pow(zz, 0.5 * (l - 2)));
    return out;
}

// ---------------------------------------------------------------------------
// Level-set descriptors
// ---------------------------------------------------------------------------

enum class FactorKind {
    hyperplane,
    flat,
    sphere,
    pseudosphere,
    pseudohyperbolic,
    nullcone,
    parabolic,
    point
};

struct Factor {
    FactorKind kind = FactorKind::flat;
    int dim = 0;
    int sub_signature = 0;
    double r2 = 0.0;  // squared radius where applicable
    std::vector<int> epsilons;
    int omega = 0;
};

enum class Regularity { regular_hypersurface, focal_variety };

struct LevelSetDescriptor {
    bool empty = false;
    std::vector<Factor> factors;
    Regularity regularity = Regularity::regular_hypersurface;

    std::string to_string() const {
        if (empty) return "EMPTY";
        std::string out;
        char buf[96];
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const Factor& f = factors[i];
            if (i) out += " x ";
            switch (f.kind) {
                case FactorKind::hyperplane:
                    out += "L(hyperplane)";
                    break;
                case FactorKind::flat:
                    std::snprintf(buf, sizeof buf, "R^{%d}_{%d}", f.dim, f.sub_signature);
                    out += buf;
                    break;
                case FactorKind::sphere:
                    std::snprintf(buf, sizeof buf, "S^{%d}(r2=%.12g)", f.dim, f.r2);
                    out += buf;
                    break;
                case FactorKind::pseudosphere:
                    std::snprintf(buf, sizeof buf, "S^{%d}_{%d}(r2=%.12g)", f.dim,
                                  f.sub_signature, f.r2);
                    out += buf;
                    break;
                case FactorKind::pseudohyperbolic:
                    std::snprintf(buf, sizeof buf, "H^{%d}_{%d}(r2=%.12g)", f.dim,
                                  f.sub_signature, f.r2);
                    out += buf;
                    break;
                case FactorKind::nullcone:
                    std::snprintf(buf, sizeof buf, "C^{%d}_{%d}", f.dim, f.sub_signature);
                    out += buf;
                    break;
                case FactorKind::parabolic: {
                    std::string eps;
                    for (int e : f.epsilons) eps += (e > 0 ? "+" : "-");
                    std::snprintf(buf, sizeof buf, "P^{%d}(eps=%s,omega=%d)", f.dim,
                                  eps.c_str(), f.omega);
                    out += buf;
                    break;
                }
                case FactorKind::point:
                    out += "PT";
                    break;
            }
        }
        if (regularity == Regularity::focal_variety) out += " [focal]";
        return out;
    }
};

namespace detail {

inline Factor sphere_like(int dim, int nu, double r2) {
    Factor f;
    f.dim = dim;
    f.sub_signature = nu;
    f.r2 = r2;
    f.kind = nu == 0 ? FactorKind::sphere : FactorKind::pseudosphere;
    return f;
}

inline Factor flat_factor(int dim, int sig) {
    Factor f;
    f.kind = FactorKind::flat;
    f.dim = dim;
    f.sub_signature = sig;
    return f;
}

inline void push_flat_if_nonzero(std::vector<Factor>& fs, int dim, int sig) {
    if (dim > 0) fs.push_back(flat_factor(dim, sig));
}

}  // namespace detail

inline LevelSetDescriptor classify_level_set(const IsoparametricSpec& spec, double c) {
    LevelSetDescriptor d;
    if (auto* f = std::get_if<FlatLinear>(&spec.variant())) {
        (void)f;
        Factor h;
        h.kind = FactorKind::hyperplane;
        h.dim = spec.manifold_dim() - 1;
        d.factors = {h};
        return d;
    }
    if (auto* f = std::get_if<FlatQuadratic>(&spec.variant())) {
        const double ratio = c / f->alpha;
        const int m = f->m, s = f->s, k = f->k, n = f->n;
        if (k == 0) {
            if (ratio < 0.0) {
                d.empty = true;
            } else if (c == 0.0) {
                d.regularity = Regularity::focal_variety;
                d.factors.push_back(Factor{FactorKind::point});
                detail::push_flat_if_nonzero(d.factors, m - n, s);
            } else {
                d.factors.push_back(detail::sphere_like(n - 1, 0, ratio));
                detail::push_flat_if_nonzero(d.factors, m - n, s);
            }
        } else if (n == 0) {
            if (ratio > 0.0) {
                d.empty = true;
            } else if (c == 0.0) {
                d.regularity = Regularity::focal_variety;
                d.factors.push_back(Factor{FactorKind::point});
                detail::push_flat_if_nonzero(d.factors, m - k, s - k);
            } else {
                d.factors.push_back(detail::sphere_like(k - 1, 0, -ratio));
                detail::push_flat_if_nonzero(d.factors, m - k, s - k);
            }
        } else {
            const int dim = k + n - 1;
            if (c == 0.0) {
                d.regularity = Regularity::focal_variety;
                Factor cone;
                cone.kind = FactorKind::nullcone;
                cone.dim = dim;
                cone.sub_signature = k;
                d.factors.push_back(cone);
            } else if (ratio > 0.0) {
                d.factors.push_back(detail::sphere_like(dim, k, ratio));
            } else {
                Factor hf;
                hf.kind = FactorKind::pseudohyperbolic;
                hf.dim = dim;
                hf.sub_signature = k - 1;
                hf.r2 = -ratio;
                d.factors.push_back(hf);
            }
            detail::push_flat_if_nonzero(d.factors, m - (k + n), s - k);
        }
        return d;
    }
    if (auto* f = std::get_if<FlatParabolic>(&spec.variant())) {
        Factor pc;
        pc.kind = FactorKind::parabolic;
        pc.dim = 2 * f->s + f->omega - 1;
        pc.epsilons = f->epsilons;
        pc.omega = f->omega;
        d.factors.push_back(pc);
        detail::push_flat_if_nonzero(d.factors, f->m - 2 * f->s - f->omega, 0);
        return d;
    }
    if (auto* f = std::get_if<PSLinear>(&spec.variant())) {
        const int m = spec.manifold_dim(), s = f->Q.s;
        if (c == 1.0 || c == -1.0) {
            d.regularity = Regularity::focal_variety;
            Factor cone;
            cone.kind = FactorKind::nullcone;
            cone.dim = m - 1;
            cone.sub_signature = s;
            d.factors.push_back(cone);
        } else if (std::abs(c) < 1.0) {
            d.factors.push_back(detail::sphere_like(m - 1, s, 1.0 - c * c));
        } else {
            Factor hf;
            hf.kind = FactorKind::pseudohyperbolic;
            hf.dim = m - 1;
            hf.sub_signature = s - 1;
            hf.r2 = c * c - 1.0;
            d.factors.push_back(hf);
        }
        return d;
    }
    if (auto* f = std::get_if<PSQuadratic>(&spec.variant())) {
        const int s = f->s;
        // Im phi = [-1, infinity); levels in ambient blocks of size k1 / k2
        if (c < -1.0) {
            d.empty = true;
        } else if (c == -1.0) {
            d.regularity = Regularity::focal_variety;
            d.factors.push_back(detail::sphere_like(f->k1 - 1, s, 1.0));
            d.factors.push_back(Factor{FactorKind::point});
        } else if (c < 1.0) {
            d.factors.push_back(detail::sphere_like(f->k1 - 1, s, 0.5 * (1.0 - c)));
            d.factors.push_back(detail::sphere_like(f->k2 - 1, 0, 0.5 * (1.0 + c)));
        } else if (c == 1.0) {
            d.regularity = Regularity::focal_variety;
            Factor cone;
            cone.kind = FactorKind::nullcone;
            cone.dim = f->k1 - 1;
            cone.sub_signature = s;
            d.factors.push_back(cone);
            d.factors.push_back(detail::sphere_like(f->k2 - 1, 0, 1.0));
        } else {
            Factor hf;
            hf.kind = FactorKind::pseudohyperbolic;
            hf.dim = f->k1 - 1;
            hf.sub_signature = s - 1;
            hf.r2 = 0.5 * (c - 1.0);
            d.factors.push_back(hf);
            d.factors.push_back(detail::sphere_like(f->k2 - 1, 0, 0.5 * (1.0 + c)));
        }
        return d;
    }
    throw std::invalid_argument(
        "classify_level_set: Clifford level-set geometry is out of scope (data-only)");
}

// ---------------------------------------------------------------------------
// PDE composition u = v o phi
// ---------------------------------------------------------------------------

struct CompositionResult {
    double u = 0.0;
    double reduction_residual = 0.0;  // |box_fd u - (v'' b(phi) + v' a(phi))|
    double equation_residual = 0.0;   // |box_fd u + Psi(u)|
};

inline CompositionResult pde_compose_and_residual(const IsoparametricSpec& spec,
                                                  const profile::PiecewiseProfile& prof,
                                                  const AmbientPoint& z, double h) {
    detail::check_point(spec, z);
    if (!(h > 0.0)) throw std::invalid_argument("pde_compose_and_residual: h > 0 required");
    const double phi = phi_eval(spec, z);

    // margin checks: inside the profile domain with room for the FD star, and
    // away from any blow-up abscissa
    AmbientPoint g = ambient_grad(spec, z);
    double gnorm = 0.0;
    for (double c : g.z) gnorm += c * c;
    gnorm = std::sqrt(gnorm);
    const double slack = 2.0 * h * (gnorm + 1.0);
    for (double b : prof.blowup_ts) {
        if (std::abs(phi - b) < std::max(0.01 * (1.0 + std::abs(b)), slack)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "pde_compose_and_residual: phi(z)=%.6g too close to the "
                          "blow-up level %.6g",
                          phi, b);
            throw std::invalid_argument(buf);
        }
    }
    if (!prof.contains(phi))
        throw std::invalid_argument("pde_compose_and_residual: phi(z) outside the profile");

    auto phi_ext = [&](const AmbientPoint& y) {
        if (!spec.is_pseudosphere()) return ambient_poly(spec, y);
        const double yy = inner(y, y);
        return ambient_poly(spec, y) / std::pow(yy, 0.5 * spec.cm_degree());
    };
    using Acc = profile::Piece::Accuracy;
    auto u_of = [&](const AmbientPoint& y) {
        return prof.eval_mode(phi_ext(y), Acc::refined).v;
    };

    CompositionResult out;
    profile::PieceValue pv = prof.eval_mode(phi, Acc::refined);
    out.u = pv.v;
    const double box_u = fd_laplacian(u_of, z, h);
    out.reduction_residual =
        std::abs(box_u - (pv.ddv * spec.b_coef(phi) + pv.dv * spec.a_coef(phi)));
    if (prof.psi) out.equation_residual = std::abs(box_u + prof.psi(pv.v));
    return out;
}

// ---------------------------------------------------------------------------
// Level sets of the composed solution u = v o phi
// ---------------------------------------------------------------------------

struct SolutionLevelSets {
    bool degenerate_whole_space = false;  // constant profile at exactly that value
    std::vector<std::pair<double, LevelSetDescriptor>> levels;  // (t root, descriptor)
};

inline SolutionLevelSets solution_level_descriptors(const IsoparametricSpec& spec,
                                                    const profile::PiecewiseProfile& prof,
                                                    double c) {
    SolutionLevelSets out;
    // constant profile at the level -> u == c everywhere
    bool constant = true;
    double v0 = prof.pieces.front().traj.nodes.front().w * prof.pieces.front().sign;
    for (auto& p : prof.pieces)
        for (auto& n : p.traj.nodes)
            if (std::abs(p.sign * n.w - v0) > 1e-12 * std::max(1.0, std::abs(v0)))
                constant = false;
    if (constant && std::abs(v0 - c) <= 1e-12 * std::max(1.0, std::abs(c))) {
        out.degenerate_whole_space = true;
        return out;
    }
    for (double t : prof.solve_v_equals(c))
        out.levels.emplace_back(t, classify_level_set(spec, t));
    return out;
}

// critical set of u: levels where v'(t)=0 plus the focal varieties of the spec
// that the profile's domain reaches
inline SolutionLevelSets solution_critical_descriptors(
    const IsoparametricSpec& spec, const profile::PiecewiseProfile& prof) {
    SolutionLevelSets out;
    for (double t : prof.critical_ts())
        out.levels.emplace_back(t, classify_level_set(spec, t));
    std::vector<double> focal_values;
    if (spec.is_pseudosphere())
        focal_values = {-1.0, 1.0};
    else if (std::holds_alternative<FlatQuadratic>(spec.variant()))
        focal_values = {0.0};
    for (double t : focal_values)
        if (prof.contains(t)) out.levels.emplace_back(t, classify_level_set(spec, t));
    std::sort(out.levels.begin(), out.levels.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic random sampling helpers
// ---------------------------------------------------------------------------

inline AmbientPoint sample_flat_point(Rng& rng, int m, int s, double box = 2.0) {
    AmbientPoint z{std::vector<double>(m), s};
    for (auto& c : z.z) c = rng.uniform(-box, box);
    return z;
}

inline AmbientPoint sample_pseudosphere_point(Rng& rng, int m_plus_1, int s) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        AmbientPoint y{std::vector<double>(m_plus_1), s};
        double e2 = 0.0;
        for (auto& c : y.z) {
            c = rng.gaussian();
            e2 += c * c;
        }
        double q = inner(y, y);
        if (q > 0.2 * e2) {
            const double scale = 1.0 / std::sqrt(q);
            for (auto& c : y.z) c *= scale;
            return y;
        }
    }
    throw std::runtime_error("sample_pseudosphere_point: rejection sampling failed");
}

}  // namespace yamabe::geometry

#endif  // YAMABE_GEOMETRY_HPP
