#ifndef YAMABE_NUMERICS_HPP
#define YAMABE_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace yamabe {

inline bool is_finite(double x) { return std::isfinite(x); }

constexpr double pi_const = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Deterministic RNG.  mt19937_64 with a fixed mapping to doubles so that runs
// are reproducible bit-for-bit regardless of libstdc++'s distribution
// internals.
// ---------------------------------------------------------------------------
class Rng {
public:
    explicit Rng(std::uint64_t seed = default_seed) : s_(seed ? seed : 1) {
        for (int i = 0; i < 8; ++i) next_u64();
    }

    static constexpr std::uint64_t default_seed = 0x5EEDAB1Eull;

    std::uint64_t next_u64() {
        // splitmix64; stable and fast, no library dependence
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal (Box-Muller, deterministic)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi_const * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi_const * u2);
    }

private:
    std::uint64_t s_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

// 5-point Gauss-Legendre on [a,b]
template <class F>
double gauss5(F&& f, double a, double b) {
    static const double x[5] = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                                0.5384693101056830910, 0.9061798459386639928};
    static const double w[5] = {0.2369268850561890875, 0.4786286704993664680,
                                0.5688888888888888889, 0.4786286704993664680,
                                0.2369268850561890875};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
}

// Adaptive Simpson for smooth integrands on [a,b].  The tolerance is relative
// to the local panel magnitude (absolute tolerances stall on integrands whose
// scale varies by many orders of magnitude).
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-12,
                        int depth = 40) {
    auto simpson = [&](double lo, double hi, double flo, double fmid, double fhi) {
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    };
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            double m = 0.5 * (lo + hi);
            double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
            double flm = f(lm), frm = f(rm);
            double left = simpson(lo, m, flo, flm, fmid);
            double right = simpson(m, hi, fmid, frm, fhi);
            double err = left + right - whole;
            double scale = std::abs(left) + std::abs(right) + 1e-300;
            if (d <= 0 || std::abs(err) <= 15.0 * rel_tol * scale)
                return left + right + err / 15.0;
            return rec(lo, m, flo, flm, fmid, left, d - 1) +
                   rec(m, hi, fmid, frm, fhi, right, d - 1);
        };
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), depth);
}

// Integral of f over [a,b] where f behaves like c*(x-a)^gamma (gamma > -1) near
// the endpoint a: dyadic panels toward a with a geometric tail extrapolation.
template <class F>
double integrate_graded_left(F&& f, double a, double b, int levels = 40) {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    double hi = b;
    double prev = 0.0, cur = 0.0;
    for (int j = 0; j < levels; ++j) {
        double lo = a + (b - a) * std::ldexp(1.0, -(j + 1));
        cur = gauss5(f, lo, hi);
        total += cur;
        hi = lo;
        if (j > 2 && std::abs(cur) < 1e-300) break;
        prev = cur;
    }
    // geometric tail: panel integrals of a pure power scale by a constant ratio
    if (prev != 0.0 && cur != 0.0) {
        double ratio = cur / prev;
        if (ratio > 0.0 && ratio < 0.95) total += cur * ratio / (1.0 - ratio);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Root refinement: bisection + secant hybrid on a bracket [lo,hi] with
// f(lo)*f(hi) <= 0.  Returns the refined abscissa.
// ---------------------------------------------------------------------------
template <class F>
double refine_root(F&& f, double lo, double hi, double flo, double fhi,
                   double xtol = 1e-12, int max_iter = 60) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::isnan(flo) || std::isnan(fhi) || flo * fhi > 0.0)
        throw std::invalid_argument("refine_root: not a bracket");
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(b - a) <= xtol) break;
        // secant candidate, fall back to midpoint when outside or stagnant
        double x = b - fb * (b - a) / (fb - fa);
        double mid = 0.5 * (a + b);
        if (!(x > a && x < b)) x = mid;
        if (std::abs(x - a) < 0.01 * (b - a) || std::abs(b - x) < 0.01 * (b - a))
            x = mid;
        double fx = f(x);
        if (fx == 0.0) return x;
        if (fa * fx < 0.0) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    return 0.5 * (a + b);
}

template <class F>
double refine_root(F&& f, double lo, double hi, double xtol = 1e-12, int max_iter = 60) {
    return refine_root(f, lo, hi, f(lo), f(hi), xtol, max_iter);
}

// Golden-section minimizer on [a,b].
template <class F>
double golden_minimize(F&& f, double a, double b, double xtol = 1e-10, int max_iter = 200) {
    const double g = 0.6180339887498948482;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Least-squares line fit y ~= slope*x + intercept; returns rms residual.
// ---------------------------------------------------------------------------
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::size_t n = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit out;
    out.n = x.size();
    if (x.size() != y.size() || x.size() < 2) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0.0) return out;
    out.slope = (n * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (out.slope * x[i] + out.intercept);
        ss += r * r;
    }
    out.rms_residual = std::sqrt(ss / n);
    return out;
}

// Cubic Hermite evaluation on [x0,x1] with values/derivatives at the ends.
inline double hermite_value(double x, double x0, double x1, double y0, double d0,
                            double y1, double d1) {
    const double h = x1 - x0;
    if (h == 0.0) return y0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

inline double hermite_derivative(double x, double x0, double x1, double y0, double d0,
                                 double y1, double d1) {
    const double h = x1 - x0;
    if (h == 0.0) return d0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 +
            (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * d1) / h;
}

// ---------------------------------------------------------------------------
// Index-sliced parallel for.  Results must be written to per-index slots by
// the body; assembly order is by index, never completion order.
// ---------------------------------------------------------------------------
template <class Body>
void parallel_for_index(std::size_t n, unsigned jobs, Body&& body) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (jobs == 0) jobs = hw ? hw : 1;
    jobs = std::min<std::size_t>(jobs, n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += jobs) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace yamabe

#endif  // YAMABE_NUMERICS_HPP
