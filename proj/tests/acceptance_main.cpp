// Acceptance suite: one pass/fail line per criterion, exit code 0 iff all
// criteria hold at their stated tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "yamabe/diagnostics.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/minkowski.hpp"
#include "yamabe/shooting.hpp"
#include "yamabe/singular_ivp.hpp"
#include "yamabe/verify.hpp"

using namespace yamabe;

namespace {

int failures = 0;

void report_line(int criterion, const std::string& label, bool pass,
                 const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                label.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void suite_criterion(int criterion, const std::string& label,
                     const verify::SuiteResult& res, double max_seconds = 0.0) {
    std::string detail;
    int failed = 0;
    for (auto& a : res.assertions)
        if (!a.pass) {
            ++failed;
            if (detail.size() < 160) detail += a.name + " ";
        }
    char buf[220];
    bool pass = res.pass();
    if (max_seconds > 0.0 && res.elapsed_seconds > max_seconds) pass = false;
    std::snprintf(buf, sizeof buf, "%zu assertions, %d failed%s%s, %.2fs",
                  res.assertions.size(), failed, detail.empty() ? "" : ": ",
                  detail.c_str(), res.elapsed_seconds);
    report_line(criterion, label, pass, buf);
}

// --- criterion 1: exact-solution regression ---------------------------------
void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    singular_ivp::SingularIVP prob{
        singular_ivp::CoefficientFamily(coefficients::PowerLaw{2.0}),
        singular_ivp::Nonlinearity(coefficients::PurePower{1.0, 5.0}),
        singular_ivp::Sign::minus, 1.0, 10.0};
    singular_ivp::Trajectory traj = singular_ivp::integrate(prob);
    double sup = 0.0;
    for (double r = 0.0; r <= 10.0; r += 0.005) {
        const double exact = 1.0 / std::sqrt(1.0 + r * r / 3.0);
        sup = std::max(sup, std::abs(traj.eval_w(r) - exact));
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "sup-error %.3g (<= 1e-6), runtime %.3fs (< 1s)", sup,
                  secs);
    report_line(1, "exact-solution regression w=(1+r^2/3)^(-1/2)",
                sup <= 1e-6 && secs < 1.0, buf);
}

// --- criterion 3: blow-up ----------------------------------------------------
void criterion3() {
    singular_ivp::SingularIVP prob{
        singular_ivp::CoefficientFamily(
            coefficients::SinhRatio{1.5, 0.5, coefficients::SinhBranch::plus}),
        singular_ivp::Nonlinearity(coefficients::PowerMinusLinear{1.0, 3.0}),
        singular_ivp::Sign::plus, 2.0, 50.0};
    singular_ivp::Settings s8;
    s8.rtol = 1e-8;
    s8.atol = 1e-10;
    singular_ivp::Settings s10;
    s10.rtol = 1e-10;
    s10.atol = 1e-12;
    auto t8 = singular_ivp::integrate(prob, s8);
    auto t10 = singular_ivp::integrate(prob, s10);
    bool blow = t8.termination.kind == singular_ivp::TerminationKind::BlowUp &&
                t10.termination.kind == singular_ivp::TerminationKind::BlowUp;
    bool monotone = true;
    for (auto& n : t10.nodes)
        if (n.wp < -1e-9 * std::max(1.0, std::abs(n.w))) monotone = false;
    const double rel =
        std::abs(t8.termination.R_est - t10.termination.R_est) /
        std::max(1e-300, std::abs(t10.termination.R_est));
    const double kappa = t10.termination.fit_exponent;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "R_est(1e-8)=%.6g R_est(1e-10)=%.6g rel %.2e (<=1%%), kappa %.3f "
                  "(within 15%% of 1), monotone %d",
                  t8.termination.R_est, t10.termination.R_est, rel, kappa, monotone);
    report_line(3, "finite-time blow-up for (A+) on the sinh family",
                blow && monotone && rel <= 0.01 && std::abs(kappa - 1.0) <= 0.15, buf);
}

// --- criterion 6: nodal shooting ---------------------------------------------
void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    shooting::CompactProblem cp;
    cp.ell = 1;
    cp.m = 4;
    cp.n1 = 0;
    cp.n2 = 0;
    cp.lambda = 40.0;
    cp.p = 2.0;
    shooting::ShootOptions opt;
    bool ok = true;
    std::string detail;
    std::vector<double> ds, es;
    for (int k = 1; k <= 3; ++k) {
        auto sol = shoot_k_nodal(cp, k, opt);
        char buf[120];
        if (!sol.found || sol.zero_count != std::size_t(k)) {
            ok = false;
            std::snprintf(buf, sizeof buf, "k=%d failed (%s; zeros=%zu) ", k,
                          sol.message.c_str(), sol.zero_count);
            detail += buf;
            ds.push_back(std::numeric_limits<double>::quiet_NaN());
            es.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        ds.push_back(sol.d);
        es.push_back(sol.e);
        std::snprintf(buf, sizeof buf, "d%d=%.4f e%d=%.4f ", k, sol.d, k, sol.e);
        detail += buf;
        // parity: w_k(pi) > 1 for even k, < -1 for odd k
        if (k % 2 == 1 && !(sol.e < -1.0)) ok = false;
        if (k % 2 == 0 && !(sol.e > 1.0)) ok = false;
    }
    if (ok && !(ds[0] < ds[1] && ds[1] < ds[2])) ok = false;
    if (ok && !(std::abs(es[0]) < std::abs(es[1]) && std::abs(es[1]) < std::abs(es[2])))
        ok = false;

    // below the first bifurcation value lambda_1 = m/(p-1) = 4: constants only
    auto low = cp;
    low.lambda = 3.9;
    auto none = shoot_k_nodal(low, 0, opt);
    if (none.found) {
        ok = false;
        detail += "nonconstant positive solution reported at lambda=3.9 ";
    }
    const double secs = seconds_since(t0);
    if (secs >= 120.0) ok = false;
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime %.1fs (< 120s)", secs);
    report_line(6, "k-nodal shooting for k=1,2,3 and the lambda_1 gate", ok,
                detail + buf);
}

// --- criterion 7: gluing ------------------------------------------------------
double glued_equation_residual(const shooting::CompactProblem& cp,
                               const shooting::GluedSolution& g) {
    // residual of (1-t^2) v'' + [-(m+l-1)/l t + beta] v' + (lambda/l^2)(|v|^(p-1)v - v)
    // with v'' taken from finite differences of the dense derivative
    const double a1 = -(double(cp.m) + cp.ell - 1.0) / cp.ell;
    double worst = 0.0;
    for (const auto& piece : g.profile.pieces) {
        const double r_lo = piece.traj.r_begin() + 0.15;
        double r_hi = piece.traj.r_end() - 0.05;
        if (piece.map == profile::MapKind::cos_map) {
            r_hi = pi_const - 0.15;
        } else {
            // sample the hyperbolic pieces while the solution is moderate
            for (auto& n : piece.traj.nodes)
                if (std::abs(n.w) > 1e3) {
                    r_hi = std::min(r_hi, n.r - 0.01);
                    break;
                }
        }
        for (int i = 0; i < 100; ++i) {
            const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / 100.0;
            const double t = piece.t_of_r(r);
            auto pv = piece.eval(t, /*fd_second=*/true);
            const double term1 = (1.0 - t * t) * pv.ddv;
            const double term2 = (a1 * t + cp.beta()) * pv.dv;
            const double term3 = cp.Lambda() * (std::pow(std::abs(pv.v), cp.p - 1.0) * pv.v - pv.v);
            const double scale =
                1.0 + std::max({std::abs(term1), std::abs(term2), std::abs(term3)});
            worst = std::max(worst, std::abs(term1 + term2 + term3) / scale);
        }
    }
    return worst;
}

void criterion7() {
    shooting::CompactProblem cp;
    cp.ell = 1;
    cp.m = 4;
    cp.n1 = 0;
    cp.n2 = 0;
    cp.lambda = 40.0;
    cp.p = 2.0;
    shooting::ShootOptions opt;
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 2; ++k) {
        auto mid = shoot_k_nodal(cp, k, opt);
        if (!mid.found) {
            ok = false;
            detail += "k=" + std::to_string(k) + " shoot failed ";
            continue;
        }
        shooting::GluedSolution g;
        try {
            g = glue_entire(cp, mid, shooting::ImageType::P2);
        } catch (const std::exception& e) {
            ok = false;
            detail += std::string("glue rejected: ") + e.what();
            continue;
        }
        const double res = glued_equation_residual(cp, g);
        const double nat_p =
            g.natural_plus_defect / (1.0 + std::abs(g.natural_plus_formula));
        const double nat_m =
            g.natural_minus_defect / (1.0 + std::abs(g.natural_minus_formula));
        // far-end parity: +infinity on the right; (-1)^k infinity on the left
        const auto& left = g.profile.pieces.front();
        const double far_left = left.sign * left.traj.nodes.back().w;
        const bool parity_ok =
            (k % 2 == 1) ? far_left < -1e6 : far_left > 1e6;
        char buf[180];
        std::snprintf(buf, sizeof buf,
                      "k=%d: eq-res %.2e, natural(+%.2e,-%.2e), far-end %s; ", k, res,
                      nat_p, nat_m, parity_ok ? "ok" : "wrong");
        detail += buf;
        if (res > 1e-6 || nat_p > 1e-6 || nat_m > 1e-6 || !parity_ok) ok = false;
        if (g.middle_zero_count != std::size_t(k) || g.outer_zero_count != 0) ok = false;
    }
    report_line(7, "glued entire profiles satisfy the t-equation", ok, detail);
}

}  // namespace

int main() {
    std::printf("yamabe acceptance suite\n");
    criterion1();
    suite_criterion(2, "regime-boundary matrix (oscillation iff theta < (p+3)/(p-1))",
                    verify::run_regimes(), 30.0);
    criterion3();
    suite_criterion(4, "energy monotonicity and theta=0 constancy",
                    verify::run_energy());
    suite_criterion(5, "Pohozaev identity residuals", verify::run_pohozaev());
    criterion6();
    criterion7();
    suite_criterion(8, "geometry identities and composition convergence",
                    verify::run_geometry());
    suite_criterion(9, "level-set classifier vs hand-encoded tables",
                    verify::run_tables());
    suite_criterion(10, "hypothesis checker verdicts and witnesses",
                    verify::run_hypotheses());
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
