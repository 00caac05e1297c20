#include <gtest/gtest.h>

#include <cmath>

#include "yamabe/shooting.hpp"

using namespace yamabe;
using namespace yamabe::shooting;

namespace {

CompactProblem sphere_problem(double lambda, double p = 2.0) {
    CompactProblem cp;
    cp.ell = 1;
    cp.m = 4;
    cp.n1 = 0;
    cp.n2 = 0;
    cp.lambda = lambda;
    cp.p = p;
    return cp;
}

ShootOptions fast_opts() {
    ShootOptions opt;
    opt.ode.rtol = 1e-10;
    opt.ode.atol = 1e-12;
    return opt;
}

}  // namespace

TEST(CompactProblem, ValidationAndDerivedQuantities) {
    auto cp = sphere_problem(40.0);
    cp.validate();
    EXPECT_DOUBLE_EQ(cp.alpha(), 3.0);
    EXPECT_DOUBLE_EQ(cp.beta(), 0.0);
    EXPECT_EQ(cp.kappa(), 0);
    EXPECT_DOUBLE_EQ(cp.bound_k_zeroes(), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(cp.bound_nodal(), 3.0);
    EXPECT_FALSE(cp.subcritical_k_zeroes());  // p = 2 > 5/3
    EXPECT_TRUE(cp.subcritical_nodal());      // p = 2 < 3
    ASSERT_TRUE(cp.lambda_one().has_value());
    EXPECT_DOUBLE_EQ(*cp.lambda_one(), 4.0);

    auto bad = cp;
    bad.ell = 5;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cp;
    bad.n1 = 1;  // breaks (m-1)(ell-1)/ell = (n1+n2)/2
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cp;
    bad.lambda = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(CompactProblem, QuadraticIsoparametricData) {
    // ell=2 on S^5: n1+n2 = (m-1)(ell-1)*2/ell = 4
    CompactProblem cp;
    cp.ell = 2;
    cp.m = 5;
    cp.n1 = 3;
    cp.n2 = 1;
    cp.lambda = 30.0;
    cp.p = 2.0;
    cp.validate();
    EXPECT_DOUBLE_EQ(cp.alpha(), 2.0);
    EXPECT_DOUBLE_EQ(cp.beta(), 1.0);
    EXPECT_EQ(cp.kappa(), 1);
}

TEST(HalfIntegration, StationaryValues) {
    auto cp = sphere_problem(40.0);
    for (double value : {0.0, 1.0, -1.0}) {
        auto h = integrate_compact_half(cp, HalfStart::zero, value, fast_opts().ode);
        ASSERT_TRUE(h.ok);
        EXPECT_DOUBLE_EQ(h.w_mid, value);
        EXPECT_DOUBLE_EQ(h.wp_mid, 0.0);
        EXPECT_EQ(h.zeros, 0u);
    }
}

TEST(HalfIntegration, FiniteMidpointState) {
    auto cp = sphere_problem(40.0);
    auto h = integrate_compact_half(cp, HalfStart::zero, 3.0, fast_opts().ode);
    ASSERT_TRUE(h.ok);
    EXPECT_TRUE(is_finite(h.w_mid));
    EXPECT_TRUE(is_finite(h.wp_mid));
}

TEST(HalfIntegration, MirroredEndpointStrength) {
    // beta != 0: the two endpoints carry different singular strengths
    CompactProblem cp;
    cp.ell = 2;
    cp.m = 5;
    cp.n1 = 3;
    cp.n2 = 1;
    cp.lambda = 10.0;
    cp.p = 2.0;
    auto h0 = integrate_compact_half(cp, HalfStart::zero, 1.5, fast_opts().ode);
    auto hp = integrate_compact_half(cp, HalfStart::pi, 1.5, fast_opts().ode);
    ASSERT_TRUE(h0.ok);
    ASSERT_TRUE(hp.ok);
    // different Gamma at the two ends -> different curvature at the start,
    // hence different midpoint values
    EXPECT_GT(std::abs(h0.w_mid - hp.w_mid), 1e-6);
}

TEST(Shoot, OneNodalSolution) {
    auto cp = sphere_problem(40.0);
    auto sol = shoot_k_nodal(cp, 1, fast_opts());
    ASSERT_TRUE(sol.found) << sol.message;
    EXPECT_EQ(sol.zero_count, 1u);
    EXPECT_GT(sol.d, 1.0);
    EXPECT_LT(sol.e, -1.0);  // odd parity: w(pi) < -1
    EXPECT_LE(std::abs(sol.defect.value), 1e-6 * std::max(1.0, sol.d));
    EXPECT_LE(std::abs(sol.defect.derivative), 1e-6 * std::max(1.0, sol.d));
    EXPECT_FALSE(sol.subcritical_k_zeroes);
    EXPECT_FALSE(sol.warning.empty());  // soft gate reported
    // endpoint derivatives vanish by the singular-start construction
    EXPECT_DOUBLE_EQ(sol.assembled.nodes.front().wp, 0.0);
    EXPECT_DOUBLE_EQ(sol.assembled.nodes.back().wp, 0.0);
}

TEST(Shoot, TwoNodalParityAndOrdering) {
    auto cp = sphere_problem(40.0);
    auto s1 = shoot_k_nodal(cp, 1, fast_opts());
    auto s2 = shoot_k_nodal(cp, 2, fast_opts());
    ASSERT_TRUE(s1.found) << s1.message;
    ASSERT_TRUE(s2.found) << s2.message;
    EXPECT_EQ(s2.zero_count, 2u);
    EXPECT_GT(s2.e, 1.0);       // even parity: w(pi) > 1
    EXPECT_GT(s2.d, s1.d);      // monotone initial data d_1 < d_2
    EXPECT_GT(std::abs(s2.e), std::abs(s1.e) * 0.99);
}

TEST(Shoot, ZeroCountStableUnderToleranceHalving) {
    auto cp = sphere_problem(40.0);
    auto opt = fast_opts();
    auto s = shoot_k_nodal(cp, 1, opt);
    ASSERT_TRUE(s.found);
    opt.ode.rtol *= 0.5;
    opt.ode.atol *= 0.5;
    auto s_fine = shoot_k_nodal(cp, 1, opt);
    ASSERT_TRUE(s_fine.found);
    EXPECT_EQ(s.zero_count, s_fine.zero_count);
    EXPECT_NEAR(s.d, s_fine.d, 1e-6 * s.d);
}

TEST(Shoot, ReflectionSymmetryForBetaZero) {
    // beta = 0: negating a solution gives a solution; the matching defect of
    // the negated pair stays at the matching level
    auto cp = sphere_problem(40.0);
    auto sol = shoot_k_nodal(cp, 1, fast_opts());
    ASSERT_TRUE(sol.found);
    auto left = integrate_compact_half(cp, HalfStart::zero, -sol.d, fast_opts().ode);
    auto right = integrate_compact_half(cp, HalfStart::pi, -sol.e, fast_opts().ode);
    ASSERT_TRUE(left.ok && right.ok);
    EXPECT_LE(std::abs(left.w_mid - right.w_mid), 1e-6 * std::max(1.0, sol.d));
    EXPECT_LE(std::abs(left.wp_mid - right.wp_mid), 1e-6 * std::max(1.0, sol.d));
}

TEST(Shoot, BelowFirstBifurcationFindsOnlyConstant) {
    auto cp = sphere_problem(3.9);  // below lambda_1 = m/(p-1) = 4
    auto sol = shoot_k_nodal(cp, 0, fast_opts());
    EXPECT_FALSE(sol.found);
    EXPECT_TRUE(sol.constant_solution);
    EXPECT_NE(sol.message.find("no nonconstant"), std::string::npos) << sol.message;
}

TEST(Shoot, TrivialConstantForKZero) {
    auto cp = sphere_problem(40.0);
    auto sol = constant_compact_solution(cp, 1.0);
    EXPECT_TRUE(sol.constant_solution);
    EXPECT_DOUBLE_EQ(sol.defect.value, 0.0);
    EXPECT_DOUBLE_EQ(sol.defect.derivative, 0.0);
    EXPECT_EQ(sol.assembled.zero_count(), 0u);
}

TEST(Glue, ConstantSolutionGluesGlobally) {
    auto cp = sphere_problem(40.0);
    auto glued = glue_entire(cp, constant_compact_solution(cp, 1.0), ImageType::P2);
    EXPECT_EQ(glued.case_tag, "P2.0");
    EXPECT_FALSE(is_finite(glued.R_plus));
    EXPECT_FALSE(is_finite(glued.R_minus));
    EXPECT_TRUE(glued.profile.blowup_ts.empty());
    EXPECT_DOUBLE_EQ(glued.profile.v(0.0), 1.0);
    EXPECT_DOUBLE_EQ(glued.profile.v(5.0), 1.0);
}

TEST(Glue, OddParityProfile) {
    auto cp = sphere_problem(40.0);
    auto mid = shoot_k_nodal(cp, 1, fast_opts());
    ASSERT_TRUE(mid.found);
    GlueOptions gopt;
    gopt.ode = fast_opts().ode;
    auto glued = glue_entire(cp, mid, ImageType::P2, gopt);
    EXPECT_EQ(glued.case_tag, "P2.1");
    EXPECT_EQ(glued.middle_zero_count, 1u);
    EXPECT_EQ(glued.outer_zero_count, 0u);
    EXPECT_TRUE(is_finite(glued.R_plus));
    EXPECT_TRUE(is_finite(glued.R_minus));
    EXPECT_GT(glued.R_plus, 1.0);
    EXPECT_GT(glued.R_minus, 1.0);
    // natural-condition defects within the assembly gate
    EXPECT_LE(glued.natural_plus_defect,
              1e-6 * (1.0 + std::abs(glued.natural_plus_formula)));
    EXPECT_LE(glued.natural_minus_defect,
              1e-6 * (1.0 + std::abs(glued.natural_minus_formula)));
    // odd parity: the left end dives to -infinity
    const auto& left = glued.profile.pieces.front();
    EXPECT_LT(left.sign, 0.0);
    EXPECT_LT(left.sign * left.traj.nodes.back().w, -1e6);
    // value continuity at the junctions by construction
    EXPECT_NEAR(glued.profile.eval(1.0 - 1e-9).v, glued.d,
                1e-6 * (1.0 + std::abs(glued.d)));
    EXPECT_NEAR(glued.profile.eval(-1.0 + 1e-9).v, glued.e,
                1e-6 * (1.0 + std::abs(glued.e)));
}

TEST(Glue, P1AndP3Variants) {
    auto cp = sphere_problem(40.0);
    auto mid = shoot_k_nodal(cp, 1, fast_opts());
    ASSERT_TRUE(mid.found);
    GlueOptions gopt;
    gopt.ode = fast_opts().ode;
    auto p1 = glue_entire(cp, mid, ImageType::P1, gopt);
    EXPECT_EQ(p1.case_tag, "P1.1");
    EXPECT_EQ(p1.profile.pieces.size(), 2u);
    EXPECT_NEAR(p1.profile.t_min(), -1.0, 1e-12);

    auto p3 = glue_entire(cp, mid, ImageType::P3, gopt);
    EXPECT_EQ(p3.case_tag, "P3.1");
    EXPECT_EQ(p3.profile.pieces.size(), 1u);
    // minimum at t = 1, monotone increasing toward the blow-up end
    const double v1 = p3.profile.eval(1.0 + 1e-8).v;
    EXPECT_NEAR(v1, mid.d, 1e-5);
    EXPECT_GT(p3.profile.eval(0.5 * (1.0 + p3.R_plus)).v, v1);
}

TEST(Glue, ParityViolationRejected) {
    auto cp = sphere_problem(40.0);
    auto mid = shoot_k_nodal(cp, 1, fast_opts());
    ASSERT_TRUE(mid.found);
    auto tampered = mid;
    tampered.e = -tampered.e;  // claim even parity data on an odd solution
    EXPECT_THROW(glue_entire(cp, tampered, ImageType::P2), std::invalid_argument);
}
