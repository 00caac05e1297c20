#include <gtest/gtest.h>

#include <cmath>

#include "yamabe/geometry.hpp"
#include "yamabe/minkowski.hpp"
#include "yamabe/shooting.hpp"

using namespace yamabe;
using namespace yamabe::geometry;

TEST(Ambient, InnerProductSignature) {
    AmbientPoint u{{1.0, 2.0, 3.0}, 1};
    AmbientPoint v{{4.0, 5.0, 6.0}, 1};
    EXPECT_DOUBLE_EQ(inner(u, v), -4.0 + 10.0 + 18.0);
}

TEST(PhiEval, FlatQuadraticArithmetic) {
    IsoparametricSpec spec(FlatQuadratic{1.0, 1, 1, 3, 1});
    AmbientPoint z{{2.0, 3.0, 7.0}, 1};
    EXPECT_DOUBLE_EQ(phi_eval(spec, z), -4.0 + 9.0);
}

TEST(PhiEval, FlatLinearWithTimelikeDirection) {
    // a = (-1, 0, 0): <a,z> = -(-1) t1 = t1, so phi = 2 t1
    IsoparametricSpec spec(FlatLinear{{{-1.0, 0.0, 0.0}, 1}});
    AmbientPoint z{{1.5, 0.3, -0.2}, 1};
    EXPECT_DOUBLE_EQ(phi_eval(spec, z), 3.0);
}

TEST(PhiEval, PSQuadraticOnBasisVector) {
    IsoparametricSpec spec(PSQuadratic{4, 3, 2});
    AmbientPoint z{{0, 0, 0, 0, 0, 0, 1.0}, 2};
    EXPECT_DOUBLE_EQ(phi_eval(spec, z), 1.0);
}

TEST(PhiEval, OffSphereRejectedForPSVariants) {
    IsoparametricSpec spec(PSQuadratic{4, 3, 2});
    AmbientPoint z{{0, 0, 0, 0, 0, 0, 2.0}, 2};
    EXPECT_THROW(phi_eval(spec, z), std::invalid_argument);
}

TEST(PhiEval, CliffordIsDataOnly) {
    IsoparametricSpec spec(PSCliffordData{4, 2});
    AmbientPoint z{{1, 0, 0, 0, 0, 0, 0, 0}, 1};
    EXPECT_THROW(phi_eval(spec, z), std::invalid_argument);
    EXPECT_EQ(spec.cm_degree(), 4);
    EXPECT_DOUBLE_EQ(spec.cm_beta(), 0.5);  // (k+1-2n)/2 = (4+1-4)/2
}

TEST(SigmaCalibration, MatchesTraceConvention) { EXPECT_EQ(sigma_calibration(), 1); }

TEST(IdentityResiduals, FlatQuadraticClosedForm) {
    IsoparametricSpec spec(FlatQuadratic{1.5, 1, 2, 5, 2});
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        AmbientPoint z = sample_flat_point(rng, 5, 2, 1.0);
        auto res = identity_residuals(spec, z, 1e-2);
        EXPECT_LE(res.grad_residual, 1e-12);
        EXPECT_LE(res.laplacian_residual, 1e-9);  // FD exact on quadratics
    }
}

TEST(IdentityResiduals, ParabolicConstantGradientNorm) {
    // omega = 2: b == 4*omega = 8
    IsoparametricSpec spec(FlatParabolic{{1, -1}, 2, 7, 2});
    EXPECT_DOUBLE_EQ(spec.b_coef(0.7), 8.0);
    EXPECT_DOUBLE_EQ(spec.a_coef(0.7), 0.0);
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        AmbientPoint z = sample_flat_point(rng, 7, 2, 1.0);
        auto res = identity_residuals(spec, z, 5e-3);
        EXPECT_LE(res.grad_residual, 1e-12);
        EXPECT_LE(res.laplacian_residual, 1e-9);
    }
}

TEST(IdentityResiduals, PseudosphereRestriction) {
    IsoparametricSpec spec(PSQuadratic{4, 3, 2});
    Rng rng(23);
    for (int i = 0; i < 500; ++i) {
        AmbientPoint z = sample_pseudosphere_point(rng, 7, 2);
        auto res = identity_residuals(spec, z, 1e-4);
        EXPECT_LE(res.grad_residual, 1e-8);
        EXPECT_LE(res.laplacian_residual, 1e-6);
    }
}

TEST(Euler, ExactForLinearTinyForQuadratic) {
    IsoparametricSpec lin(FlatLinear{{{-1.0, 0.5, 0.0, 0.25, 0.0}, 2}});
    IsoparametricSpec quad(FlatQuadratic{2.0, 1, 2, 5, 2});
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
        AmbientPoint z = sample_flat_point(rng, 5, 2, 1.0);
        EXPECT_EQ(euler_check(lin, z), 0.0);
        EXPECT_LE(euler_check(quad, z), 1e-12);
    }
    EXPECT_THROW(euler_check(IsoparametricSpec(FlatParabolic{{1, -1}, 2, 7, 2}),
                             sample_flat_point(rng, 7, 2)),
                 std::invalid_argument);
}

TEST(Euler, CartanMunznerDefiningEquations) {
    // <grad Phi, grad Phi> = 4 <z,z> at arbitrary ambient points (l = 2)
    IsoparametricSpec spec(PSQuadratic{4, 3, 2});
    Rng rng(32);
    for (int i = 0; i < 200; ++i) {
        AmbientPoint z = sample_flat_point(rng, 7, 2, 1.0);
        auto cm = cm_polynomial_residuals(spec, z, 1e-3);
        EXPECT_LE(cm.grad, 1e-12);
        EXPECT_LE(cm.lap, 1e-8);
    }
}

TEST(ClassifyLevelSet, SpecExamples) {
    IsoparametricSpec lin(FlatLinear{{{-1.0, 0, 0, 0, 0}, 2}});
    EXPECT_EQ(classify_level_set(lin, 0.37).to_string(), "L(hyperplane)");

    IsoparametricSpec k0(FlatQuadratic{1.0, 0, 2, 5, 2});
    auto empty = classify_level_set(k0, -1.0);
    EXPECT_TRUE(empty.empty);
    EXPECT_EQ(empty.to_string(), "EMPTY");

    IsoparametricSpec mixed(FlatQuadratic{1.0, 2, 1, 5, 2});
    auto focal = classify_level_set(mixed, 0.0);
    EXPECT_EQ(focal.regularity, Regularity::focal_variety);
    ASSERT_EQ(focal.factors.size(), 2u);
    EXPECT_EQ(focal.factors[0].kind, FactorKind::nullcone);
    EXPECT_EQ(focal.factors[0].dim, 2);
    EXPECT_EQ(focal.factors[0].sub_signature, 2);
    EXPECT_EQ(focal.to_string(), "C^{2}_{2} x R^{2}_{0} [focal]");
}

TEST(ClassifyLevelSet, RegularFactorDimensionsSumToMminus1) {
    // regular level sets of an m-dimensional ambient: dims sum to m-1
    for (int k : {0, 1, 2})
        for (int n : {0, 1, 2, 3}) {
            if (k + n < 1) continue;
            IsoparametricSpec spec(FlatQuadratic{1.0, k, n, 5, 2});
            for (double c : {2.0, -2.0}) {
                auto d = classify_level_set(spec, c);
                if (d.empty) continue;
                int dims = 0;
                for (auto& f : d.factors) dims += f.dim;
                EXPECT_EQ(dims, 4) << "k=" << k << " n=" << n << " c=" << c;
            }
        }
}

TEST(ClassifyLevelSet, CliffordRejected) {
    IsoparametricSpec spec(PSCliffordData{4, 2});
    EXPECT_THROW(classify_level_set(spec, 0.5), std::invalid_argument);
}

namespace {

// a genuine constant profile: the stationary compact solution w == 1
profile::PiecewiseProfile constant_profile() {
    shooting::CompactProblem cp;
    cp.ell = 1;
    cp.m = 4;
    cp.n1 = cp.n2 = 0;
    cp.lambda = 8.0;
    cp.p = 2.0;
    auto mid = shooting::constant_compact_solution(cp, 1.0);
    auto glued = shooting::glue_entire(cp, mid, shooting::ImageType::P2);
    return glued.profile;
}

}  // namespace

TEST(Composition, ConstantProfileHasVanishingResiduals) {
    IsoparametricSpec spec(PSLinear{{{0, 0, 0, 0, 1.0}, 1}});
    auto prof = constant_profile();
    Rng rng(41);
    for (int i = 0; i < 25; ++i) {
        AmbientPoint z = sample_pseudosphere_point(rng, 5, 1);
        auto res = pde_compose_and_residual(spec, prof, z, 1e-3);
        EXPECT_DOUBLE_EQ(res.u, 1.0);
        EXPECT_LE(res.reduction_residual, 1e-9);
        EXPECT_LE(res.equation_residual, 1e-9);
    }
}

TEST(Composition, RejectsPointsNearBlowupLevels) {
    using namespace singular_ivp;
    MinkowskiCaseParams cp;
    cp.A_zero = false;
    cp.gamma = 4.0;
    cp.delta = 0.0;
    cp.k = 1;
    cp.n = 3;
    cp.beta = 8.0;
    cp.mu = -1.0;
    cp.p = 2.0;
    cp.d = 1.0;
    MinkowskiBuildOptions opt;
    opt.horizon = 40.0;
    auto prof = build_minkowski_profile(cp, opt);
    ASSERT_FALSE(prof.profile.blowup_ts.empty());
    const double R = prof.profile.blowup_ts.front();

    IsoparametricSpec spec(FlatQuadratic{1.0, 1, 3, 6, 2});
    // construct a point with phi(z) right at the blow-up level
    AmbientPoint z{{0.0, 0.0, std::sqrt(R), 0.0, 0.0, 0.0}, 2};
    EXPECT_THROW(pde_compose_and_residual(spec, prof.profile, z, 1e-3),
                 std::invalid_argument);
}

TEST(SolutionLevels, ConstantProfileDegenerate) {
    IsoparametricSpec spec(PSLinear{{{0, 0, 0, 0, 1.0}, 1}});
    auto prof = constant_profile();
    auto levels = solution_level_descriptors(spec, prof, 1.0);
    EXPECT_TRUE(levels.degenerate_whole_space);
    auto other = solution_level_descriptors(spec, prof, 0.5);
    EXPECT_FALSE(other.degenerate_whole_space);
    EXPECT_TRUE(other.levels.empty());
}

TEST(SolutionLevels, EvenProfileGivesTwoHyperplanes) {
    using namespace singular_ivp;
    MinkowskiCaseParams cp;
    cp.A_zero = true;
    cp.delta = 1.0;
    cp.mu = -1.0;
    cp.p = 3.0;
    cp.d = 1.0;
    auto prof = build_minkowski_profile(cp);
    IsoparametricSpec spec(FlatLinear{{{0, 1.0, 0, 0, 0}, 2}});
    // a level just below the blow-up: two preimages by evenness
    const double R = prof.profile.blowup_ts.back();
    const double c = prof.profile.v(0.9 * R);
    auto levels = solution_level_descriptors(spec, prof.profile, c);
    ASSERT_EQ(levels.levels.size(), 2u);
    EXPECT_NEAR(levels.levels[0].first, -levels.levels[1].first, 1e-9);
    for (auto& [t, d] : levels.levels)
        EXPECT_EQ(d.to_string(), "L(hyperplane)");
}

TEST(SolutionLevels, OscillatoryNodalSetSpheres) {
    using namespace singular_ivp;
    // M2.2: oscillatory stable side, image [0, infinity)
    MinkowskiCaseParams cp;
    cp.A_zero = false;
    cp.gamma = 4.0;
    cp.delta = 0.0;
    cp.k = 0;
    cp.n = 4;
    cp.beta = 8.0;
    cp.mu = 1.0;
    cp.p = 2.0;
    cp.d = 1.0;
    MinkowskiBuildOptions opt;
    opt.horizon = 30.0;
    auto prof = build_minkowski_profile(cp, opt);
    ASSERT_EQ(prof.case_tag, MinkowskiCase::M2_2);
    IsoparametricSpec spec(FlatQuadratic{1.0, 0, 4, 6, 2});
    auto nodal = solution_level_descriptors(spec, prof.profile, 0.0);
    // nodal set: one sphere-cylinder per zero of the profile
    const std::size_t zero_events = prof.profile.pieces[0].traj.zero_count();
    EXPECT_EQ(nodal.levels.size(), zero_events);
    ASSERT_GE(nodal.levels.size(), 2u);
    for (auto& [t, d] : nodal.levels) {
        ASSERT_EQ(d.factors.size(), 2u);
        EXPECT_EQ(d.factors[0].kind, FactorKind::sphere);
        EXPECT_EQ(d.factors[1].kind, FactorKind::flat);
    }
    // critical descriptors include the focal level t = 0
    auto crit = solution_critical_descriptors(spec, prof.profile);
    bool has_focal = false;
    for (auto& [t, d] : crit.levels)
        if (d.regularity == Regularity::focal_variety) has_focal = true;
    EXPECT_TRUE(has_focal);
}

TEST(Descriptors, RadiusConvention) {
    // regular level of a flat quadratic with k=0: radius^2 = c/alpha exactly
    IsoparametricSpec spec(FlatQuadratic{2.0, 0, 3, 5, 2});
    auto d = classify_level_set(spec, 5.0);
    ASSERT_EQ(d.factors[0].kind, FactorKind::sphere);
    EXPECT_DOUBLE_EQ(d.factors[0].r2, 2.5);
}
