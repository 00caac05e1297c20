#include <gtest/gtest.h>

#include <cmath>

#include "yamabe/diagnostics.hpp"

using namespace yamabe;
using namespace yamabe::diagnostics;
using namespace yamabe::singular_ivp;
using coefficients::PowerLaw;
using coefficients::PowerMinusLinear;
using coefficients::PurePower;

namespace {

Trajectory run_power(double theta, double Lambda, double p, double a, double rmax,
                     double rtol = 1e-10) {
    SingularIVP prob{CoefficientFamily(PowerLaw{theta}),
                     Nonlinearity(PurePower{Lambda, p}), Sign::minus, a, rmax};
    Settings st;
    st.rtol = rtol;
    st.atol = rtol * 1e-2;
    return integrate(prob, st);
}

}  // namespace

TEST(Energy, ConstantForThetaZero) {
    SingularIVP prob{CoefficientFamily(PowerLaw{0.0}),
                     Nonlinearity(PurePower{1.0, 3.0}), Sign::minus, 1.0, 200.0};
    Settings st;
    st.rtol = 1e-12;
    st.atol = 3e-14;
    Trajectory traj = integrate(prob, st);
    auto rep = energy(traj, prob.nl, prob.sign);
    EXPECT_LE(rep.max_deviation, 1e-10);
    EXPECT_TRUE(rep.non_increasing);
}

TEST(Energy, StrictlyDecreasingForAubinTalenti) {
    Trajectory traj = run_power(2.0, 1.0, 5.0, 1.0, 10.0, 1e-11);
    auto rep = energy(traj, traj.rhs.f, Sign::minus);
    EXPECT_LE(rep.drift_per_unit_r, 1e-9);
    // strict decrease over macroscopic spans
    EXPECT_LT(rep.E.back(), rep.E.front() - 1e-3);
}

TEST(Energy, ConstantTrajectoryPinnedAtPrimitiveValue) {
    SingularIVP prob{CoefficientFamily(PowerLaw{2.0}),
                     Nonlinearity(PowerMinusLinear{1.0, 3.0}), Sign::plus, 1.0, 20.0};
    Trajectory traj = integrate(prob);
    auto rep = energy(traj, prob.nl, prob.sign);
    const double F1 = prob.nl.primitive(1.0);
    for (double e : rep.E) EXPECT_NEAR(e, -F1, 1e-14);  // E-hat = -F(t0) for (A+)
}

TEST(Pohozaev, ZeroSolutionHasZeroResidual) {
    Trajectory traj = run_power(2.0, 1.0, 3.0, 0.0, 5.0);
    EXPECT_EQ(pohozaev_residual(traj, 2.0, 1.0, 3.0), 0.0);
}

TEST(Pohozaev, ResidualSmallOnComputedRuns) {
    EXPECT_LE(pohozaev_residual(run_power(1.0, 1.0, 3.0, 1.0, 10.0, 1e-11), 1.0, 1.0,
                                3.0),
              1e-6);
    EXPECT_LE(pohozaev_residual(run_power(3.0, 1.0, 2.0, 1.0, 10.0, 1e-11), 3.0, 1.0,
                                2.0),
              1e-6);
}

TEST(Pohozaev, DegenerateCriticalCoefficient) {
    // theta=2, p=5: (theta-1)/2 - (theta+1)/(p+1) = 0, so the left side must
    // vanish along the Aubin-Talenti run
    Trajectory traj = run_power(2.0, 1.0, 5.0, 1.0, 10.0, 1e-11);
    EXPECT_DOUBLE_EQ(0.5 * (2.0 - 1.0) - 3.0 / 6.0, 0.0);
    EXPECT_LE(pohozaev_residual(traj, 2.0, 1.0, 5.0), 1e-6);
}

TEST(Pohozaev, WrongFamilyRejected) {
    SingularIVP prob{
        CoefficientFamily(coefficients::SinhRatio{3.0, 1.0, coefficients::SinhBranch::plus}),
        Nonlinearity(PowerMinusLinear{1.0, 3.0}), Sign::minus, 1.5, 5.0};
    Trajectory traj = integrate(prob);
    EXPECT_THROW(pohozaev_residual(traj, 2.0, 1.0, 3.0), std::invalid_argument);
    Trajectory power_run = run_power(2.0, 1.0, 3.0, 1.0, 5.0);
    EXPECT_THROW(pohozaev_residual(power_run, 1.0, 1.0, 3.0), std::invalid_argument);
}

TEST(PredictClass, RegimeTable) {
    EXPECT_EQ(predict_class(2.0, 1.0, 3.0), SolutionClass::oscillatory_stable);
    // the boundary theta = (p+3)/(p-1) belongs to the monotone case
    EXPECT_EQ(predict_class(3.0, 1.0, 3.0),
              SolutionClass::positive_monotone_decreasing_stable);
    EXPECT_EQ(predict_class(5.0, -1.0, 2.0), SolutionClass::positive_increasing_blowup);
    EXPECT_EQ(predict_class(0.0, 1.0, 4.0), SolutionClass::oscillatory_not_stable);
    EXPECT_THROW(predict_class(1.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Classify, AubinTalentiBoundaryCase) {
    Trajectory traj = run_power(2.0, 1.0, 5.0, 1.0, 200.0);
    auto rep = classify(traj, 2.0, 1.0, 5.0, 1.0);
    EXPECT_EQ(rep.observed, SolutionClass::positive_monotone_decreasing_stable);
    EXPECT_TRUE(rep.agreement);
    EXPECT_EQ(rep.zero_count, 0u);
}

TEST(Classify, ThetaZeroNotStable) {
    Trajectory traj = run_power(0.0, 1.0, 3.0, 1.0, 200.0);
    auto rep = classify(traj, 0.0, 1.0, 3.0, 1.0);
    EXPECT_EQ(rep.observed, SolutionClass::oscillatory_not_stable);
    EXPECT_TRUE(rep.agreement);
    EXPECT_NE(rep.amplitude_trend, AmplitudeTrend::decaying);
}

TEST(Classify, NegativeLambdaBlowsUp) {
    SingularIVP prob{CoefficientFamily(PowerLaw{1.0}),
                     Nonlinearity(PurePower{-1.0, 3.0}), Sign::minus, 0.5, 50.0};
    Trajectory traj = integrate(prob);
    auto rep = classify(traj, 1.0, -1.0, 3.0, 0.5);
    EXPECT_EQ(rep.observed, SolutionClass::positive_increasing_blowup);
    EXPECT_TRUE(rep.agreement);
}

TEST(Classify, ConstantTrajectory) {
    SingularIVP prob{CoefficientFamily(PowerLaw{2.0}),
                     Nonlinearity(PurePower{1.0, 3.0}), Sign::minus, 0.0, 10.0};
    Trajectory traj = integrate(prob);
    auto rep = classify(traj, 2.0, 1.0, 3.0, 0.0);
    EXPECT_EQ(rep.observed, SolutionClass::constant);
}

TEST(Classify, OscillationMonotoneInHorizon) {
    Trajectory shorter = run_power(2.0, 1.0, 3.0, 1.0, 60.0);
    Trajectory longer = run_power(2.0, 1.0, 3.0, 1.0, 120.0);
    EXPECT_LE(shorter.zero_count(), longer.zero_count());
}

TEST(Classify, InconclusiveOnShortHorizonThenResolved) {
    // a horizon too short to see three zeros
    Trajectory traj = run_power(2.0, 1.0, 3.0, 1.0, 3.0);
    auto rep = classify(traj, 2.0, 1.0, 3.0, 1.0);
    EXPECT_EQ(rep.observed, SolutionClass::inconclusive);
    EXPECT_GT(rep.recommended_horizon, 3.0);

    SingularIVP prob{CoefficientFamily(PowerLaw{2.0}),
                     Nonlinearity(PurePower{1.0, 3.0}), Sign::minus, 1.0, 25.0};
    auto resolved = run_and_classify(prob, 2.0, 1.0, 3.0);
    EXPECT_EQ(resolved.observed, SolutionClass::oscillatory_stable);
}
