#include "ladder/classical.hpp"
#include "ladder/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ladder;

namespace {

DuffingParams fast(double epsilon) {
    DuffingParams p;
    p.chirp_rate = 1e-3;
    p.epsilon = epsilon;
    return p;
}

}  // namespace

TEST(Duffing, Validation) {
    DuffingParams p;
    p.chirp_rate = -1.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = DuffingParams{};
    p.dt = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = DuffingParams{};
    p.final_frequency = 0.6;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Duffing, TimeWindow) {
    DuffingParams p;
    p.chirp_rate = 1e-4;
    EXPECT_NEAR(p.t_begin(), -400.0, 1e-9);
    EXPECT_NEAR(p.t_end(), 2000.0, 1e-9);
    EXPECT_NEAR(duffing_threshold_estimate(1e-4, 1.0), 1.342 * std::pow(1e-4, 0.75), 1e-3 * std::pow(1e-4, 0.75));
    EXPECT_NEAR(duffing_threshold_estimate(1e-4, 4.0), duffing_threshold_estimate(1e-4, 1.0) / 2.0, 1e-12);
}

TEST(Duffing, ZeroDriveStaysAtRest) {
    const DuffingTrajectory tr = integrate_duffing(fast(0.0), {}, 100);
    for (double x : tr.x) EXPECT_EQ(x, 0.0);
    EXPECT_FALSE(tr.result.captured);
    EXPECT_EQ(tr.result.final_energy, 0.0);
}

TEST(Duffing, FreeMotionConservesEnergy) {
    DuffingParams p;
    p.chirp_rate = 1e-4;  // 2.4e5 steps
    const DuffingTrajectory tr = integrate_duffing(p, {0.3, 0.0}, 1000);
    ASSERT_GT(tr.energy.size(), 100u);
    const double e0 = duffing_energy(0.3, 0.0, 1.0);
    for (double e : tr.energy) EXPECT_NEAR(e, e0, 1e-8);
}

TEST(Duffing, DampingDrainsEnergy) {
    DuffingParams p = fast(0.0);
    p.gamma = 0.01;
    const DuffingTrajectory tr = integrate_duffing(p, {0.3, 0.0}, 1000);
    for (std::size_t k = 1; k < tr.energy.size(); ++k) EXPECT_LE(tr.energy[k], tr.energy[k - 1] + 1e-12);
    // dE/dt = -2γ v², and ⟨v²⟩ ≈ E for small oscillations.
    const double span = tr.t.back() - tr.t.front();
    EXPECT_NEAR(std::log(tr.energy.back() / tr.energy.front()), -2.0 * p.gamma * span, 0.3);
}

TEST(Duffing, CaptureAboveThresholdNotBelow) {
    const double eth = duffing_threshold_estimate(1e-3, 1.0);
    const DuffingTrajectory above = integrate_duffing(fast(2.0 * eth), {});
    EXPECT_TRUE(above.result.captured);
    EXPECT_LT(above.result.phase_drift, std::numbers::pi);
    const DuffingTrajectory below = integrate_duffing(fast(0.5 * eth), {});
    EXPECT_FALSE(below.result.captured);
    // A captured oscillator follows the drive: amplitude from 1 - (3λ/8)A² = ω_d.
    EXPECT_NEAR(above.result.final_energy / fast(0.0).locked_energy(), 1.0, 0.15);
}

TEST(Duffing, CaptureIsStepSizeInvariant) {
    for (double f : {0.8, 1.2}) {
        DuffingParams p = fast(f * duffing_threshold_estimate(1e-3, 1.0));
        const CaptureResult a = integrate_duffing(p, {}).result;
        p.dt *= 0.5;
        const CaptureResult b = integrate_duffing(p, {}).result;
        EXPECT_EQ(a.captured, b.captured);
        EXPECT_NEAR(a.final_energy, b.final_energy, 1e-6 * std::max(1.0, a.final_energy));
    }
}

TEST(CaptureProbability, DeterministicAndBounded) {
    const double eth = duffing_threshold_estimate(1e-3, 1.0);
    const Ensemble ens{16, 1e-4, 99};
    const double a = capture_probability(fast(eth), ens, 1);
    const double b = capture_probability(fast(eth), ens, 2);
    EXPECT_EQ(a, b);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_EQ(capture_probability(fast(0.0), ens), 0.0);
    EXPECT_EQ(capture_probability(fast(3.0 * eth), ens), 1.0);
}

TEST(CaptureProbability, SharpAtZeroTemperature) {
    const double eth = duffing_threshold_estimate(1e-3, 1.0);
    const Ensemble cold{8, 0.0, 3};
    const Ensemble warm{64, 2e-3, 3};
    // At zero temperature every member is identical.
    for (double f : {0.7, 0.9, 1.1, 1.3}) {
        const double pc = capture_probability(fast(f * eth), cold);
        EXPECT_TRUE(pc == 0.0 || pc == 1.0);
    }
    // Thermal noise spreads the transition: some amplitude sees a fractional probability.
    int fractional = 0;
    for (double f = 0.6; f <= 1.4; f += 0.1) {
        const double pw = capture_probability(fast(f * eth), warm);
        if (pw > 0.0 && pw < 1.0) ++fractional;
    }
    EXPECT_GE(fractional, 1);
}

TEST(DuffingThreshold, BracketsEstimate) {
    const DuffingThreshold th = duffing_threshold(fast(0.0), Ensemble{1, 0.0, 1});
    const double est = duffing_threshold_estimate(1e-3, 1.0);
    EXPECT_LE(th.lo, th.epsilon);
    EXPECT_GE(th.hi, th.epsilon);
    EXPECT_LE(th.hi / th.lo, 1.0 + 2 * 0.005 + 1e-12);
    EXPECT_NEAR(th.epsilon / est, 1.0, 0.15);
    EXPECT_FALSE(integrate_duffing(fast(th.lo), {}).result.captured);
    EXPECT_TRUE(integrate_duffing(fast(th.hi), {}).result.captured);
}

TEST(PowerLaw, ExactFit) {
    std::vector<double> x, y;
    for (double v : {1e-5, 3e-5, 1e-4, 3e-4}) {
        x.push_back(v);
        y.push_back(1.342 * std::pow(v, 0.75));
    }
    const PowerLawFit f = fit_power_law(x, y);
    EXPECT_NEAR(f.exponent, 0.75, 1e-12);
    EXPECT_NEAR(f.prefactor, 1.342, 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(f.exponent_stderr, 0.0, 1e-10);
    EXPECT_THROW(fit_power_law({1.0}, {1.0}), ValidationError);
}

TEST(ClassicalScaling, NeedsDecadeOfRates) {
    EXPECT_THROW(classical_threshold_scaling({1e-3, 9e-4, 8e-4, 7e-4}, DuffingParams{}, Ensemble{1, 0.0, 1}),
                 ValidationError);
    EXPECT_THROW(classical_threshold_scaling({1e-3, 1e-4}, DuffingParams{}, Ensemble{1, 0.0, 1}), ValidationError);
}
