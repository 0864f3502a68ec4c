#include "ladder/errors.hpp"
#include "ladder/model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ladder;

namespace {

SystemParams fig2b_params() {
    SystemParams p;
    p.f01_ghz = 6.0;
    p.beta_r = 0.023;
    p.n_levels = 30;
    return p;
}

// Lowest eigenvalues of p²/2 + x²/2 - κ x³ in a truncated harmonic basis.
Eigen::VectorXd cubic_well_levels(double kappa, int basis) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(basis, basis);
    for (int n = 0; n + 1 < basis; ++n) x(n, n + 1) = x(n + 1, n) = std::sqrt((n + 1) / 2.0);
    Eigen::MatrixXd h = -kappa * x * x * x;
    for (int n = 0; n < basis; ++n) h(n, n) += n + 0.5;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST(TransitionFrequency, MatchesLadderDefinition) {
    const SystemParams p = fig2b_params();
    EXPECT_DOUBLE_EQ(transition_frequency(p, 0), 6.0);
    EXPECT_NEAR(transition_frequency(p, 1), 5.862, 1e-12);
    EXPECT_NEAR(transition_frequency(p, 2), 5.724, 1e-12);
    for (int n = 0; n <= p.n_levels - 2; ++n) {
        EXPECT_NEAR(transition_frequency(p, n), oracle::kerr_transition(p.f01_ghz, p.beta_r, n), 1e-12);
        if (n > 0) EXPECT_LT(transition_frequency(p, n), transition_frequency(p, n - 1));
    }
    EXPECT_THROW(transition_frequency(p, -1), std::out_of_range);
    EXPECT_THROW(transition_frequency(p, p.n_levels - 1), std::out_of_range);
}

TEST(TransitionFrequency, AgreesWithCubicWellAtMatchedAnharmonicity) {
    // Tune the cubic coefficient so the well's (f01 - f12)/f01 equals 0.023,
    // then compare the next transition with the Kerr ladder.
    const int basis = 40;
    auto beta_r_of = [&](double kappa) {
        const Eigen::VectorXd e = cubic_well_levels(kappa, basis);
        return ((e(1) - e(0)) - (e(2) - e(1))) / (e(1) - e(0));
    };
    double lo = 0.0, hi = 0.1;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (beta_r_of(mid) < 0.023 ? lo : hi) = mid;
    }
    const Eigen::VectorXd e = cubic_well_levels(lo, basis);
    const Eigen::VectorXd e_big = cubic_well_levels(lo, basis + 10);
    ASSERT_NEAR(e(3), e_big(3), 1e-9) << "basis not converged";
    SystemParams p = fig2b_params();
    p.f01_ghz = e(1) - e(0);
    const double f23_well = e(3) - e(2);
    // Agreement to leading order; the well's higher-order terms bend the ladder slightly.
    EXPECT_NEAR(transition_frequency(p, 2) / f23_well, 1.0, 5e-3);
}

TEST(RotatingDetunings, ZeroAtFirstResonance) {
    const SystemParams p = fig2b_params();
    const auto d = rotating_detunings(p, p.f01_ghz);
    EXPECT_EQ(d[0], 0.0);
    EXPECT_NEAR(d[1], 0.0, 1e-12);
    EXPECT_NEAR(d[2], -2.0 * std::numbers::pi * 0.138, 1e-12);
}

TEST(RotatingDetunings, CrossingsSitAtTransitionFrequencies) {
    const SystemParams p = fig2b_params();
    for (int n = 0; n + 1 < p.n_levels; ++n) {
        const double f = transition_frequency(p, n);
        EXPECT_NEAR(crossing_frequency(p, n), f, 1e-12);
        const auto d = rotating_detunings(p, f);
        EXPECT_NEAR(d[static_cast<std::size_t>(n)], d[static_cast<std::size_t>(n) + 1],
                    1e-12 * std::max(1.0, std::abs(d[static_cast<std::size_t>(n)])));
    }
    // Crossing 1-2 at drive detuning -beta_r f01 = -138 MHz.
    EXPECT_NEAR((crossing_frequency(p, 1) - p.f01_ghz) * 1e3, -138.0, 1e-9);
}

TEST(BuildHamiltonian, CouplingConvention) {
    const SystemParams p = fig2b_params();
    const RotFrameHamiltonian h = build_hamiltonian(p, {27.0, 6.0});
    const double to_mhz = 1e3 / (2.0 * std::numbers::pi);
    EXPECT_NEAR(h.offdiag[0] * to_mhz, 13.5, 1e-12);
    EXPECT_NEAR(h.offdiag[1] * to_mhz, 13.5 * std::sqrt(2.0), 1e-12);
    for (std::size_t n = 0; n < h.offdiag.size(); ++n) {
        EXPECT_NEAR(h.offdiag[n], std::sqrt(n + 1.0) * 0.5 * 2.0 * std::numbers::pi * 27e-3, 1e-14);
    }
    const Eigen::MatrixXd m = h.dense();
    EXPECT_EQ((m - m.transpose()).cwiseAbs().maxCoeff(), 0.0);
    const RotFrameHamiltonian h0 = build_hamiltonian(p, {0.0, 6.0});
    for (double g : h0.offdiag) EXPECT_EQ(g, 0.0);
}

TEST(BuildHamiltonian, RejectsBadInput) {
    SystemParams p = fig2b_params();
    p.n_levels = 1;
    EXPECT_THROW(build_hamiltonian(p, {27.0, 6.0}), ValidationError);
    EXPECT_THROW(build_hamiltonian(fig2b_params(), {-1.0, 6.0}), ValidationError);
    EXPECT_THROW(build_hamiltonian(fig2b_params(), {1.0, 0.0}), ValidationError);
}

TEST(SystemParams, Invariants) {
    SystemParams p = fig2b_params();
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.beta(), 2.0 * std::numbers::pi * 0.138, 1e-12);
    for (double br : {0.002, 0.005, 0.01, 0.023, 0.03}) {
        SystemParams q = p;
        q.beta_r = br;
        EXPECT_NO_THROW(q.validate()) << br;
    }
    auto expect_field = [](SystemParams q, const std::string& field) {
        try {
            q.validate();
            ADD_FAILURE() << "no error for " << field;
        } catch (const ValidationError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };
    SystemParams q = p;
    q.f01_ghz = 0.0;
    expect_field(q, "f01");
    q = p;
    q.beta_r = 1.0;
    expect_field(q, "beta_r");
    q = p;
    q.t1_ns = -3.0;
    expect_field(q, "t1");
    q = p;
    q.beta_r = 0.05;  // 28 * 0.05 > 1: ladder turns over
    expect_field(q, "n_levels");
}

TEST(DriveParams, RwaWarning) {
    const SystemParams p = fig2b_params();
    EXPECT_FALSE((DriveParams{190.0, 6.0}.rwa_warning(p)).has_value());
    EXPECT_TRUE((DriveParams{700.0, 6.0}.rwa_warning(p)).has_value());
}

TEST(DressedSpectrum, UndrivenEqualsBareDetunings) {
    SystemParams p = fig2b_params();
    p.n_levels = 5;
    const std::vector<double> grid{-300.0, -138.0, -50.0, 0.0, 40.0};
    const DressedSpectrum s = dressed_spectrum(p, 0.0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto bare = rotating_detunings(p, p.f01_ghz + grid[k] * 1e-3);
        for (double& b : bare) b *= 1e3 / (2.0 * std::numbers::pi);
        std::sort(bare.begin(), bare.end());
        for (std::size_t b = 0; b < bare.size(); ++b) EXPECT_NEAR(s.energies[k][b], bare[b], 1e-9);
    }
}

TEST(DressedSpectrum, TwoLevelGapEqualsRabiFrequency) {
    SystemParams p = fig2b_params();
    p.n_levels = 2;
    const std::vector<double> grid{0.0};
    const DressedSpectrum s = dressed_spectrum(p, 27.0, grid);
    EXPECT_NEAR(s.energies[0][1] - s.energies[0][0], 27.0, 1e-10);
}

TEST(DressedSpectrum, GapLawAtIsolatedCrossings) {
    SystemParams p = fig2b_params();
    p.n_levels = 8;
    const double omega = 5.0;
    for (int n = 0; n < 6; ++n) {
        const double centre = (crossing_frequency(p, n) - p.f01_ghz) * 1e3;
        std::vector<double> grid;
        for (int i = -400; i <= 400; ++i) grid.push_back(centre + i * 0.01);
        const DressedSpectrum s = dressed_spectrum(p, omega, grid);
        double gap = 1e300;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto& e = s.energies[k];
            // The resonant pair is the top of the dressed ladder; the pairs below it
            // meet in multi-photon crossings at the same drive frequency.
            gap = std::min(gap, e[e.size() - 1] - e[e.size() - 2]);
        }
        EXPECT_NEAR(gap / (std::sqrt(n + 1.0) * omega), 1.0, 0.01) << "crossing " << n;
    }
}

TEST(DressedSpectrum, FarDetunedApproachesBare) {
    SystemParams p = fig2b_params();
    p.n_levels = 4;
    const double omega = 27.0;
    const std::vector<double> grid{3000.0};
    const DressedSpectrum s = dressed_spectrum(p, omega, grid);
    auto bare = rotating_detunings(p, p.f01_ghz + 3.0);
    for (double& b : bare) b *= 1e3 / (2.0 * std::numbers::pi);
    std::sort(bare.begin(), bare.end());
    // Second-order shifts are bounded by (g_max)^2 / (smallest level spacing).
    const double g_max = 0.5 * omega * std::sqrt(3.0);
    const double bound = 2.0 * g_max * g_max / 2500.0;
    for (std::size_t b = 0; b < bare.size(); ++b) {
        EXPECT_NEAR(s.energies[0][b], bare[b], bound);
        EXPECT_GT(std::abs(s.energies[0][b] - bare[b]), 0.0);
    }
}

TEST(DressedSpectrum, RejectsUnsortedGrid) {
    const std::vector<double> grid{0.0, -1.0};
    EXPECT_THROW(dressed_spectrum(fig2b_params(), 1.0, grid), ValidationError);
}
