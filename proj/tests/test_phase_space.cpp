#include "ladder/errors.hpp"
#include "ladder/evolve.hpp"
#include "ladder/phase_space.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

using namespace ladder;

namespace {

constexpr double inv_pi = 1.0 / std::numbers::pi;

// Pattern search for the local maximum of W starting from (x, p).
std::pair<double, double> refine_peak(const QuantumState& s, double x, double p) {
    double step = 0.1;
    double best = wigner_at(s, x, p);
    while (step > 1e-7) {
        bool moved = false;
        for (auto [dx, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
            const double v = wigner_at(s, x + dx * step, p + dp * step);
            if (v > best) {
                best = v;
                x += dx * step;
                p += dp * step;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return {x, p};
}

std::pair<double, double> grid_peak(const WignerGrid& g) {
    Eigen::Index r = 0, c = 0;
    g.values.maxCoeff(&r, &c);
    return {g.x(static_cast<int>(c)), g.p(static_cast<int>(r))};
}

}  // namespace

TEST(Wigner, VacuumAndFockOne) {
    EXPECT_NEAR(wigner_at(QuantumState::fock(5, 0), 0.0, 0.0), inv_pi, 1e-6);
    EXPECT_NEAR(wigner_at(QuantumState::fock(5, 1), 0.0, 0.0), -inv_pi, 1e-6);
    for (int n = 0; n < 12; ++n) {
        EXPECT_NEAR(wigner_at(QuantumState::fock(12, n), 0.0, 0.0), (n % 2 ? -1.0 : 1.0) * inv_pi, 1e-9);
    }
    // Isotropic Gaussian.
    const QuantumState vac = QuantumState::fock(5, 0);
    for (double r : {0.3, 1.0, 2.0}) {
        for (double th : {0.0, 1.0, 2.5}) {
            EXPECT_NEAR(wigner_at(vac, r * std::cos(th), r * std::sin(th)), inv_pi * std::exp(-r * r), 1e-12);
        }
    }
}

TEST(Wigner, MatchesLaguerreExpansion) {
    // A random mixed state in 9 levels.
    const int n = 9;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = {std::sin(1.3 * i + 0.7 * j), std::cos(0.4 * i - 1.1 * j)};
    }
    Eigen::MatrixXcd rho = m * m.adjoint();
    rho /= rho.trace().real();
    const QuantumState s = QuantumState::mixed(rho);
    for (double x : {-2.5, -0.7, 0.0, 0.4, 1.9}) {
        for (double p : {-1.8, 0.0, 0.3, 2.2}) {
            EXPECT_NEAR(wigner_at(s, x, p), oracle::wigner(rho, x, p), 1e-10) << x << "," << p;
        }
    }
}

TEST(Wigner, NormalizedAndBounded) {
    for (const QuantumState& s : {QuantumState::fock(10, 0), QuantumState::fock(10, 3),
                                  QuantumState::coherent(30, {1.5, -0.8})}) {
        const WignerGrid g = wigner(s);
        EXPECT_NEAR(g.integral(), 1.0, 1e-3);
        EXPECT_LE(g.values.maxCoeff(), inv_pi + 1e-9);
        EXPECT_GE(g.values.minCoeff(), -inv_pi - 1e-9);
        EXPECT_EQ(g.nx(), 201);
    }
}

TEST(Wigner, UnderCoveredGridThrows) {
    WignerGridSpec spec;
    spec.x_extent = 1.0;
    spec.p_extent = 1.0;
    EXPECT_THROW(wigner(QuantumState::coherent(30, {2.0, 0.0}), spec), InvariantViolation);
}

TEST(Wigner, CoherentPeakIsDisplacedVacuum) {
    const QuantumState s = QuantumState::coherent(40, {2.0, 0.0});  // <n> = 4
    const WignerGrid g = wigner(s);
    auto [x0, p0] = grid_peak(g);
    auto [x, p] = refine_peak(s, x0, p0);
    EXPECT_NEAR(std::hypot(x, p), std::sqrt(2.0 * 4.0), 1e-4);
    EXPECT_NEAR(wigner_at(s, x, p), inv_pi, 1e-6);
}

TEST(Wigner, MarginalsReproduceDensity) {
    WignerGridSpec spec;
    spec.x_extent = 6.0;
    spec.p_extent = 6.0;
    spec.resolution = 241;
    for (int n : {0, 1}) {
        const WignerGrid g = wigner(QuantumState::fock(4, n), spec);
        const double dp = 2.0 * g.p_extent / (g.np() - 1);
        for (int i = 0; i < g.nx(); i += 10) {
            double marginal = 0.0;
            for (int j = 0; j < g.np(); ++j) marginal += g.values(j, i) * ((j == 0 || j == g.np() - 1) ? 0.5 : 1.0);
            marginal *= dp;
            const double psi = n == 0 ? oracle::psi0(g.x(i)) : oracle::psi1(g.x(i));
            EXPECT_NEAR(marginal, psi * psi, 1e-3) << "n=" << n << " x=" << g.x(i);
        }
    }
}

TEST(Wigner, HarmonicEvolutionRotatesRigidly) {
    SystemParams params;
    params.beta_r = 1e-9;
    params.n_levels = 40;
    ChirpSchedule s;
    s.f_start_ghz = params.f01_ghz + 0.01;
    s.omega_mhz = 0.0;
    s.t_rise_ns = 0.0;
    s.t_chirp_ns = 0.0;
    s.t_hold_ns = 100.0;
    const QuantumState psi0 = QuantumState::coherent(40, {2.0, 0.0});
    const double r0 = std::sqrt(8.0);
    std::vector<QuantumState> snaps;
    IntegratorConfig cfg;
    cfg.record_interval_ns = 12.5;
    propagate_unitary(params, s, psi0, cfg, [&](double, const QuantumState& st) { snaps.push_back(st); });
    ASSERT_GE(snaps.size(), 8u);
    std::vector<double> angles;
    for (const QuantumState& st : snaps) {
        auto [x0, p0] = grid_peak(wigner(st));
        auto [x, p] = refine_peak(st, x0, p0);
        EXPECT_NEAR(std::hypot(x, p), r0, 1e-3);
        EXPECT_NEAR(wigner_at(st, x, p), inv_pi, 1e-6);
        angles.push_back(std::atan2(p, x));
    }
    // The phase advances: the peak does not stay put.
    double travelled = 0.0;
    for (std::size_t k = 1; k < angles.size(); ++k) travelled += std::abs(std::remainder(angles[k] - angles[k - 1], 2 * std::numbers::pi));
    EXPECT_GT(travelled, 1.0);
}

TEST(RingStats, FockRingAndCoherentCrescent) {
    const QuantumState fock = QuantumState::fock(10, 3);
    const RingStats ring = ring_stats(fock, std::sqrt(2.0 * 3.0 + 1.0));
    EXPECT_LT(ring.relative_spread, 1e-9);
    EXPECT_NEAR(ring.circular_variance, 1.0, 1e-9);
    const QuantumState coh = QuantumState::coherent(40, std::polar(2.5, 0.6));
    const double r = dominant_radius(coh);
    EXPECT_NEAR(r, std::sqrt(2.0) * 2.5, 0.15);
    const RingStats crescent = ring_stats(coh, r);
    EXPECT_LT(crescent.circular_variance, 0.3);
    EXPECT_NEAR(crescent.mean_phase, 0.6, 1e-3);
}

namespace {

// Circular variance at the dominant radius for snapshots along a chirp.
std::vector<double> phase_spread_along(const SystemParams& p, const ChirpSchedule& s, const std::vector<double>& times) {
    // A rerun after step refinement calls the observer again; the last call wins.
    std::vector<double> out(times.size(), std::nan(""));
    IntegratorConfig cfg;
    cfg.record_interval_ns = 0.5;
    propagate_unitary(p, s, QuantumState::fock(p.n_levels, 0), cfg, [&](double t, const QuantumState& st) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (std::abs(t - times[i]) < 0.25) out[i] = ring_stats(st, dominant_radius(st)).circular_variance;
        }
    });
    return out;
}

}  // namespace

TEST(RegimeSignature, ClimbingDelocalizesPhaseAutoresonanceLocalizesIt) {
    SystemParams b;
    b.beta_r = 0.023;
    b.n_levels = 30;
    b.t1_ns = std::numeric_limits<double>::infinity();
    const ChirpSchedule sb = ChirpSchedule::to_level(b, 2.0, 27.0, 6.0, 150.0, 20.0);
    std::vector<double> mids;
    for (int k = 1; k < 5; ++k) {
        const double f_mid = 0.5 * (crossing_frequency(b, k - 1) + crossing_frequency(b, k));
        mids.push_back(sb.t_rise_ns + (sb.f_start_ghz - f_mid) / (sb.alpha_mhz_per_ns * 1e-3));
    }
    const std::vector<double> ring = phase_spread_along(b, sb, mids);

    SystemParams c;
    c.beta_r = 0.002;
    c.n_levels = 36;
    c.t1_ns = std::numeric_limits<double>::infinity();
    const ChirpSchedule sc = ChirpSchedule::to_level(c, 10.0, 190.0, 16.0, 50.0, 5.0);
    std::vector<double> during;
    for (double t = sc.t_rise_ns + 2.0; t < sc.chirp_end_ns(); t += 2.0) during.push_back(t);
    const std::vector<double> crescent = phase_spread_along(c, sc, during);
    for (double v : ring) ASSERT_TRUE(std::isfinite(v));
    for (double v : crescent) ASSERT_TRUE(std::isfinite(v));

    for (double v : crescent) EXPECT_LT(v, 0.2);
    const double ring_min = *std::min_element(ring.begin(), ring.end());
    const double crescent_max = *std::max_element(crescent.begin(), crescent.end());
    EXPECT_GT(ring_min, 2.0 * crescent_max);
}
