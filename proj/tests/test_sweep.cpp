#include "ladder/errors.hpp"
#include "ladder/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ladder;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Σ_{m > n_c} of Binomial(n0, e^{-t/T1}): the decay-only locked fraction.
double binomial_locked(int n0, int n_c, double t, double t1) {
    const double q = std::exp(-t / t1);
    double s = 0.0;
    for (int m = n_c + 1; m <= n0; ++m) {
        s += std::exp(std::lgamma(n0 + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n0 - m + 1.0)) * std::pow(q, m) *
             std::pow(1.0 - q, n0 - m);
    }
    return s;
}

std::vector<ColumnThreshold> theory_columns(int n) {
    std::vector<ColumnThreshold> cols;
    for (int i = 0; i < n; ++i) {
        const double b = 0.05 * std::pow(10.0 / 0.05, static_cast<double>(i) / (n - 1));
        ColumnThreshold c;
        c.beta_scaled = b;
        c.omega_scaled = std::max(autoresonance_threshold(b), ladder_climbing_threshold(b));
        c.found = true;
        cols.push_back(c);
    }
    return cols;
}

}  // namespace

TEST(Scaled, Coordinates) {
    const double w = two_pi * 27e-3 / std::sqrt(two_pi * 2e-3);
    EXPECT_NEAR(omega_scaled(27.0, 2.0), w, 1e-12);
    EXPECT_NEAR(omega_from_scaled(omega_scaled(27.0, 2.0), 2.0), 27.0, 1e-12);
    EXPECT_NEAR(beta_scaled(138.0, 2.0), two_pi * 0.138 / std::sqrt(two_pi * 2e-3), 1e-12);
    EXPECT_EQ(ladder_climbing_threshold(5.0), 0.8);
    EXPECT_NEAR(autoresonance_threshold(0.25), 1.64, 1e-12);
}

TEST(DesignMapPoint, Realizes) {
    MapOptions o;
    const MapPoint m = design_map_point(1.2, 0.5, o);
    const double sqrt_alpha = std::sqrt(two_pi * 2e-3);
    EXPECT_NEAR(m.params.beta_r, 0.5 * sqrt_alpha / (two_pi * 6.0), 1e-15);
    EXPECT_NEAR(omega_scaled(m.schedule.omega_mhz, 2.0), 1.2, 1e-12);
    EXPECT_NEAR(beta_scaled(m.params.beta_mhz(), 2.0), 0.5, 1e-12);
    EXPECT_EQ(m.n_target, 12.0);
    EXPECT_EQ(m.n_c, 6);
    EXPECT_GE(m.params.n_levels, 25);
    // Chirp ends resonant with the target level.
    EXPECT_NEAR(m.schedule.f_end_ghz(), 6.0 * (1.0 - 12.0 * m.params.beta_r), 1e-12);
    EXPECT_THROW(design_map_point(-1.0, 0.5, o), ValidationError);
    EXPECT_THROW(design_map_point(1.0, 0.0, o), ValidationError);
}

TEST(MapPoint, DimensionlessCollapse) {
    MapOptions a;
    a.alpha_mhz_per_ns = 2.0;
    MapOptions b = a;
    b.alpha_mhz_per_ns = 8.0;
    for (auto [p1, p2] : {std::pair{1.5, 1.0}, {1.2, 0.6}}) {
        const PointResult ra = evaluate_map_point(design_map_point(p1, p2, a), a);
        const PointResult rb = evaluate_map_point(design_map_point(p1, p2, b), b);
        EXPECT_NEAR(ra.p_locked, rb.p_locked, 1e-3) << p1 << "," << p2;
    }
}

TEST(MapPoint, WeakAndStrongDriveLimits) {
    MapOptions o;
    EXPECT_LT(evaluate_map_point(design_map_point(0.1, 1.0, o), o).p_locked, 0.02);
    EXPECT_GT(evaluate_map_point(design_map_point(4.0, 1.0, o), o).p_locked, 0.95);
}

TEST(MapPoint, GrowsLevelsOnLeakage) {
    MapOptions o;
    MapPoint m = design_map_point(3.0, 1.0, o);
    m.params.n_levels = 13;  // far too few for a strong drive to level 10
    const PointResult r = evaluate_map_point(m, o);
    EXPECT_GT(r.n_levels, 13);
    EXPECT_GT(r.p_locked, 0.9);
}

TEST(FindThreshold, BracketsHalfProbability) {
    SystemParams p;
    ThresholdOptions o;
    const double beta_r = 1.0 * std::sqrt(two_pi * 2e-3) / (two_pi * 6.0);
    const ThresholdResult r = find_threshold(2.0, beta_r, p, o);
    EXPECT_LE(r.lo_mhz, r.omega_mhz);
    EXPECT_GE(r.hi_mhz, r.omega_mhz);
    EXPECT_TRUE(std::abs(r.p_locked - 0.5) <= o.p_tol || r.hi_mhz / r.lo_mhz <= 1.0 + 2 * o.rel_tol);
    // Quantum-side value near the theory line.
    EXPECT_NEAR(r.omega_scaled, 0.82, 0.25);
}

TEST(MarchingSquares, LinearInLogGivesExactContour) {
    GridAxis ax{0.1, 10.0, 9};
    const auto om = ax.values();
    const auto be = ax.values();
    std::vector<std::vector<double>> v(om.size(), std::vector<double>(be.size()));
    for (std::size_t i = 0; i < om.size(); ++i) {
        for (std::size_t j = 0; j < be.size(); ++j) v[i][j] = 0.5 + 0.1 * std::log(om[i]) - 0.05 * std::log(be[j]);
    }
    const auto lines = marching_squares(om, be, v);
    ASSERT_FALSE(lines.empty());
    std::size_t n = 0;
    for (const auto& line : lines) {
        for (const ContourPoint& c : line) {
            EXPECT_NEAR(0.1 * std::log(c.omega_scaled) - 0.05 * std::log(c.beta_scaled), 0.0, 1e-12);
            ++n;
        }
    }
    EXPECT_GE(n, be.size());
    // Values entirely above the level give no contour; NaN cells are skipped.
    std::vector<std::vector<double>> high(om.size(), std::vector<double>(be.size(), 0.9));
    EXPECT_TRUE(marching_squares(om, be, high).empty());
    v[4][4] = std::nan("");
    EXPECT_NO_THROW(marching_squares(om, be, v));
}

TEST(GridAxis, LogSpaced) {
    const auto v = GridAxis{0.1, 10.0, 5}.values();
    ASSERT_EQ(v.size(), 5u);
    EXPECT_NEAR(v[0], 0.1, 1e-15);
    EXPECT_NEAR(v[2], 1.0, 1e-14);
    EXPECT_NEAR(v[4], 10.0, 1e-13);
}

TEST(AnalyzeThresholds, RecoversTheoryLines) {
    const ScalingAnalysis s = analyze_thresholds(theory_columns(40));
    EXPECT_NEAR(s.classical.exponent, -0.5, 1e-9);
    EXPECT_NEAR(s.alpha_exponent, 0.75, 1e-9);
    EXPECT_NEAR(s.classical_prefactor, 0.82, 1e-9);
    EXPECT_NEAR(s.quantum_level, 0.8, 1e-12);
    EXPECT_NEAR(s.quantum_max_deviation, 0.0, 1e-12);
    EXPECT_NEAR(s.break_beta_scaled, std::pow(0.82 / 0.8, 2.0), 1e-6);
    EXPECT_NEAR(s.omega_eq_beta_crossing, std::pow(0.82, 2.0 / 3.0), 0.02);
    EXPECT_GE(s.classical_points, 3);
    EXPECT_GE(s.quantum_points, 3);
}

TEST(AnalyzeThresholds, SkipsMissingColumns) {
    auto cols = theory_columns(40);
    cols[3].found = false;
    cols[3].omega_scaled = 100.0;
    const ScalingAnalysis s = analyze_thresholds(cols);
    EXPECT_NEAR(s.alpha_exponent, 0.75, 1e-9);
}

TEST(ThresholdMap, DeterministicAcrossThreads) {
    MapGridSpec g;
    g.omega_scaled = {0.6, 2.0, 2};
    g.beta_scaled = {0.6, 1.2, 2};
    g.refine_columns = false;
    MapOptions o;
    o.n_target_min = 6.0;
    o.classical_depth = 3.0;
    const ThresholdMap a = threshold_map(g, o, 1);
    const ThresholdMap b = threshold_map(g, o, 2);
    EXPECT_EQ(a.p_locked, b.p_locked);
    EXPECT_EQ(a.n_levels, b.n_levels);
    EXPECT_TRUE(a.failures.empty());
    for (const auto& row : a.p_locked) {
        for (double p : row) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0 + 1e-9);
        }
    }
}

TEST(HoldLifetime, FreeDecayMatchesBinomialOracle) {
    SystemParams p;
    p.beta_r = 0.002;
    p.n_levels = 16;
    p.t1_ns = 300.0;
    const ChirpSchedule chirp = ChirpSchedule::to_level(p, 10.0, 190.0, 12.0);
    HoldOptions o;
    o.n_c = 10;
    o.record_interval_ns = 1.0;
    const HoldResult r = hold_lifetime(p, chirp, QuantumState::fock(16, 12), 0.0, o);
    ASSERT_TRUE(r.valid);
    EXPECT_FALSE(r.extrapolated);
    EXPECT_NEAR(r.p_initial, 1.0, 1e-12);
    double lo = 0.0, hi = 300.0;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (binomial_locked(12, 10, mid, 300.0) > 0.5 ? lo : hi) = mid;
    }
    EXPECT_NEAR(r.t_locked_ns, lo, 0.05);
    for (std::size_t k = 0; k < r.times_ns.size(); k += 10) {
        EXPECT_NEAR(r.p_locked[k], binomial_locked(12, 10, r.times_ns[k], 300.0), 1e-6);
    }
}

TEST(HoldLifetime, RejectsWeaklyLockedStart) {
    SystemParams p;
    p.beta_r = 0.002;
    p.n_levels = 16;
    p.t1_ns = 300.0;
    const ChirpSchedule chirp = ChirpSchedule::to_level(p, 10.0, 190.0, 12.0);
    try {
        hold_lifetime(p, chirp, QuantumState::fock(16, 2), 30.0, HoldOptions{});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "chirp");
    }
}

TEST(FitEta, RecoversSyntheticSlope) {
    HoldScan scan;
    for (double w : {20.0, 40.0, 60.0, 80.0, 100.0, 120.0}) {
        HoldResult r;
        r.omega_hold_mhz = w;
        r.t_locked_ns = std::exp(5.0 + 26.0 * w * 1e-3);
        scan.results.push_back(r);
    }
    const EtaFit f = fit_eta(scan);
    EXPECT_NEAR(f.eta_ns, 26.0, 1e-9);
    EXPECT_NEAR(f.intercept, 5.0, 1e-9);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_EQ(f.points, 6);
    EXPECT_NEAR(f.dynamic_range_decades, 26.0 * 0.1 / std::log(10.0), 1e-9);
    EXPECT_TRUE(f.warning.empty());
    EXPECT_NEAR(f.ci_low_ns, 26.0, 1e-6);
    EXPECT_NEAR(f.ci_high_ns, 26.0, 1e-6);

    HoldScan narrow = scan;
    for (HoldResult& r : narrow.results) r.t_locked_ns = std::exp(5.0 + 5.0 * r.omega_hold_mhz * 1e-3);
    EXPECT_FALSE(fit_eta(narrow).warning.empty());

    scan.results[0].valid = false;
    scan.results[1].valid = false;
    scan.results[2].valid = false;
    EXPECT_THROW(fit_eta(scan), ValidationError);
}
