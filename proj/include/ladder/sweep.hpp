#pragma once

// Parameter scans: threshold bisection, the dimensionless threshold map and
// hold-lifetime scans with the exponential barrier fit.

#include "ladder/classical.hpp"
#include "ladder/evolve.hpp"

#include <limits>
#include <string>
#include <vector>

namespace ladder {

// How a single point of the threshold map is turned into a simulation.
struct MapOptions {
    double alpha_mhz_per_ns{2.0};   // α used to realize the dimensionless point
    double f01_ghz{6.0};
    double t1_ns{std::numeric_limits<double>::infinity()};
    double n_target_min{10.0};      // chirp target level, at least
    double classical_depth{6.0};    // ... and at least classical_depth / (β/√α)
    double start_linewidths{3.0};   // chirp starts this many max(√α, Ω) above f01
    double rise_scale{5.0};         // t_rise = rise_scale / √α
    double level_margin{10.0};      // N = ceil(1.25 n_target) + level_margin
    int max_levels{200};
    bool measure{false};            // apply the escape-pulse model instead of the sharp cutoff
    double measure_width{0.25};
    IntegratorConfig integrator{};
    void validate() const;
};

struct MapPoint {
    double omega_scaled{0.0};
    double beta_scaled{0.0};
    SystemParams params;
    ChirpSchedule schedule;
    double n_target{0.0};
    int n_c{0};
};

MapPoint design_map_point(double omega_scaled, double beta_scaled, const MapOptions& options);

struct PointResult {
    double p_locked{0.0};
    int n_levels{0};        // after any growth on leakage
    double dt_ns{0.0};
    long steps{0};
};

// Runs the point (unitary without decay, Lindblad with), growing N on leakage.
PointResult evaluate_map_point(const MapPoint& point, const MapOptions& options);

// Dimensionless coordinates of a physical drive: (Ω/√α, β/√α), angular units.
double omega_scaled(double omega_mhz, double alpha_mhz_per_ns);
double beta_scaled(double beta_mhz, double alpha_mhz_per_ns);
// Inverse of omega_scaled.
double omega_from_scaled(double omega_scaled, double alpha_mhz_per_ns);

struct ThresholdOptions {
    MapOptions map{};
    double omega_lo_mhz{0.0};   // initial bracket; 0 picks one from the theory lines
    double omega_hi_mhz{0.0};
    double p_tol{0.02};
    double rel_tol{0.01};
    int max_expansions{6};
};

struct ThresholdResult {
    double omega_mhz{0.0};
    double omega_scaled{0.0};
    double p_locked{0.0};
    double lo_mhz{0.0}, hi_mhz{0.0};
    int evaluations{0};
};

// Bisection in Ω at fixed (α, β_r). params supplies f01 and T1.
ThresholdResult find_threshold(double alpha_mhz_per_ns, double beta_r, const SystemParams& params,
                               const ThresholdOptions& options);

// Theory lines in dimensionless units.
double ladder_climbing_threshold(double beta_scaled);   // 0.8
double autoresonance_threshold(double beta_scaled);     // 0.82 (β/√α)^{-1/2}

struct GridAxis {
    double lo{0.1};
    double hi{10.0};
    int points{12};
    std::vector<double> values() const;  // log-spaced
};

struct MapGridSpec {
    GridAxis omega_scaled{};
    GridAxis beta_scaled{};
    bool refine_columns{true};  // bisection per β column seeded by the grid bracket
};

struct ContourPoint {
    double beta_scaled;
    double omega_scaled;
};

struct ColumnThreshold {
    double beta_scaled{0.0};
    double omega_scaled{0.0};
    double p_locked{0.0};
    bool refined{false};
    bool found{false};
};

struct ScalingAnalysis {
    PowerLawFit classical;             // Ω_th/√α vs β/√α over β/√α <= 0.3
    double alpha_exponent{0.0};        // (1 - slope)/2
    double classical_prefactor{0.0};   // mean of Ω_th/√α · (β/√α)^{1/2} over the corner
    double quantum_level{0.0};         // mean Ω_th/√α over β/√α >= 3
    double quantum_max_deviation{0.0}; // max |Ω_th/√α / 0.8 - 1| over the corner
    double break_beta_scaled{0.0};     // intersection of the two fitted regimes
    double omega_eq_beta_crossing{0.0};// β/√α where the threshold curve crosses Ω = β
    int classical_points{0};
    int quantum_points{0};
};

struct ThresholdMap {
    std::vector<double> omega_scaled;  // rows
    std::vector<double> beta_scaled;   // columns
    std::vector<std::vector<double>> p_locked;   // [row][col], NaN on failure
    std::vector<std::vector<int>> n_levels;
    std::vector<std::string> failures;
    std::vector<std::vector<ContourPoint>> contour;  // polylines from marching squares
    std::vector<ColumnThreshold> columns;
    ScalingAnalysis scaling;
};

ThresholdMap threshold_map(const MapGridSpec& grid, const MapOptions& options, int threads = 0);

// P = level contour segments over a log-spaced grid (interpolation in log coordinates).
std::vector<std::vector<ContourPoint>> marching_squares(const std::vector<double>& omega_scaled,
                                                        const std::vector<double>& beta_scaled,
                                                        const std::vector<std::vector<double>>& values,
                                                        double level = 0.5);

ScalingAnalysis analyze_thresholds(const std::vector<ColumnThreshold>& columns);

// --- hold lifetime -----------------------------------------------------------

struct HoldOptions {
    int n_c{10};
    double t_max_ns{3000.0};
    double chunk_ns{250.0};          // stop early once the half-value is crossed
    double record_interval_ns{2.0};
    IntegratorConfig integrator{};
};

struct HoldResult {
    double omega_hold_mhz{0.0};
    double p_initial{0.0};
    double t_locked_ns{0.0};
    bool extrapolated{false};
    bool valid{true};
    std::vector<double> times_ns;    // measured from the start of the hold
    std::vector<double> p_locked;
};

// Evolves the chirp with decay (schedule.t_hold ignored) and returns the state at the chirp end.
QuantumState prepare_locked_state(const SystemParams& params, const ChirpSchedule& chirp,
                                  const IntegratorConfig& cfg);

HoldResult hold_lifetime(const SystemParams& params, const ChirpSchedule& chirp, const QuantumState& after_chirp,
                         double omega_hold_mhz, const HoldOptions& options);

struct HoldScan {
    std::vector<HoldResult> results;
};

HoldScan hold_scan(const SystemParams& params, const ChirpSchedule& chirp, const std::vector<double>& omega_holds,
                   const HoldOptions& options, int threads = 0);

inline constexpr double kEtaTheoryNs = 30.0;

struct EtaFit {
    double eta_ns{0.0};
    double intercept{0.0};      // ln T_locked at Ω_hold = 0
    double ci_low_ns{0.0}, ci_high_ns{0.0};  // 95 %
    double r_squared{0.0};
    std::vector<double> residuals;
    double dynamic_range_decades{0.0};
    int points{0};
    std::string warning;
    double theory_eta_ns{kEtaTheoryNs};
};

// ln T_locked = c + η Ω_hold/2π, Ω_hold/2π in GHz so η is in ns.
EtaFit fit_eta(const HoldScan& scan);

}  // namespace ladder
