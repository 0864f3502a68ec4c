#pragma once

// Classical chirped softening Duffing oscillator in normalized units:
//   x'' + 2γ x' + x - λ x³ = ε cos φ,   φ' = 1 - ν t.
// Linear resonance is crossed at t = 0. Quantum correspondence: ε ↔ Ω,
// λ ↔ β, ν ↔ α (all measured in units of the linear frequency).

#include <cstdint>
#include <vector>

namespace ladder {

struct DuffingParams {
    double lambda{1.0};     // softening cubic coefficient
    double gamma{0.0};      // damping rate
    double epsilon{0.0};    // drive amplitude
    double chirp_rate{1e-4};
    double dt{0.01};
    double t_start_scale{4.0};   // start at t = -t_start_scale / √ν
    double final_frequency{0.8};  // stop when the drive frequency reaches this value
    double capture_fraction{0.5};
    void validate() const;
    double t_begin() const;
    double t_end() const;
    // Energy of a free oscillation whose amplitude A is phase-locked at the final
    // drive frequency, 1 - (3λ/8) A² = final_frequency.
    double locked_energy() const;
    // Capture needs final energy above capture_fraction of locked_energy().
    double capture_energy() const;
};

struct CaptureResult {
    bool captured{false};
    double final_energy{0.0};
    double phase_drift{0.0};  // max |ψ - ψ(start)| of the unwrapped oscillator-drive phase over the last quarter
    bool blew_up{false};
};

struct DuffingTrajectory {
    std::vector<double> t, x, v, energy;
    CaptureResult result;
};

struct DuffingInitial {
    double x{0.0};
    double v{0.0};
};

// record_every = 0 keeps only the capture result.
DuffingTrajectory integrate_duffing(const DuffingParams& params, DuffingInitial initial, int record_every = 0);

double duffing_energy(double x, double v, double lambda);

struct Ensemble {
    int size{16};
    double temperature{0.0};  // initial x, v ~ N(0, temperature)
    std::uint64_t seed{1};
};

// Deterministic given the seed; members are evaluated with `threads` workers.
double capture_probability(const DuffingParams& params, const Ensemble& ensemble, int threads = 1);

// Estimate 1.342 ν^{3/4} λ^{-1/2} from the averaged amplitude equation.
double duffing_threshold_estimate(double chirp_rate, double lambda);

struct DuffingThreshold {
    double chirp_rate{0.0};
    double epsilon{0.0};
    double lo{0.0}, hi{0.0};
    int evaluations{0};
};

DuffingThreshold duffing_threshold(DuffingParams params, const Ensemble& ensemble, double rel_tol = 0.005,
                                   int threads = 1);

struct PowerLawFit {
    double exponent{0.0};
    double prefactor{0.0};
    double r_squared{0.0};
    double exponent_stderr{0.0};
};

// Least squares of log y on log x.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ClassicalScaling {
    std::vector<DuffingThreshold> thresholds;
    PowerLawFit fit;
};

ClassicalScaling classical_threshold_scaling(const std::vector<double>& chirp_rates, const DuffingParams& params,
                                             const Ensemble& ensemble, int threads = 1);

}  // namespace ladder
