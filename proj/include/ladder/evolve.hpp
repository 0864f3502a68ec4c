#pragma once

// Time evolution of the driven ladder under a chirp/hold drive program.

#include "ladder/model.hpp"
#include "ladder/state.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ladder {

// Rise (cosine ramp of Ω at f_start), linear downward chirp, then hold at
// (Ω_hold, f_end).
struct ChirpSchedule {
    double f_start_ghz{6.05};
    double alpha_mhz_per_ns{2.0};  // α/2π = |df/dt|
    double omega_mhz{27.0};        // Ω/2π during the chirp
    double t_rise_ns{5.0};
    double t_chirp_ns{100.0};
    double omega_hold_mhz{0.0};
    double t_hold_ns{0.0};

    double f_end_ghz() const noexcept { return f_start_ghz - alpha_mhz_per_ns * 1e-3 * t_chirp_ns; }
    double chirp_end_ns() const noexcept { return t_rise_ns + t_chirp_ns; }
    double duration_ns() const noexcept { return t_rise_ns + t_chirp_ns + t_hold_ns; }

    void validate(const SystemParams& params) const;

    // Chirp from start_detuning_mhz above f01 down to the drive frequency resonant
    // with level n_target, i.e. f_end = f01 (1 - n_target beta_r).
    static ChirpSchedule to_level(const SystemParams& params, double alpha_mhz_per_ns, double omega_mhz,
                                  double n_target, double start_detuning_mhz = 50.0,
                                  double t_rise_ns = 5.0);
};

struct DriveSample {
    double omega_mhz;
    double f_drive_ghz;
};

DriveSample drive_envelope(const ChirpSchedule& schedule, double t_ns);

enum class Method { rk4, adaptive };

struct IntegratorConfig {
    double dt_ns{0.0};            // 0 selects the automatic step (see auto_time_step)
    Method method{Method::rk4};
    double tolerance{1e-10};      // adaptive mode: per-step absolute error target
    double leak_tol{1e-6};        // maximum top-level population
    int record_stride{0};         // fixed-step mode; 0 records about every record_interval_ns
    double record_interval_ns{1.0};
    double t_start_ns{0.0};       // start part-way through the schedule (e.g. hold only)
    double t_stop_ns{-1.0};       // < 0 runs to the end of the schedule

    void validate() const;
};

// Largest step used by the fixed-step integrator: min(0.02 ns, 2π / (50 ρ)) where
// ρ bounds the spectral radius of the generator over the whole schedule.
double auto_time_step(const SystemParams& params, const ChirpSchedule& schedule, bool lindblad);
// Same bound restricted to the part of the schedule in [t_from, t_to].
double auto_time_step(const SystemParams& params, const ChirpSchedule& schedule, bool lindblad, double t_from,
                      double t_to);

struct Trajectory {
    int n_levels{0};
    std::vector<double> times_ns;
    std::vector<std::vector<double>> occupations;  // [record][level]
    std::vector<double> mean_n;
    std::vector<double> leakage;                   // top-level population
    std::vector<double> omega_mhz;
    std::vector<double> f_drive_ghz;

    double dt_ns{0.0};          // nominal step (fixed) or smallest accepted step (adaptive)
    long steps{0};
    double max_norm_error{0.0};
    double max_hermiticity_error{0.0};
    double min_eigenvalue{0.0};
    std::optional<QuantumState> final_state;

    std::size_t size() const noexcept { return times_ns.size(); }
    // Σ_{n > n_c} P_n at each record.
    std::vector<double> locking_probability(int n_c) const;
    // Index of the first record with time >= t.
    std::size_t index_at(double t_ns) const;
};

using StateObserver = std::function<void(double t_ns, const QuantumState& state)>;

// i dψ/dt = H(t) ψ. psi0 must be pure. The state is carried up to a global phase.
Trajectory propagate_unitary(const SystemParams& params, const ChirpSchedule& schedule,
                             const QuantumState& psi0, const IntegratorConfig& cfg,
                             const StateObserver& observer = {});

// dρ/dt = -i[H, ρ] + Γ1 D[a]ρ (+ γφ D[n]ρ). A pure psi0 is promoted to ρ.
Trajectory propagate_lindblad(const SystemParams& params, const ChirpSchedule& schedule,
                              const QuantumState& rho0, const IntegratorConfig& cfg,
                              const StateObserver& observer = {});

// Landau-Zener probability of following the adiabatic branch through an isolated
// crossing whose coupling is coupling_scale * Ω/2.
double lz_oracle(double omega_mhz, double alpha_mhz_per_ns, double coupling_scale = 1.0);

}  // namespace ladder
