#pragma once

// Anharmonic ladder model: level structure, rotating-frame Hamiltonian and
// its dressed spectrum.
//
// Level energies follow the Kerr form E_n/h = n f01 - (beta_r f01 / 2) n (n-1),
// so transition frequencies decrease linearly, f_{n,n+1} = f01 (1 - n beta_r).
// In the frame rotating at the drive frequency f_d (RWA) the Hamiltonian is
// tridiagonal: diagonal Δ_n = 2π[n (f01 - f_d) - (beta_r f01 / 2) n (n-1)],
// off-diagonal g_n = sqrt(n+1) Ω/2 with Ω the 0-1 Rabi frequency.

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ladder {

struct SystemParams {
    double f01_ghz{6.0};       // first transition frequency
    double beta_r{0.023};      // relative anharmonicity (f01 - f12) / f01
    int n_levels{30};          // Fock-space truncation
    double t1_ns{300.0};       // energy relaxation time of |1>; +inf disables decay
    double gamma_phi{0.0};     // optional pure-dephasing rate [1/ns], off by default

    // Absolute anharmonicity β = 2π beta_r f01 [rad/ns].
    double beta() const noexcept;
    // β/2π in MHz.
    double beta_mhz() const noexcept { return beta_r * f01_ghz * 1e3; }
    bool has_decay() const noexcept { return t1_ns < std::numeric_limits<double>::infinity(); }

    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct DriveParams {
    double omega_mhz{0.0};  // Ω/2π
    double f_drive_ghz{6.0};

    void validate() const;
    // Non-empty when Ω or beta_r f01 exceeds f01/10 and the RWA is questionable.
    std::optional<std::string> rwa_warning(const SystemParams& params) const;
};

struct RotFrameHamiltonian {
    std::vector<double> diag;     // Δ_n [rad/ns]
    std::vector<double> offdiag;  // g_n between n and n+1 [rad/ns]

    int dim() const noexcept { return static_cast<int>(diag.size()); }
    Eigen::MatrixXd dense() const;
};

// f_{n,n+1} in GHz; throws std::out_of_range unless 0 <= n <= n_levels-2.
double transition_frequency(const SystemParams& params, int n);

// Level index (continuous) whose transition frequency equals f_drive.
double resonant_level(const SystemParams& params, double f_drive_ghz) noexcept;

// Drive frequency at which levels n and n+1 cross in the rotating frame.
double crossing_frequency(const SystemParams& params, int n);

std::vector<double> rotating_detunings(const SystemParams& params, double f_drive_ghz);

RotFrameHamiltonian build_hamiltonian(const SystemParams& params, const DriveParams& drive);

struct DressedSpectrum {
    std::vector<double> detuning_mhz;           // f_d - f01
    std::vector<std::vector<double>> energies;  // [grid point][branch], ascending, MHz
};

// Eigenvalues of the rotating-frame Hamiltonian along a grid of drive detunings
// (MHz, relative to f01). Branches are ordered by energy, which is the adiabatic
// labelling whenever Ω > 0.
DressedSpectrum dressed_spectrum(const SystemParams& params, double omega_mhz,
                                 std::span<const double> detuning_grid_mhz);

// Eigenvector of the highest dressed level. For a downward chirp starting above
// f01 this is the branch adiabatically connected to |0>.
Eigen::VectorXd adiabatic_branch_state(const RotFrameHamiltonian& h);

}  // namespace ladder
