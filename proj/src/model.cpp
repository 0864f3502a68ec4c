#include "ladder/model.hpp"

#include "ladder/errors.hpp"
#include "ladder/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ladder {

double SystemParams::beta() const noexcept { return units::two_pi * beta_r * f01_ghz; }

void SystemParams::validate() const {
    if (!(f01_ghz > 0.0) || !std::isfinite(f01_ghz)) throw ValidationError("f01", "must be positive");
    if (!(beta_r > 0.0 && beta_r < 1.0)) throw ValidationError("beta_r", "must lie in (0, 1)");
    if (n_levels < 2) throw ValidationError("n_levels", "truncation needs at least 2 levels");
    if (!(t1_ns > 0.0)) throw ValidationError("t1", "must be positive (use inf to disable decay)");
    if (!(gamma_phi >= 0.0)) throw ValidationError("gamma_phi", "must be non-negative");
    // f_{n,n+1} > 0 for every represented transition.
    if (static_cast<double>(n_levels - 2) * beta_r >= 1.0) {
        std::ostringstream os;
        os << "ladder turns over inside the truncation (n_levels - 2 = " << n_levels - 2
           << " >= 1/beta_r = " << 1.0 / beta_r << ")";
        throw ValidationError("n_levels", os.str());
    }
}

void DriveParams::validate() const {
    if (!(omega_mhz >= 0.0) || !std::isfinite(omega_mhz)) throw ValidationError("omega", "must be >= 0");
    if (!(f_drive_ghz > 0.0)) throw ValidationError("f_drive", "must be positive");
}

std::optional<std::string> DriveParams::rwa_warning(const SystemParams& params) const {
    const double limit_mhz = params.f01_ghz * 1e3 / 10.0;
    if (omega_mhz > limit_mhz) return "drive amplitude exceeds f01/10; RWA may be inaccurate";
    if (params.beta_mhz() > limit_mhz) return "anharmonicity exceeds f01/10; RWA may be inaccurate";
    return std::nullopt;
}

Eigen::MatrixXd RotFrameHamiltonian::dense() const {
    const int n = dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) {
        h(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
        h(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
    return h;
}

double transition_frequency(const SystemParams& params, int n) {
    if (n < 0 || n > params.n_levels - 2) {
        throw std::out_of_range("transition_frequency: level " + std::to_string(n) +
                                " outside [0, " + std::to_string(params.n_levels - 2) + "]");
    }
    return params.f01_ghz * (1.0 - n * params.beta_r);
}

double resonant_level(const SystemParams& params, double f_drive_ghz) noexcept {
    return (params.f01_ghz - f_drive_ghz) / (params.beta_r * params.f01_ghz);
}

double crossing_frequency(const SystemParams& params, int n) { return transition_frequency(params, n); }

std::vector<double> rotating_detunings(const SystemParams& params, double f_drive_ghz) {
    if (!(f_drive_ghz > 0.0)) throw ValidationError("f_drive", "must be positive");
    const int n_levels = params.n_levels;
    const double detuning = params.f01_ghz - f_drive_ghz;
    const double half_anh = 0.5 * params.beta_r * params.f01_ghz;
    std::vector<double> d(static_cast<std::size_t>(n_levels));
    for (int n = 0; n < n_levels; ++n) {
        d[static_cast<std::size_t>(n)] =
            units::two_pi * (n * detuning - half_anh * n * (n - 1.0));
    }
    return d;
}

RotFrameHamiltonian build_hamiltonian(const SystemParams& params, const DriveParams& drive) {
    if (params.n_levels < 2) throw ValidationError("n_levels", "truncation needs at least 2 levels");
    drive.validate();
    RotFrameHamiltonian h;
    h.diag = rotating_detunings(params, drive.f_drive_ghz);
    const double half_rabi = 0.5 * units::mhz_to_rad_per_ns(drive.omega_mhz);
    h.offdiag.resize(static_cast<std::size_t>(params.n_levels - 1));
    for (int n = 0; n + 1 < params.n_levels; ++n) {
        h.offdiag[static_cast<std::size_t>(n)] = std::sqrt(n + 1.0) * half_rabi;
    }
    return h;
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_tridiagonal(const RotFrameHamiltonian& h,
                                                                 int options) {
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(h.diag.data(), h.dim());
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(h.offdiag.data(), h.dim() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, e, options);
    return solver;
}

}  // namespace

DressedSpectrum dressed_spectrum(const SystemParams& params, double omega_mhz,
                                 std::span<const double> detuning_grid_mhz) {
    if (!std::is_sorted(detuning_grid_mhz.begin(), detuning_grid_mhz.end())) {
        throw ValidationError("detuning_grid", "must be sorted ascending");
    }
    DressedSpectrum out;
    out.detuning_mhz.assign(detuning_grid_mhz.begin(), detuning_grid_mhz.end());
    out.energies.reserve(detuning_grid_mhz.size());
    for (std::size_t i = 0; i < detuning_grid_mhz.size(); ++i) {
        const double det = detuning_grid_mhz[i];
        if (!std::isfinite(det)) throw ValidationError("detuning_grid", "non-finite entry");
        const DriveParams drive{omega_mhz, params.f01_ghz + det * 1e-3};
        const auto solver = solve_tridiagonal(build_hamiltonian(params, drive), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("dressed_spectrum: eigensolver failed at detuning " +
                                     std::to_string(det) + " MHz (grid index " + std::to_string(i) + ")");
        }
        std::vector<double> row(static_cast<std::size_t>(params.n_levels));
        for (int k = 0; k < params.n_levels; ++k) {
            row[static_cast<std::size_t>(k)] = units::rad_per_ns_to_mhz(solver.eigenvalues()(k));
        }
        out.energies.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd adiabatic_branch_state(const RotFrameHamiltonian& h) {
    const auto solver = solve_tridiagonal(h, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("adiabatic_branch_state: eigensolver failed");
    return solver.eigenvectors().col(h.dim() - 1);
}

}  // namespace ladder
