#include "ladder/state.hpp"

#include "ladder/errors.hpp"

#include <cmath>

namespace ladder {

QuantumState QuantumState::pure(Eigen::VectorXcd amplitudes) {
    if (amplitudes.size() < 1) throw ValidationError("state", "empty amplitude vector");
    return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::mixed(Eigen::MatrixXcd rho) {
    if (rho.rows() != rho.cols() || rho.rows() < 1) throw ValidationError("state", "density matrix must be square");
    return QuantumState(std::move(rho));
}

QuantumState QuantumState::fock(int n_levels, int n) {
    if (n < 0 || n >= n_levels) throw ValidationError("state", "Fock index outside truncation");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_levels);
    psi(n) = 1.0;
    return pure(std::move(psi));
}

QuantumState QuantumState::coherent(int n_levels, cplx amplitude) {
    Eigen::VectorXcd psi(n_levels);
    cplx c = std::exp(-0.5 * std::norm(amplitude));
    for (int n = 0; n < n_levels; ++n) {
        psi(n) = c;
        c *= amplitude / std::sqrt(n + 1.0);
    }
    psi.normalize();
    return pure(std::move(psi));
}

int QuantumState::dim() const noexcept {
    return is_pure() ? static_cast<int>(std::get<Eigen::VectorXcd>(data_).size())
                     : static_cast<int>(std::get<Eigen::MatrixXcd>(data_).rows());
}

const Eigen::VectorXcd& QuantumState::amplitudes() const {
    if (!is_pure()) throw std::logic_error("QuantumState: amplitudes() on a mixed state");
    return std::get<Eigen::VectorXcd>(data_);
}

const Eigen::MatrixXcd& QuantumState::rho() const {
    if (is_pure()) throw std::logic_error("QuantumState: rho() on a pure state");
    return std::get<Eigen::MatrixXcd>(data_);
}

Eigen::MatrixXcd QuantumState::density() const {
    if (is_pure()) {
        const auto& psi = amplitudes();
        return psi * psi.adjoint();
    }
    return rho();
}

std::vector<double> QuantumState::occupations() const {
    std::vector<double> p(static_cast<std::size_t>(dim()));
    if (is_pure()) {
        const auto& psi = amplitudes();
        for (int n = 0; n < dim(); ++n) p[static_cast<std::size_t>(n)] = std::norm(psi(n));
    } else {
        const auto& r = rho();
        for (int n = 0; n < dim(); ++n) p[static_cast<std::size_t>(n)] = r(n, n).real();
    }
    return p;
}

double QuantumState::mean_level() const {
    const auto p = occupations();
    double m = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
    return m;
}

double QuantumState::trace() const {
    if (is_pure()) return amplitudes().squaredNorm();
    return rho().trace().real();
}

double QuantumState::min_eigenvalue() const {
    if (is_pure()) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

void QuantumState::validate() const {
    const double tr = trace();
    if (std::abs(tr - 1.0) > kNormTol) {
        throw InvariantViolation("state normalization off by " + std::to_string(tr - 1.0));
    }
    if (is_pure()) return;
    const auto& r = rho();
    const double herm = (r - r.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) throw InvariantViolation("density matrix not Hermitian: " + std::to_string(herm));
    const double lmin = min_eigenvalue();
    if (lmin < -kPositivityTol) throw InvariantViolation("density matrix not positive: " + std::to_string(lmin));
}

QuantumState QuantumState::resized(int n_levels) const {
    const int keep = std::min(n_levels, dim());
    if (is_pure()) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_levels);
        psi.head(keep) = amplitudes().head(keep);
        return pure(std::move(psi));
    }
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n_levels, n_levels);
    r.topLeftCorner(keep, keep) = rho().topLeftCorner(keep, keep);
    return mixed(std::move(r));
}

}  // namespace ladder
