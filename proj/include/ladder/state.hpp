#pragma once

#include <Eigen/Dense>

#include <complex>
#include <variant>
#include <vector>

namespace ladder {

using cplx = std::complex<double>;

// Truncated Fock-basis state, either pure (amplitudes) or mixed (density matrix).
class QuantumState {
public:
    static QuantumState pure(Eigen::VectorXcd amplitudes);
    static QuantumState mixed(Eigen::MatrixXcd rho);
    static QuantumState fock(int n_levels, int n);
    // Coherent state |a> truncated to n_levels and renormalized.
    static QuantumState coherent(int n_levels, cplx amplitude);

    bool is_pure() const noexcept { return std::holds_alternative<Eigen::VectorXcd>(data_); }
    int dim() const noexcept;

    const Eigen::VectorXcd& amplitudes() const;  // throws if mixed
    const Eigen::MatrixXcd& rho() const;         // throws if pure
    Eigen::MatrixXcd density() const;            // ρ for either representation

    std::vector<double> occupations() const;
    double mean_level() const;
    double trace() const;

    // Throws InvariantViolation if normalization, Hermiticity or positivity
    // fall outside the stated tolerances.
    void validate() const;

    // Smallest eigenvalue of ρ (0 for pure states up to rounding).
    double min_eigenvalue() const;

    // Copy with n_levels changed: pads with zeros or drops the top levels.
    QuantumState resized(int n_levels) const;

private:
    explicit QuantumState(std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> d) : data_(std::move(d)) {}
    std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data_;
};

inline constexpr double kNormTol = 1e-9;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPositivityTol = 1e-8;

}  // namespace ladder
