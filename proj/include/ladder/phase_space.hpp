#pragma once

// Wigner distributions of truncated Fock-basis states.
//
// Convention: dimensionless quadratures x = (a + a†)/√2, p = (a - a†)/(i√2), so
// the vacuum has variance 1/2 in each quadrature, W_vac(0,0) = 1/π and
// ∫∫ W dx dp = 1.

#include "ladder/state.hpp"

#include <Eigen/Dense>

namespace ladder {

struct WignerGridSpec {
    double x_extent{0.0};  // half-width; 0 picks sqrt(2<n>) + 4
    double p_extent{0.0};
    int resolution{201};   // points per axis
};

struct WignerGrid {
    double x_extent{0.0};
    double p_extent{0.0};
    Eigen::MatrixXd values;  // values(i_p, i_x), row-major in p

    int nx() const noexcept { return static_cast<int>(values.cols()); }
    int np() const noexcept { return static_cast<int>(values.rows()); }
    double x(int i) const noexcept { return -x_extent + 2.0 * x_extent * i / (nx() - 1); }
    double p(int j) const noexcept { return -p_extent + 2.0 * p_extent * j / (np() - 1); }
    double integral() const;  // trapezoid rule
};

// Throws InvariantViolation if the grid misses more than 1e-3 of the norm.
WignerGrid wigner(const QuantumState& state, const WignerGridSpec& spec = {});

double wigner_at(const QuantumState& state, double x, double p);

// Angular structure of W on a circle of fixed radius.
struct RingStats {
    double radius{0.0};
    double circular_variance{0.0};  // 0: single phase, 1: uniform ring
    double mean_phase{0.0};
    double relative_spread{0.0};    // (max - min) / |mean| of W along the circle
};

RingStats ring_stats(const QuantumState& state, double radius, int n_angles = 256);

// Radius maximizing the angle-averaged W(r) r.
double dominant_radius(const QuantumState& state);

}  // namespace ladder
