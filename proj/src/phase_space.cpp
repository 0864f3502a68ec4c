#include "ladder/phase_space.hpp"

#include "ladder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ladder {

namespace {

// Clenshaw-style recurrence over the matrix elements |m><n|, equivalent to the
// associated-Laguerre expansion but free of factorial overflow.
class WignerKernel {
public:
    explicit WignerKernel(const Eigen::MatrixXcd& rho) : rho_(rho), w_(static_cast<std::size_t>(rho.rows())) {
        const auto n = static_cast<std::size_t>(rho.rows());
        sqrt_.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k) sqrt_[k] = std::sqrt(static_cast<double>(k));
    }

    double operator()(double x, double p) {
        const Eigen::Index dim = rho_.rows();
        const cplx a(x / std::numbers::sqrt2, p / std::numbers::sqrt2);
        const cplx two_a = 2.0 * a;
        const cplx two_ac = std::conj(two_a);
        w_[0] = std::exp(-2.0 * std::norm(a)) / std::numbers::pi;
        double out = rho_(0, 0).real() * w_[0].real();
        for (Eigen::Index n = 1; n < dim; ++n) {
            w_[n] = two_a * w_[n - 1] / sqrt_[n];
            out += 2.0 * (rho_(0, n) * w_[n]).real();
        }
        for (Eigen::Index m = 1; m < dim; ++m) {
            cplx prev = w_[m];
            w_[m] = (two_ac * prev - sqrt_[m] * w_[m - 1]) / sqrt_[m];
            out += (rho_(m, m) * w_[m]).real();
            for (Eigen::Index n = m + 1; n < dim; ++n) {
                const cplx next = (two_a * w_[n - 1] - sqrt_[m] * prev) / sqrt_[n];
                prev = w_[n];
                w_[n] = next;
                out += 2.0 * (rho_(m, n) * w_[n]).real();
            }
        }
        return out;
    }

private:
    const Eigen::MatrixXcd& rho_;
    std::vector<cplx> w_;
    std::vector<double> sqrt_;
};

}  // namespace

double WignerGrid::integral() const {
    const double hx = 2.0 * x_extent / (nx() - 1);
    const double hp = 2.0 * p_extent / (np() - 1);
    double s = 0.0;
    for (int j = 0; j < np(); ++j) {
        const double wj = (j == 0 || j == np() - 1) ? 0.5 : 1.0;
        for (int i = 0; i < nx(); ++i) {
            const double wi = (i == 0 || i == nx() - 1) ? 0.5 : 1.0;
            s += wi * wj * values(j, i);
        }
    }
    return s * hx * hp;
}

WignerGrid wigner(const QuantumState& state, const WignerGridSpec& spec) {
    if (spec.resolution < 3) throw ValidationError("resolution", "need at least 3 points per axis");
    const double auto_extent = std::sqrt(2.0 * state.mean_level()) + 4.0;
    WignerGrid g;
    g.x_extent = spec.x_extent > 0.0 ? spec.x_extent : auto_extent;
    g.p_extent = spec.p_extent > 0.0 ? spec.p_extent : auto_extent;
    g.values.resize(spec.resolution, spec.resolution);
    const Eigen::MatrixXcd rho = state.density();
    WignerKernel kernel(rho);
    for (int j = 0; j < spec.resolution; ++j) {
        for (int i = 0; i < spec.resolution; ++i) g.values(j, i) = kernel(g.x(i), g.p(j));
    }
    const double norm = g.integral();
    if (std::abs(norm - state.trace()) > 1e-3) {
        throw InvariantViolation("Wigner grid under-covers the state (integral " + std::to_string(norm) + ")");
    }
    return g;
}

double wigner_at(const QuantumState& state, double x, double p) {
    const Eigen::MatrixXcd rho = state.density();
    WignerKernel kernel(rho);
    return kernel(x, p);
}

RingStats ring_stats(const QuantumState& state, double radius, int n_angles) {
    const Eigen::MatrixXcd rho = state.density();
    WignerKernel kernel(rho);
    RingStats out;
    out.radius = radius;
    double w_sum = 0.0, w_min = std::numeric_limits<double>::infinity(), w_max = -w_min, mean = 0.0;
    cplx moment{0.0, 0.0};
    for (int k = 0; k < n_angles; ++k) {
        const double th = 2.0 * std::numbers::pi * k / n_angles;
        const double w = kernel(radius * std::cos(th), radius * std::sin(th));
        w_min = std::min(w_min, w);
        w_max = std::max(w_max, w);
        mean += w / n_angles;
        const double wp = std::max(w, 0.0);
        w_sum += wp;
        moment += wp * std::polar(1.0, th);
    }
    out.circular_variance = w_sum > 0.0 ? 1.0 - std::abs(moment) / w_sum : 1.0;
    out.mean_phase = std::arg(moment);
    out.relative_spread = std::abs(mean) > 0.0 ? (w_max - w_min) / std::abs(mean) : 0.0;
    return out;
}

double dominant_radius(const QuantumState& state) {
    const Eigen::MatrixXcd rho = state.density();
    WignerKernel kernel(rho);
    const double r_max = std::sqrt(2.0 * state.mean_level()) + 4.0;
    constexpr int n_r = 200, n_th = 64;
    double best_r = 0.0, best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n_r; ++i) {
        const double r = r_max * i / n_r;
        double s = 0.0;
        for (int k = 0; k < n_th; ++k) {
            const double th = 2.0 * std::numbers::pi * k / n_th;
            s += kernel(r * std::cos(th), r * std::sin(th));
        }
        if (s * r > best) {
            best = s * r;
            best_r = r;
        }
    }
    return best_r;
}

}  // namespace ladder
