#include "ladder/measure.hpp"

#include "ladder/errors.hpp"
#include "ladder/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ladder {

void MeasurePulse::validate() const {
    if (!std::isfinite(threshold)) throw ValidationError("threshold", "must be finite");
    if (!(width >= 0.0) || !std::isfinite(width)) throw ValidationError("width", "must be >= 0");
}

double escape_weight(int n, const MeasurePulse& pulse) {
    const double d = static_cast<double>(n) - pulse.threshold;
    if (pulse.width == 0.0) return d > 0.0 ? 1.0 : (d == 0.0 ? 0.5 : 0.0);
    return 1.0 / (1.0 + std::exp(-d / pulse.width));
}

double escape_probability(std::span<const double> populations, const MeasurePulse& pulse) {
    pulse.validate();
    double s = 0.0;
    for (std::size_t n = 0; n < populations.size(); ++n) s += populations[n] * escape_weight(static_cast<int>(n), pulse);
    return s;
}

std::vector<double> integer_spaced_thresholds(int n_levels) {
    std::vector<double> k(static_cast<std::size_t>(n_levels) + 1);
    for (int i = 0; i <= n_levels; ++i) k[static_cast<std::size_t>(i)] = i - 0.5;
    return k;
}

EscapeCurve escape_curve(std::span<const double> populations, std::span<const double> thresholds, double width) {
    EscapeCurve c;
    c.thresholds.assign(thresholds.begin(), thresholds.end());
    c.escape.reserve(thresholds.size());
    for (double k : thresholds) c.escape.push_back(escape_probability(populations, {k, width}));
    return c;
}

namespace {

Extraction extract_sharp(const EscapeCurve& curve, const ExtractOptions& opt) {
    const int n_levels = opt.n_levels > 0 ? opt.n_levels : static_cast<int>(curve.thresholds.size()) - 1;
    // S at k = n - 1/2 for n = 0..n_levels; missing upper thresholds mean S = 0.
    std::vector<double> s(static_cast<std::size_t>(n_levels) + 1, 0.0);
    std::vector<bool> have(s.size(), false);
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        const double idx = curve.thresholds[i] + 0.5;
        const long n = std::lround(idx);
        if (std::abs(idx - static_cast<double>(n)) > 1e-9) {
            throw ValidationError("thresholds", "sharp inversion needs half-integer thresholds");
        }
        if (n >= 0 && n <= n_levels) {
            s[static_cast<std::size_t>(n)] = curve.escape[i];
            have[static_cast<std::size_t>(n)] = true;
        }
    }
    for (int n = 0; n < n_levels; ++n) {
        if (!have[static_cast<std::size_t>(n)]) {
            throw ValidationError("thresholds", "missing threshold k=" + std::to_string(n - 0.5));
        }
    }
    Extraction out;
    out.populations.resize(static_cast<std::size_t>(n_levels));
    const double tol = 3.0 * opt.noise_sigma * std::sqrt(2.0);
    for (int n = 0; n < n_levels; ++n) {
        const double d = s[static_cast<std::size_t>(n)] - s[static_cast<std::size_t>(n) + 1];
        if (d < 0.0) {
            out.max_violation = std::max(out.max_violation, -d);
            if (-d > tol + 1e-12) {
                out.inconsistent = true;
                out.diagnostic += "negative increment " + std::to_string(d) + " at level " + std::to_string(n) + "; ";
            }
        }
        out.populations[static_cast<std::size_t>(n)] = std::max(d, 0.0);
    }
    return out;
}

// min ||A x - b|| over x >= 0 with Σ x = 1, for when the unconstrained NNLS
// optimum overshoots Σ x <= 1. The multiplier μ of the sum constraint shifts
// the target to b - μ c with Aᵀc = 1, and Σ x(μ) is non-increasing in μ, so
// μ is found by bisection.
NnlsResult nnls_unit_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(a.cols());
    const Eigen::VectorXd c = a * (a.transpose() * a).completeOrthogonalDecomposition().solve(ones);
    if ((a.transpose() * c - ones).norm() > 1e-8 * ones.norm()) {
        throw InvariantViolation("escape model is rank deficient; add thresholds");
    }
    double lo = 0.0, hi = 1.0;
    NnlsResult at_hi = nnls(a, b - hi * c);
    while (at_hi.x.sum() > 1.0) {
        lo = hi;
        hi *= 2.0;
        at_hi = nnls(a, b - hi * c);
        if (hi > 1e12) throw InvariantViolation("sum-constrained inversion did not bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        NnlsResult r = nnls(a, b - mid * c);
        if (r.x.sum() > 1.0) {
            lo = mid;
        } else {
            hi = mid;
            at_hi = std::move(r);
        }
    }
    at_hi.residual_norm = (a * at_hi.x - b).norm();
    return at_hi;
}

Extraction extract_smooth(const EscapeCurve& curve, const ExtractOptions& opt) {
    const int n_levels = opt.n_levels > 0 ? opt.n_levels : static_cast<int>(curve.thresholds.size()) - 1;
    const auto m = static_cast<Eigen::Index>(curve.thresholds.size());
    Eigen::MatrixXd a(m, n_levels);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const MeasurePulse pulse{curve.thresholds[static_cast<std::size_t>(i)], opt.width};
        for (int n = 0; n < n_levels; ++n) a(i, n) = escape_weight(n, pulse);
        b(i) = curve.escape[static_cast<std::size_t>(i)];
    }
    NnlsResult r = nnls(a, b);
    if (r.x.sum() > 1.0) r = nnls_unit_sum(a, b);
    Extraction out;
    out.populations.assign(r.x.data(), r.x.data() + r.x.size());
    const Eigen::VectorXd resid = a * r.x - b;
    out.residual = resid.norm();
    out.max_violation = resid.cwiseAbs().maxCoeff();
    if (opt.noise_sigma > 0.0) {
        // The RMS misfit of a consistent curve is at most the noise level.
        const double rms = out.residual / std::sqrt(static_cast<double>(m));
        if (rms > 3.0 * opt.noise_sigma) {
            out.inconsistent = true;
            out.diagnostic = "rms misfit " + std::to_string(rms) + " exceeds 3 sigma";
        }
    }
    return out;
}

}  // namespace

Extraction extract_populations(const EscapeCurve& curve, const ExtractOptions& options) {
    if (curve.thresholds.size() != curve.escape.size()) {
        throw ValidationError("curve", "threshold and escape columns differ in length");
    }
    if (curve.thresholds.size() < 2) throw ValidationError("curve", "need at least two thresholds");
    if (options.width < 0.0) throw ValidationError("width", "must be >= 0");
    if (options.noise_sigma < 0.0) throw ValidationError("noise_sigma", "must be >= 0");
    for (double s : curve.escape) {
        if (!std::isfinite(s)) throw ValidationError("escape", "non-finite value");
    }
    Extraction out = options.width == 0.0 ? extract_sharp(curve, options) : extract_smooth(curve, options);
    if (options.width == 0.0) {
        std::vector<double> fwd;
        for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
            const double f = escape_probability(out.populations, {curve.thresholds[i], 0.0});
            fwd.push_back((f - curve.escape[i]) * (f - curve.escape[i]));
        }
        out.residual = std::sqrt(std::accumulate(fwd.begin(), fwd.end(), 0.0));
    }
    return out;
}

double locking_probability(std::span<const double> populations, int n_c) {
    if (n_c < 0 || n_c >= static_cast<int>(populations.size())) {
        throw ValidationError("n_c", "cutoff must satisfy 0 <= n_c < N");
    }
    double s = 0.0;
    for (std::size_t n = static_cast<std::size_t>(n_c) + 1; n < populations.size(); ++n) s += populations[n];
    return s;
}

int map_locking_cutoff(double n_res) { return static_cast<int>(std::ceil(n_res / 2.0)); }

}  // namespace ladder
