#include "ladder/classical.hpp"

#include "ladder/errors.hpp"
#include "ladder/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

namespace ladder {

void DuffingParams::validate() const {
    if (!(chirp_rate > 0.0) || !std::isfinite(chirp_rate)) throw ValidationError("chirp_rate", "must be > 0");
    if (!(gamma >= 0.0)) throw ValidationError("gamma", "must be >= 0");
    if (!(lambda > 0.0)) throw ValidationError("lambda", "softening coefficient must be > 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon", "must be >= 0");
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
    if (!(t_start_scale > 0.0)) throw ValidationError("t_start_scale", "must be > 0");
    // The locked amplitude must stay inside the well: (8/3)(1 - ω_f) < 1.
    if (!(final_frequency > 0.625 && final_frequency < 1.0)) {
        throw ValidationError("final_frequency", "must lie in (0.625, 1)");
    }
    if (!(capture_fraction > 0.0 && capture_fraction < 1.0)) {
        throw ValidationError("capture_fraction", "must lie in (0, 1)");
    }
}

double DuffingParams::t_begin() const { return -t_start_scale / std::sqrt(chirp_rate); }
double DuffingParams::t_end() const { return (1.0 - final_frequency) / chirp_rate; }

double DuffingParams::locked_energy() const {
    const double a2 = 8.0 * (1.0 - final_frequency) / (3.0 * lambda);
    return 0.5 * a2 - 0.25 * lambda * a2 * a2;
}

double DuffingParams::capture_energy() const { return capture_fraction * locked_energy(); }

double duffing_energy(double x, double v, double lambda) {
    return 0.5 * v * v + 0.5 * x * x - 0.25 * lambda * x * x * x * x;
}

DuffingTrajectory integrate_duffing(const DuffingParams& p, DuffingInitial initial, int record_every) {
    p.validate();
    const double t0 = p.t_begin();
    const double t1 = p.t_end();
    const long steps = std::lround((t1 - t0) / p.dt);
    const double h = (t1 - t0) / static_cast<double>(steps);
    const double x_wall = 1.0 / std::sqrt(p.lambda);
    const long quarter_start = steps - steps / 4;

    // φ(t) = t - ν t²/2 relative to φ(0) = 0, evaluated exactly.
    auto force = [&](double t, double x, double v) {
        const double phi = t - 0.5 * p.chirp_rate * t * t;
        return p.epsilon * std::cos(phi) - 2.0 * p.gamma * v - x + p.lambda * x * x * x;
    };
    auto rel_phase = [&](double t, double x, double v) {
        const double phi = t - 0.5 * p.chirp_rate * t * t;
        return std::atan2(-v, x) - phi;
    };

    DuffingTrajectory out;
    double x = initial.x, v = initial.v, t = t0;
    auto record = [&] {
        out.t.push_back(t);
        out.x.push_back(x);
        out.v.push_back(v);
        out.energy.push_back(duffing_energy(x, v, p.lambda));
    };
    if (record_every > 0) record();

    double psi_prev = 0.0, psi_unwrapped = 0.0, psi_ref = 0.0, drift = 0.0;
    for (long k = 0; k < steps; ++k) {
        const double k1x = v, k1v = force(t, x, v);
        const double k2x = v + 0.5 * h * k1v, k2v = force(t + 0.5 * h, x + 0.5 * h * k1x, k2x);
        const double k3x = v + 0.5 * h * k2v, k3v = force(t + 0.5 * h, x + 0.5 * h * k2x, k3x);
        const double k4x = v + h * k3v, k4v = force(t + h, x + h * k3x, k4x);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = t0 + static_cast<double>(k + 1) * h;

        if (!std::isfinite(x) || std::abs(x) > x_wall) {
            out.result.blew_up = true;
            break;
        }
        if (k + 1 >= quarter_start) {
            const double psi = rel_phase(t, x, v);
            if (k + 1 == quarter_start) {
                psi_prev = psi;
                psi_unwrapped = psi_ref = psi;
            } else {
                psi_unwrapped += std::remainder(psi - psi_prev, 2.0 * std::numbers::pi);
                psi_prev = psi;
                drift = std::max(drift, std::abs(psi_unwrapped - psi_ref));
            }
        }
        if (record_every > 0 && (k + 1) % record_every == 0) record();
    }

    out.result.final_energy = duffing_energy(x, v, p.lambda);
    out.result.phase_drift = out.result.blew_up ? std::numeric_limits<double>::infinity() : drift;
    const double e_ref = p.capture_energy();
    out.result.captured = !out.result.blew_up && p.epsilon > 0.0 && out.result.final_energy > e_ref &&
                          out.result.phase_drift < std::numbers::pi;
    return out;
}

double capture_probability(const DuffingParams& params, const Ensemble& ensemble, int threads) {
    if (ensemble.size < 1) throw ValidationError("ensemble.size", "must be >= 1");
    if (!(ensemble.temperature >= 0.0)) throw ValidationError("ensemble.temperature", "must be >= 0");
    params.validate();
    if (params.epsilon == 0.0) return 0.0;
    std::vector<char> captured(static_cast<std::size_t>(ensemble.size), 0);
    parallel_for(captured.size(), threads, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(ensemble.seed), static_cast<std::uint32_t>(ensemble.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> noise(0.0, std::sqrt(ensemble.temperature));
        DuffingInitial ic;
        if (ensemble.temperature > 0.0) {
            ic.x = noise(rng);
            ic.v = noise(rng);
        }
        captured[i] = integrate_duffing(params, ic).result.captured ? 1 : 0;
    });
    return static_cast<double>(std::count(captured.begin(), captured.end(), 1)) / ensemble.size;
}

double duffing_threshold_estimate(double chirp_rate, double lambda) {
    // Averaging gives i dA/dt = (-ν t + 3λ|A|²/8) A + ε/2, the universal
    // autoresonance equation with threshold 0.411 ν^{3/4} (3λ/8)^{-1/2} on ε/2.
    return 0.822 * std::pow(chirp_rate, 0.75) / std::sqrt(3.0 * lambda / 8.0);
}

DuffingThreshold duffing_threshold(DuffingParams params, const Ensemble& ensemble, double rel_tol, int threads) {
    DuffingThreshold out;
    out.chirp_rate = params.chirp_rate;
    auto frac = [&](double eps) {
        params.epsilon = eps;
        ++out.evaluations;
        return capture_probability(params, ensemble, threads);
    };
    const double guess = duffing_threshold_estimate(params.chirp_rate, params.lambda);
    double lo = 0.5 * guess, hi = 2.0 * guess;
    for (int k = 0; frac(lo) >= 0.5; ++k) {
        if (k >= 8) throw InvariantViolation("capture threshold bracket failure: captured at eps=" + std::to_string(lo));
        hi = lo;
        lo *= 0.5;
    }
    for (int k = 0; frac(hi) < 0.5; ++k) {
        if (k >= 8) throw InvariantViolation("capture threshold bracket failure: no capture at eps=" + std::to_string(hi));
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > rel_tol * lo) {
        const double mid = std::sqrt(lo * hi);
        if (frac(mid) >= 0.5) hi = mid;
        else lo = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.epsilon = std::sqrt(lo * hi);
    return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit", "need >= 2 paired points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("fit", "power-law fit needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cxx += (lx[i] - mx) * (lx[i] - mx);
        cxy += (lx[i] - mx) * (ly[i] - my);
        cyy += (ly[i] - my) * (ly[i] - my);
    }
    if (cxx <= 0.0) throw ValidationError("fit", "x values are all equal");
    PowerLawFit f;
    f.exponent = cxy / cxx;
    f.prefactor = std::exp(my - f.exponent * mx);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += std::pow(ly[i] - my - f.exponent * (lx[i] - mx), 2);
    f.r_squared = cyy > 0.0 ? 1.0 - sse / cyy : 1.0;
    f.exponent_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / cxx) : 0.0;
    return f;
}

ClassicalScaling classical_threshold_scaling(const std::vector<double>& chirp_rates, const DuffingParams& params,
                                             const Ensemble& ensemble, int threads) {
    if (chirp_rates.size() < 4) throw ValidationError("chirp_rates", "need at least 4 rates");
    const auto [mn, mx] = std::minmax_element(chirp_rates.begin(), chirp_rates.end());
    if (*mx < 10.0 * *mn * (1.0 - 1e-12)) throw ValidationError("chirp_rates", "rates must span at least one decade");
    ClassicalScaling out;
    std::vector<double> eps;
    for (double rate : chirp_rates) {
        DuffingParams p = params;
        p.chirp_rate = rate;
        out.thresholds.push_back(duffing_threshold(p, ensemble, 0.005, threads));
        eps.push_back(out.thresholds.back().epsilon);
    }
    out.fit = fit_power_law(chirp_rates, eps);
    return out;
}

}  // namespace ladder
