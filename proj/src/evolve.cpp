#include "ladder/evolve.hpp"

#include "ladder/errors.hpp"
#include "ladder/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace ladder {

void ChirpSchedule::validate(const SystemParams& params) const {
    if (!(alpha_mhz_per_ns > 0.0)) throw ValidationError("alpha", "chirp rate must be positive");
    if (!(omega_mhz >= 0.0)) throw ValidationError("omega", "must be >= 0");
    if (!(omega_hold_mhz >= 0.0)) throw ValidationError("omega_hold", "must be >= 0");
    if (!(t_rise_ns >= 0.0)) throw ValidationError("t_rise", "must be >= 0");
    if (!(t_chirp_ns >= 0.0)) throw ValidationError("t_chirp", "must be >= 0");
    if (!(t_hold_ns >= 0.0)) throw ValidationError("t_hold", "must be >= 0");
    if (!(f_start_ghz > params.f01_ghz)) throw ValidationError("f_start", "chirp must start above f01");
    if (!(f_end_ghz() > 0.0)) throw ValidationError("t_chirp", "chirp ends at a non-positive frequency");
}

ChirpSchedule ChirpSchedule::to_level(const SystemParams& params, double alpha_mhz_per_ns, double omega_mhz,
                                      double n_target, double start_detuning_mhz, double t_rise_ns) {
    ChirpSchedule s;
    s.f_start_ghz = params.f01_ghz + start_detuning_mhz * 1e-3;
    s.alpha_mhz_per_ns = alpha_mhz_per_ns;
    s.omega_mhz = omega_mhz;
    s.t_rise_ns = t_rise_ns;
    const double f_end = params.f01_ghz * (1.0 - n_target * params.beta_r);
    s.t_chirp_ns = (s.f_start_ghz - f_end) / (alpha_mhz_per_ns * 1e-3);
    s.omega_hold_mhz = omega_mhz;
    s.t_hold_ns = 0.0;
    return s;
}

DriveSample drive_envelope(const ChirpSchedule& s, double t) {
    if (t < s.t_rise_ns) {
        const double ramp = t <= 0.0 ? 0.0 : 0.5 * (1.0 - std::cos(std::numbers::pi * t / s.t_rise_ns));
        return {s.omega_mhz * ramp, s.f_start_ghz};
    }
    if (t <= s.chirp_end_ns()) {
        return {s.omega_mhz, s.f_start_ghz - s.alpha_mhz_per_ns * 1e-3 * (t - s.t_rise_ns)};
    }
    return {s.omega_hold_mhz, s.f_end_ghz()};
}

void IntegratorConfig::validate() const {
    if (dt_ns < 0.0) throw ValidationError("dt", "must be positive (or 0 for automatic)");
    if (!(tolerance > 0.0)) throw ValidationError("tolerance", "must be positive");
    if (!(leak_tol > 0.0)) throw ValidationError("leak_tol", "must be positive");
    if (record_stride < 0) throw ValidationError("record_stride", "must be >= 0");
    if (!(record_interval_ns > 0.0)) throw ValidationError("record_interval", "must be positive");
    if (t_start_ns < 0.0) throw ValidationError("t_start", "must be >= 0");
}

double auto_time_step(const SystemParams& params, const ChirpSchedule& s, bool lindblad) {
    return auto_time_step(params, s, lindblad, 0.0, s.duration_ns());
}

double auto_time_step(const SystemParams& params, const ChirpSchedule& s, bool lindblad, double t_from,
                      double t_to) {
    // Δ_n is linear in f_d and f_d is monotone in t, so the extremes sit at the ends.
    const DriveSample a = drive_envelope(s, t_from);
    const DriveSample b = drive_envelope(s, t_to);
    double d_lo = 0.0, d_hi = 0.0;
    for (double f : {a.f_drive_ghz, b.f_drive_ghz}) {
        for (double d : rotating_detunings(params, f)) {
            d_lo = std::min(d_lo, d);
            d_hi = std::max(d_hi, d);
        }
    }
    double omega_mhz = std::max(a.omega_mhz, b.omega_mhz);
    if (t_from < s.chirp_end_ns() && t_to > s.t_rise_ns) omega_mhz = std::max(omega_mhz, s.omega_mhz);
    if (t_to > s.chirp_end_ns()) omega_mhz = std::max(omega_mhz, s.omega_hold_mhz);
    const double omega = units::mhz_to_rad_per_ns(omega_mhz);
    const double g_max = 0.5 * omega * std::sqrt(params.n_levels - 1.0);
    double rho = lindblad ? (d_hi - d_lo) + 4.0 * g_max : std::max(d_hi, -d_lo) + 2.0 * g_max;
    rho = std::max({rho, omega, params.beta()});
    return std::min(0.02, units::two_pi / (50.0 * rho));
}

std::vector<double> Trajectory::locking_probability(int n_c) const {
    std::vector<double> out;
    out.reserve(occupations.size());
    for (const auto& p : occupations) {
        double s = 0.0;
        for (std::size_t n = static_cast<std::size_t>(std::max(n_c + 1, 0)); n < p.size(); ++n) s += p[n];
        out.push_back(s);
    }
    return out;
}

std::size_t Trajectory::index_at(double t) const {
    auto it = std::lower_bound(times_ns.begin(), times_ns.end(), t - 1e-9);
    if (it == times_ns.end()) return times_ns.empty() ? 0 : times_ns.size() - 1;
    return static_cast<std::size_t>(it - times_ns.begin());
}

double lz_oracle(double omega_mhz, double alpha_mhz_per_ns, double coupling_scale) {
    if (!(alpha_mhz_per_ns > 0.0)) throw ValidationError("alpha", "chirp rate must be positive");
    const double omega = units::mhz_to_rad_per_ns(omega_mhz) * coupling_scale;
    const double alpha = units::chirp_to_rad_per_ns2(alpha_mhz_per_ns);
    return 1.0 - std::exp(-std::numbers::pi * omega * omega / (2.0 * alpha));
}

namespace {

// Instantaneous tridiagonal Hamiltonian of the ladder under the schedule.
class LadderDrive {
public:
    LadderDrive(const SystemParams& p, const ChirpSchedule& s) : params_(p), schedule_(s) {
        const int n = p.n_levels;
        kerr_.resize(static_cast<std::size_t>(n));
        sqrt_np1_.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            kerr_[static_cast<std::size_t>(k)] = std::numbers::pi * p.beta_r * p.f01_ghz * k * (k - 1.0);
            sqrt_np1_[static_cast<std::size_t>(k)] = std::sqrt(k + 1.0);
        }
        diag_.resize(static_cast<std::size_t>(n));
        off_.assign(static_cast<std::size_t>(n), 0.0);  // off_[N-1] stays 0 as a sentinel
    }

    // The amplitude jumps at the chirp end; a step starting exactly there must
    // see the hold amplitude, so the driver announces which side it is on.
    void set_segment(double t_lo) { in_hold_ = t_lo >= schedule_.chirp_end_ns(); }

    void update(double t) {
        DriveSample d = drive_envelope(schedule_, t);
        if (in_hold_) d.omega_mhz = schedule_.omega_hold_mhz;
        const double delta = units::two_pi * (params_.f01_ghz - d.f_drive_ghz);
        const double half_rabi = 0.5 * units::mhz_to_rad_per_ns(d.omega_mhz);
        const std::size_t n = diag_.size();
        for (std::size_t k = 0; k < n; ++k) diag_[k] = static_cast<double>(k) * delta - kerr_[k];
        for (std::size_t k = 0; k + 1 < n; ++k) off_[k] = sqrt_np1_[k] * half_rabi;
    }

    const std::vector<double>& diag() const noexcept { return diag_; }
    const std::vector<double>& off() const noexcept { return off_; }

private:
    SystemParams params_;
    ChirpSchedule schedule_;
    std::vector<double> kerr_, sqrt_np1_, diag_, off_;
    bool in_hold_{false};
};

constexpr cplx kI{0.0, 1.0};

struct NormDrift : InvariantViolation {
    using InvariantViolation::InvariantViolation;
};

struct UnitaryRhs {
    LadderDrive drive;
    double shift{0.0};

    void operator()(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        drive.update(t);
        const auto& d = drive.diag();
        const auto& g = drive.off();
        const Eigen::Index n = y.size();
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            cplx h = (d[uk] - shift) * y(k);
            if (k > 0) h += g[uk - 1] * y(k - 1);
            if (k + 1 < n) h += g[uk] * y(k + 1);
            dy(k) = -kI * h;
        }
    }

    // Gauge shift: subtract ⟨Δ⟩ so populated components rotate slowly.
    void set_shift(double t, const Eigen::VectorXcd& y) {
        drive.update(t);
        const auto& d = drive.diag();
        double s = 0.0, norm = 0.0;
        for (Eigen::Index k = 0; k < y.size(); ++k) {
            const double p = std::norm(y(k));
            s += p * d[static_cast<std::size_t>(k)];
            norm += p;
        }
        shift = norm > 0.0 ? s / norm : 0.0;
    }
    void set_shift(double, const Eigen::MatrixXcd&) {}
};

struct LindbladRhs {
    LadderDrive drive;
    double gamma1{0.0};
    double gamma_phi{0.0};

    void operator()(double t, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
        drive.update(t);
        const double* d = drive.diag().data();
        const double* g = drive.off().data();
        const Eigen::Index n_lev = rho.rows();
        const cplx* r = rho.data();
        cplx* o = out.data();
        const auto at = [n_lev](Eigen::Index m, Eigen::Index n) { return m + n * n_lev; };
        for (Eigen::Index n = 0; n < n_lev; ++n) {
            for (Eigen::Index m = n; m < n_lev; ++m) {
                const cplx rmn = r[at(m, n)];
                cplx comm = (d[m] - d[n]) * rmn;
                if (m > 0) comm += g[m - 1] * r[at(m - 1, n)];
                if (m + 1 < n_lev) comm += g[m] * r[at(m + 1, n)];
                if (n > 0) comm -= g[n - 1] * r[at(m, n - 1)];
                if (n + 1 < n_lev) comm -= g[n] * r[at(m, n + 1)];
                cplx v{comm.imag(), -comm.real()};  // -i * comm
                if (gamma1 > 0.0) {
                    if (m + 1 < n_lev) {
                        v += gamma1 * std::sqrt(static_cast<double>((m + 1) * (n + 1))) * r[at(m + 1, n + 1)];
                    }
                    v -= 0.5 * gamma1 * static_cast<double>(m + n) * rmn;
                }
                if (gamma_phi > 0.0) {
                    const double dd = static_cast<double>(m - n);
                    v -= 0.5 * gamma_phi * dd * dd * rmn;
                }
                if (m == n) {
                    o[at(m, n)] = cplx(v.real(), 0.0);
                } else {
                    o[at(m, n)] = v;
                    o[at(n, m)] = std::conj(v);
                }
            }
        }
    }

    void set_shift(double, const Eigen::MatrixXcd&) {}
};

template <class Y>
struct Work {
    Y k1, k2, k3, k4, k5, k6, k7, tmp, y5;
    explicit Work(const Y& y)
        : k1(Y::Zero(y.rows(), y.cols())), k2(k1), k3(k1), k4(k1), k5(k1), k6(k1), k7(k1), tmp(k1), y5(k1) {}
};

template <class Y, class Rhs>
void rk4_step(Rhs& f, double t, double h, Y& y, Work<Y>& w) {
    f.set_shift(t + 0.5 * h, y);
    f(t, y, w.k1);
    w.tmp = y + (0.5 * h) * w.k1;
    f(t + 0.5 * h, w.tmp, w.k2);
    w.tmp = y + (0.5 * h) * w.k2;
    f(t + 0.5 * h, w.tmp, w.k3);
    w.tmp = y + h * w.k3;
    f(t + h, w.tmp, w.k4);
    y += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

// Dormand-Prince 5(4). Returns the max-abs error estimate; y is untouched on return,
// the 5th-order candidate is left in w.y5.
template <class Y, class Rhs>
double dopri5_trial(Rhs& f, double t, double h, const Y& y, Work<Y>& w) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    f.set_shift(t + 0.5 * h, y);
    f(t, y, w.k1);
    w.tmp = y + h * a21 * w.k1;
    f(t + c2 * h, w.tmp, w.k2);
    w.tmp = y + h * (a31 * w.k1 + a32 * w.k2);
    f(t + c3 * h, w.tmp, w.k3);
    w.tmp = y + h * (a41 * w.k1 + a42 * w.k2 + a43 * w.k3);
    f(t + c4 * h, w.tmp, w.k4);
    w.tmp = y + h * (a51 * w.k1 + a52 * w.k2 + a53 * w.k3 + a54 * w.k4);
    f(t + c5 * h, w.tmp, w.k5);
    w.tmp = y + h * (a61 * w.k1 + a62 * w.k2 + a63 * w.k3 + a64 * w.k4 + a65 * w.k5);
    f(t + h, w.tmp, w.k6);
    w.y5 = y + h * (b1 * w.k1 + b3 * w.k3 + b4 * w.k4 + b5 * w.k5 + b6 * w.k6);
    f(t + h, w.y5, w.k7);
    w.tmp = h * (e1 * w.k1 + e3 * w.k3 + e4 * w.k4 + e5 * w.k5 + e6 * w.k6 + e7 * w.k7);
    return w.tmp.cwiseAbs().maxCoeff();
}

double top_population(const Eigen::VectorXcd& psi) { return std::norm(psi(psi.size() - 1)); }
double top_population(const Eigen::MatrixXcd& rho) { return rho(rho.rows() - 1, rho.cols() - 1).real(); }

QuantumState wrap(const Eigen::VectorXcd& psi) { return QuantumState::pure(psi); }
QuantumState wrap(const Eigen::MatrixXcd& rho) { return QuantumState::mixed(rho); }

template <class Y, class Rhs>
class Driver {
public:
    Driver(const SystemParams& params, const ChirpSchedule& schedule, const IntegratorConfig& cfg, Rhs rhs,
           const StateObserver& observer, bool lindblad, double step_scale = 1.0)
        : params_(params), schedule_(schedule), cfg_(cfg), rhs_(std::move(rhs)), observer_(observer),
          lindblad_(lindblad), step_scale_(step_scale) {}

    Trajectory run(Y y) {
        traj_.n_levels = params_.n_levels;
        const double t0 = cfg_.t_start_ns;
        const double t_end = cfg_.t_stop_ns >= 0.0 ? std::min(cfg_.t_stop_ns, schedule_.duration_ns())
                                                   : schedule_.duration_ns();
        if (t_end < t0) throw ValidationError("t_stop", "stops before it starts");

        traj_.dt_ns = std::numeric_limits<double>::infinity();

        Work<Y> work(y);
        record(t0, y);
        // Break at the phase boundaries so no step straddles a kink in the drive.
        std::vector<double> cuts{t0};
        for (double b : {schedule_.t_rise_ns, schedule_.chirp_end_ns()}) {
            if (b > t0 && b < t_end) cuts.push_back(b);
        }
        cuts.push_back(t_end);

        double t = t0;
        for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
            const double len = cuts[seg + 1] - cuts[seg];
            if (len <= 0.0) continue;
            rhs_.drive.set_segment(cuts[seg]);
            const double dt_target =
                step_scale_ * (cfg_.dt_ns > 0.0 ? cfg_.dt_ns
                                                : auto_time_step(params_, schedule_, lindblad_, cuts[seg], cuts[seg + 1]));
            if (cfg_.method == Method::rk4) {
                traj_.dt_ns = std::min(traj_.dt_ns, dt_target);
                stride_ = cfg_.record_stride > 0
                              ? cfg_.record_stride
                              : std::max(1L, std::lround(cfg_.record_interval_ns / dt_target));
                next_stride_record_ = stride_;
                const long n_steps = std::max(1L, static_cast<long>(std::ceil(len / dt_target - 1e-9)));
                const double h = len / static_cast<double>(n_steps);
                for (long i = 0; i < n_steps; ++i) {
                    rk4_step(rhs_, t, h, y, work);
                    t = (i + 1 == n_steps) ? cuts[seg + 1] : cuts[seg] + (i + 1) * h;
                    after_step(t, y, seg + 2 == cuts.size() && i + 1 == n_steps);
                }
            } else {
                t = adaptive_segment(t, cuts[seg + 1], y, work, dt_target, seg + 2 == cuts.size());
            }
        }
        traj_.final_state = wrap(y);
        if constexpr (std::is_same_v<Y, Eigen::MatrixXcd>) check_positivity(t, y);
        return std::move(traj_);
    }

private:
    double adaptive_segment(double t, double t_stop, Y& y, Work<Y>& work, double h_init, bool last_segment) {
        double h = std::max(h_init, 1e-6);
        double next_record = next_record_time(t);
        int rejections = 0;
        while (t < t_stop - 1e-12) {
            const double target = std::min(t_stop, next_record);
            const bool hits = t + h >= target - 1e-12;
            const double step = hits ? target - t : h;
            const double err = dopri5_trial(rhs_, t, step, y, work);
            if (err <= cfg_.tolerance || step < 1e-9) {
                y = work.y5;
                t = hits ? target : t + step;
                traj_.dt_ns = std::min(traj_.dt_ns, step);
                ++traj_.steps;
                check_leak(t, y);
                const bool at_record = hits && std::abs(t - next_record) < 1e-12;
                if (at_record || (last_segment && t >= t_stop - 1e-12)) {
                    record(t, y);
                    if (at_record) next_record = next_record_time(t);
                }
                rejections = 0;
                if (!hits) {
                    const double fac = err > 0.0 ? 0.9 * std::pow(cfg_.tolerance / err, 0.2) : 5.0;
                    h = step * std::clamp(fac, 0.2, 5.0);
                }
            } else {
                h = step * std::clamp(0.9 * std::pow(cfg_.tolerance / err, 0.2), 0.1, 0.9);
                if (++rejections > 200) {
                    throw InvariantViolation("adaptive integrator: step-size rejection overflow at t=" +
                                             std::to_string(t) + " ns");
                }
            }
        }
        return t_stop;
    }

    double next_record_time(double t) const {
        const double k = std::floor((t - cfg_.t_start_ns) / cfg_.record_interval_ns + 1e-9) + 1.0;
        return cfg_.t_start_ns + k * cfg_.record_interval_ns;
    }

    void after_step(double t, const Y& y, bool last) {
        ++traj_.steps;
        check_leak(t, y);
        if (--next_stride_record_ == 0 || last) {
            record(t, y);
            next_stride_record_ = stride_;
        }
    }

    void check_leak(double t, const Y& y) {
        const double top = top_population(y);
        if (top > cfg_.leak_tol) throw LeakageError(t, top);
    }

    void check_positivity(double t, const Eigen::MatrixXcd& rho) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
        const double lmin = solver.eigenvalues()(0);
        traj_.min_eigenvalue = std::min(traj_.min_eigenvalue, lmin);
        if (lmin < -kPositivityTol) {
            throw InvariantViolation("density matrix lost positivity (min eigenvalue " + std::to_string(lmin) +
                                     " at t=" + std::to_string(t) + " ns)");
        }
    }

    void record(double t, const Y& y) {
        if (!traj_.times_ns.empty() && std::abs(traj_.times_ns.back() - t) < 1e-12) return;
        const int n = params_.n_levels;
        std::vector<double> p(static_cast<std::size_t>(n));
        double norm = 0.0, mean = 0.0;
        for (int k = 0; k < n; ++k) {
            if constexpr (std::is_same_v<Y, Eigen::VectorXcd>) {
                p[static_cast<std::size_t>(k)] = std::norm(y(k));
            } else {
                p[static_cast<std::size_t>(k)] = y(k, k).real();
            }
            norm += p[static_cast<std::size_t>(k)];
            mean += k * p[static_cast<std::size_t>(k)];
        }
        const double norm_err = std::abs(norm - 1.0);
        traj_.max_norm_error = std::max(traj_.max_norm_error, norm_err);
        if (norm_err > kNormTol) {
            throw NormDrift("norm drifted by " + std::to_string(norm - 1.0) + " at t=" +
                                     std::to_string(t) + " ns; reduce dt");
        }
        if constexpr (std::is_same_v<Y, Eigen::MatrixXcd>) {
            const double herm = (y - y.adjoint()).cwiseAbs().maxCoeff();
            traj_.max_hermiticity_error = std::max(traj_.max_hermiticity_error, herm);
            if (herm > kHermitianTol) throw InvariantViolation("density matrix lost Hermiticity");
            if (++records_since_check_ >= 64) {
                records_since_check_ = 0;
                check_positivity(t, y);
            }
        }
        const DriveSample d = drive_envelope(schedule_, t);
        traj_.times_ns.push_back(t);
        traj_.leakage.push_back(p.back());
        traj_.mean_n.push_back(mean);
        traj_.occupations.push_back(std::move(p));
        traj_.omega_mhz.push_back(d.omega_mhz);
        traj_.f_drive_ghz.push_back(d.f_drive_ghz);
        if (observer_) observer_(t, wrap(y));
    }

    SystemParams params_;
    ChirpSchedule schedule_;
    IntegratorConfig cfg_;
    Rhs rhs_;
    const StateObserver& observer_;
    bool lindblad_;
    double step_scale_;
    long stride_{1};
    long next_stride_record_{1};
    int records_since_check_{0};
    Trajectory traj_;
};

void check_inputs(const SystemParams& params, const ChirpSchedule& schedule, const IntegratorConfig& cfg,
                  const QuantumState& s0) {
    params.validate();
    schedule.validate(params);
    cfg.validate();
    if (s0.dim() != params.n_levels) throw ValidationError("initial_state", "dimension differs from n_levels");
    s0.validate();
}

}  // namespace

Trajectory propagate_unitary(const SystemParams& params, const ChirpSchedule& schedule, const QuantumState& psi0,
                             const IntegratorConfig& cfg, const StateObserver& observer) {
    check_inputs(params, schedule, cfg, psi0);
    if (!psi0.is_pure()) throw ValidationError("initial_state", "unitary propagation needs a pure state");
    // RK4 is not norm-preserving; if the accumulated drift breaks the norm
    // tolerance, rerun with half the step. Fixed-step runs stay deterministic.
    double step_scale = 1.0;
    for (int refinement = 0;; ++refinement) {
        try {
            Driver<Eigen::VectorXcd, UnitaryRhs> driver(params, schedule, cfg, UnitaryRhs{LadderDrive(params, schedule)},
                                                        observer, false, step_scale);
            return driver.run(psi0.amplitudes());
        } catch (const NormDrift&) {
            if (cfg.method != Method::rk4 || refinement >= 4) throw;
            step_scale *= 0.5;
        }
    }
}

Trajectory propagate_lindblad(const SystemParams& params, const ChirpSchedule& schedule, const QuantumState& rho0,
                              const IntegratorConfig& cfg, const StateObserver& observer) {
    check_inputs(params, schedule, cfg, rho0);
    LindbladRhs rhs{LadderDrive(params, schedule), params.has_decay() ? 1.0 / params.t1_ns : 0.0,
                    params.gamma_phi};
    Driver<Eigen::MatrixXcd, LindbladRhs> driver(params, schedule, cfg, std::move(rhs), observer, true);
    return driver.run(rho0.density());
}

}  // namespace ladder
