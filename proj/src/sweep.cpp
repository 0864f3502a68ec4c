#include "ladder/sweep.hpp"

#include "ladder/errors.hpp"
#include "ladder/measure.hpp"
#include "ladder/parallel.hpp"
#include "ladder/units.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ladder {

using units::two_pi;

void MapOptions::validate() const {
    if (!(alpha_mhz_per_ns > 0.0)) throw ValidationError("map.alpha", "must be > 0");
    if (!(f01_ghz > 0.0)) throw ValidationError("map.f01", "must be > 0");
    if (!(t1_ns > 0.0)) throw ValidationError("map.t1", "must be > 0");
    if (!(n_target_min >= 1.0)) throw ValidationError("map.n_target_min", "must be >= 1");
    if (!(classical_depth >= 0.0)) throw ValidationError("map.classical_depth", "must be >= 0");
    if (!(start_linewidths > 0.0)) throw ValidationError("map.start_linewidths", "must be > 0");
    if (!(rise_scale >= 0.0)) throw ValidationError("map.rise_scale", "must be >= 0");
    if (max_levels < 4) throw ValidationError("map.max_levels", "must be >= 4");
    if (measure && !(measure_width >= 0.0)) throw ValidationError("map.measure_width", "must be >= 0");
    integrator.validate();
}

double omega_scaled(double omega_mhz, double alpha_mhz_per_ns) {
    return units::mhz_to_rad_per_ns(omega_mhz) / std::sqrt(units::chirp_to_rad_per_ns2(alpha_mhz_per_ns));
}

double beta_scaled(double beta_mhz, double alpha_mhz_per_ns) { return omega_scaled(beta_mhz, alpha_mhz_per_ns); }

double omega_from_scaled(double scaled, double alpha_mhz_per_ns) {
    return units::rad_per_ns_to_mhz(scaled * std::sqrt(units::chirp_to_rad_per_ns2(alpha_mhz_per_ns)));
}

double ladder_climbing_threshold(double) { return 0.8; }
double autoresonance_threshold(double beta_scaled) { return 0.82 / std::sqrt(beta_scaled); }

namespace {

int level_cap(double beta_r, int max_levels) {
    // Monotonic ladder: N - 2 < 1/beta_r.
    const int monotone = static_cast<int>(std::ceil(1.0 / beta_r + 2.0)) - 1;
    return std::min(max_levels, monotone);
}

}  // namespace

MapPoint design_map_point(double p1, double p2, const MapOptions& o) {
    if (!(p1 > 0.0) || !std::isfinite(p1)) throw ValidationError("omega_scaled", "must be > 0");
    if (!(p2 > 0.0) || !std::isfinite(p2)) throw ValidationError("beta_scaled", "must be > 0");
    o.validate();
    const double sqrt_alpha = std::sqrt(units::chirp_to_rad_per_ns2(o.alpha_mhz_per_ns));
    MapPoint m;
    m.omega_scaled = p1;
    m.beta_scaled = p2;
    m.params.f01_ghz = o.f01_ghz;
    m.params.beta_r = p2 * sqrt_alpha / (two_pi * o.f01_ghz);
    m.params.t1_ns = o.t1_ns;
    m.n_target = std::max(o.n_target_min, std::ceil(o.classical_depth / p2));
    const int cap = level_cap(m.params.beta_r, o.max_levels);
    m.params.n_levels = std::min(cap, static_cast<int>(std::ceil(1.25 * m.n_target + o.level_margin)));
    if (m.params.n_levels < m.n_target + 2) {
        throw ValidationError("beta_scaled", "target level does not fit below the ladder top");
    }
    const double omega = p1 * sqrt_alpha;
    const double start_mhz = units::rad_per_ns_to_mhz(o.start_linewidths * std::max(sqrt_alpha, omega));
    m.schedule = ChirpSchedule::to_level(m.params, o.alpha_mhz_per_ns, units::rad_per_ns_to_mhz(omega), m.n_target,
                                         start_mhz, o.rise_scale / sqrt_alpha);
    m.n_c = map_locking_cutoff(m.n_target);
    return m;
}

PointResult evaluate_map_point(const MapPoint& point, const MapOptions& options) {
    MapPoint m = point;
    IntegratorConfig cfg = options.integrator;
    cfg.record_interval_ns = m.schedule.duration_ns();
    cfg.record_stride = 0;
    const int cap = level_cap(m.params.beta_r, options.max_levels);
    for (;;) {
        try {
            const QuantumState psi0 = QuantumState::fock(m.params.n_levels, 0);
            const Trajectory tr = m.params.has_decay() ? propagate_lindblad(m.params, m.schedule, psi0, cfg)
                                                       : propagate_unitary(m.params, m.schedule, psi0, cfg);
            const std::vector<double>& p = tr.occupations.back();
            PointResult r;
            r.p_locked = options.measure ? escape_probability(p, {m.n_c + 0.5, options.measure_width})
                                         : locking_probability(p, m.n_c);
            r.n_levels = m.params.n_levels;
            r.dt_ns = tr.dt_ns;
            r.steps = tr.steps;
            return r;
        } catch (const LeakageError&) {
            if (m.params.n_levels >= cap) throw;
            m.params.n_levels = std::min(cap, m.params.n_levels + std::max(10, m.params.n_levels / 2));
        }
    }
}

ThresholdResult find_threshold(double alpha_mhz_per_ns, double beta_r, const SystemParams& params,
                               const ThresholdOptions& options) {
    if (!(alpha_mhz_per_ns > 0.0)) throw ValidationError("alpha", "must be > 0");
    if (!(beta_r > 0.0 && beta_r < 1.0)) throw ValidationError("beta_r", "must lie in (0, 1)");
    if (!(options.p_tol > 0.0) || !(options.rel_tol > 0.0)) throw ValidationError("tolerance", "must be > 0");
    MapOptions mo = options.map;
    mo.alpha_mhz_per_ns = alpha_mhz_per_ns;
    mo.f01_ghz = params.f01_ghz;
    mo.t1_ns = params.t1_ns;
    const double p2 = beta_scaled(beta_r * params.f01_ghz * 1e3, alpha_mhz_per_ns);

    ThresholdResult out;
    auto p_at = [&](double omega_mhz) {
        ++out.evaluations;
        const MapPoint m = design_map_point(omega_scaled(omega_mhz, alpha_mhz_per_ns), p2, mo);
        return evaluate_map_point(m, mo).p_locked;
    };

    const double guess = omega_from_scaled(std::max(ladder_climbing_threshold(p2), autoresonance_threshold(p2)),
                                           alpha_mhz_per_ns);
    double lo = options.omega_lo_mhz > 0.0 ? options.omega_lo_mhz : 0.5 * guess;
    double hi = options.omega_hi_mhz > 0.0 ? options.omega_hi_mhz : 2.0 * guess;
    if (!(hi > lo)) throw ValidationError("bracket", "omega_hi must exceed omega_lo");
    double p_lo = p_at(lo), p_hi = p_at(hi);
    for (int k = 0; p_lo >= 0.5; ++k) {
        if (k >= options.max_expansions) {
            throw InvariantViolation("threshold bracket failure: P_locked(" + std::to_string(lo) +
                                     " MHz) = " + std::to_string(p_lo) + " >= 0.5");
        }
        hi = lo;
        p_hi = p_lo;
        lo *= 0.5;
        p_lo = p_at(lo);
    }
    for (int k = 0; p_hi < 0.5; ++k) {
        if (k >= options.max_expansions) {
            throw InvariantViolation("threshold bracket failure: P_locked(" + std::to_string(hi) +
                                     " MHz) = " + std::to_string(p_hi) + " < 0.5");
        }
        lo = hi;
        p_lo = p_hi;
        hi *= 2.0;
        p_hi = p_at(hi);
    }

    double mid = std::sqrt(lo * hi), p_mid = std::numeric_limits<double>::quiet_NaN();
    while (true) {
        mid = std::sqrt(lo * hi);
        p_mid = p_at(mid);
        if (std::abs(p_mid - 0.5) < options.p_tol) break;
        if (p_mid >= 0.5) hi = mid;
        else lo = mid;
        if (hi - lo < options.rel_tol * lo) {
            mid = std::sqrt(lo * hi);
            p_mid = std::numeric_limits<double>::quiet_NaN();
            break;
        }
    }
    out.omega_mhz = mid;
    out.omega_scaled = omega_scaled(mid, alpha_mhz_per_ns);
    out.p_locked = p_mid;
    out.lo_mhz = lo;
    out.hi_mhz = hi;
    return out;
}

std::vector<double> GridAxis::values() const {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw ValidationError("grid", "need 0 < lo < hi and >= 2 points");
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        v[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    }
    return v;
}

std::vector<std::vector<ContourPoint>> marching_squares(const std::vector<double>& rows, const std::vector<double>& cols,
                                                        const std::vector<std::vector<double>>& v, double level) {
    std::vector<std::vector<ContourPoint>> segs;
    auto edge = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
        const double a = v[i0][j0] - level, b = v[i1][j1] - level;
        const double f = a / (a - b);
        const double lr = std::log(rows[i0]) + f * (std::log(rows[i1]) - std::log(rows[i0]));
        const double lc = std::log(cols[j0]) + f * (std::log(cols[j1]) - std::log(cols[j0]));
        return ContourPoint{std::exp(lc), std::exp(lr)};
    };
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < cols.size(); ++j) {
            const double c[4] = {v[i][j], v[i][j + 1], v[i + 1][j + 1], v[i + 1][j]};
            if (std::any_of(std::begin(c), std::end(c), [](double x) { return std::isnan(x); })) continue;
            // Corners 0:(i,j) 1:(i,j+1) 2:(i+1,j+1) 3:(i+1,j); edges e_k joins corner k and k+1.
            std::vector<ContourPoint> cut;
            std::vector<int> cut_edge;
            const std::size_t ci[4] = {i, i, i + 1, i + 1}, cj[4] = {j, j + 1, j + 1, j};
            for (int k = 0; k < 4; ++k) {
                const int k1 = (k + 1) % 4;
                if ((c[k] >= level) != (c[k1] >= level)) {
                    cut.push_back(edge(ci[k], cj[k], ci[k1], cj[k1]));
                    cut_edge.push_back(k);
                }
            }
            if (cut.size() == 2) {
                segs.push_back({cut[0], cut[1]});
            } else if (cut.size() == 4) {
                // Saddle: the cell-centre average decides which corners connect.
                const bool centre_high = 0.25 * (c[0] + c[1] + c[2] + c[3]) >= level;
                const bool c0_high = c[0] >= level;
                if (centre_high == c0_high) {
                    segs.push_back({cut[0], cut[1]});
                    segs.push_back({cut[2], cut[3]});
                } else {
                    segs.push_back({cut[3], cut[0]});
                    segs.push_back({cut[1], cut[2]});
                }
            }
        }
    }
    return segs;
}

ScalingAnalysis analyze_thresholds(const std::vector<ColumnThreshold>& columns) {
    ScalingAnalysis s;
    std::vector<double> cx, cy;
    double q_sum = 0.0, pref_sum = 0.0;
    for (const auto& c : columns) {
        if (!c.found) continue;
        if (c.beta_scaled <= 0.3 + 1e-12) {
            cx.push_back(c.beta_scaled);
            cy.push_back(c.omega_scaled);
            pref_sum += c.omega_scaled * std::sqrt(c.beta_scaled);
        } else if (c.beta_scaled >= 3.0 - 1e-12) {
            q_sum += c.omega_scaled;
            s.quantum_max_deviation = std::max(s.quantum_max_deviation, std::abs(c.omega_scaled / 0.8 - 1.0));
            ++s.quantum_points;
        }
    }
    s.classical_points = static_cast<int>(cx.size());
    if (cx.size() >= 2) {
        s.classical = fit_power_law(cx, cy);
        s.alpha_exponent = 0.5 * (1.0 - s.classical.exponent);
        s.classical_prefactor = pref_sum / static_cast<double>(cx.size());
    }
    if (s.quantum_points > 0) s.quantum_level = q_sum / s.quantum_points;
    if (cx.size() >= 2 && s.quantum_points > 0 && s.classical.exponent < 0.0) {
        s.break_beta_scaled = std::pow(s.quantum_level / s.classical.prefactor, 1.0 / s.classical.exponent);
    }
    // Crossing of the threshold curve with Ω = β, interpolated in log space.
    std::vector<ColumnThreshold> found;
    for (const auto& c : columns) {
        if (c.found) found.push_back(c);
    }
    std::sort(found.begin(), found.end(), [](auto& a, auto& b) { return a.beta_scaled < b.beta_scaled; });
    for (std::size_t k = 0; k + 1 < found.size(); ++k) {
        const double g0 = std::log(found[k].omega_scaled / found[k].beta_scaled);
        const double g1 = std::log(found[k + 1].omega_scaled / found[k + 1].beta_scaled);
        if (g0 >= 0.0 && g1 < 0.0) {
            const double f = g0 / (g0 - g1);
            s.omega_eq_beta_crossing =
                std::exp(std::log(found[k].beta_scaled) + f * std::log(found[k + 1].beta_scaled / found[k].beta_scaled));
            break;
        }
    }
    return s;
}

ThresholdMap threshold_map(const MapGridSpec& grid, const MapOptions& options, int threads) {
    options.validate();
    ThresholdMap map;
    map.omega_scaled = grid.omega_scaled.values();
    map.beta_scaled = grid.beta_scaled.values();
    const std::size_t nr = map.omega_scaled.size(), nc = map.beta_scaled.size();
    map.p_locked.assign(nr, std::vector<double>(nc, std::numeric_limits<double>::quiet_NaN()));
    map.n_levels.assign(nr, std::vector<int>(nc, 0));
    std::vector<std::string> errors(nr * nc);

    parallel_for(nr * nc, threads, [&](std::size_t k) {
        const std::size_t i = k / nc, j = k % nc;
        try {
            const MapPoint m = design_map_point(map.omega_scaled[i], map.beta_scaled[j], options);
            const PointResult r = evaluate_map_point(m, options);
            map.p_locked[i][j] = r.p_locked;
            map.n_levels[i][j] = r.n_levels;
        } catch (const std::exception& e) {
            errors[k] = "omega_scaled=" + std::to_string(map.omega_scaled[i]) +
                        " beta_scaled=" + std::to_string(map.beta_scaled[j]) + ": " + e.what();
        }
    });
    for (auto& e : errors) {
        if (!e.empty()) map.failures.push_back(std::move(e));
    }
    map.contour = marching_squares(map.omega_scaled, map.beta_scaled, map.p_locked);

    map.columns.resize(nc);
    std::vector<std::pair<double, double>> brackets(nc, {0.0, 0.0});
    for (std::size_t j = 0; j < nc; ++j) {
        ColumnThreshold& col = map.columns[j];
        col.beta_scaled = map.beta_scaled[j];
        for (std::size_t i = 1; i < nr; ++i) {
            const double a = map.p_locked[i - 1][j], b = map.p_locked[i][j];
            if (std::isnan(a) || std::isnan(b)) continue;
            if (a < 0.5 && b >= 0.5) {
                const double f = (0.5 - a) / (b - a);
                col.omega_scaled = std::exp(std::log(map.omega_scaled[i - 1]) +
                                            f * std::log(map.omega_scaled[i] / map.omega_scaled[i - 1]));
                col.p_locked = 0.5;
                col.found = true;
                brackets[j] = {map.omega_scaled[i - 1], map.omega_scaled[i]};
                break;
            }
        }
    }
    if (grid.refine_columns) {
        parallel_for(nc, threads, [&](std::size_t j) {
            ColumnThreshold& col = map.columns[j];
            if (!col.found) return;
            ThresholdOptions to;
            to.map = options;
            to.omega_lo_mhz = omega_from_scaled(brackets[j].first, options.alpha_mhz_per_ns);
            to.omega_hi_mhz = omega_from_scaled(brackets[j].second, options.alpha_mhz_per_ns);
            SystemParams p;
            p.f01_ghz = options.f01_ghz;
            p.t1_ns = options.t1_ns;
            const double sqrt_alpha = std::sqrt(units::chirp_to_rad_per_ns2(options.alpha_mhz_per_ns));
            const double beta_r = col.beta_scaled * sqrt_alpha / (two_pi * options.f01_ghz);
            try {
                const ThresholdResult r = find_threshold(options.alpha_mhz_per_ns, beta_r, p, to);
                col.omega_scaled = r.omega_scaled;
                col.p_locked = r.p_locked;
                col.refined = true;
            } catch (const std::exception&) {
                // Keep the interpolated grid estimate.
            }
        });
    }
    map.scaling = analyze_thresholds(map.columns);
    return map;
}

// --- hold lifetime -----------------------------------------------------------

QuantumState prepare_locked_state(const SystemParams& params, const ChirpSchedule& chirp, const IntegratorConfig& cfg) {
    ChirpSchedule s = chirp;
    s.t_hold_ns = 0.0;
    IntegratorConfig c = cfg;
    c.record_interval_ns = std::max(s.duration_ns(), 1e-9);
    c.record_stride = 0;
    c.t_start_ns = 0.0;
    c.t_stop_ns = -1.0;
    const Trajectory tr = propagate_lindblad(params, s, QuantumState::fock(params.n_levels, 0), c);
    return *tr.final_state;
}

namespace {

// Half-value time: first crossing of p0/2 with linear interpolation, or an
// exponential fit to the last third of the record when never crossed.
void locate_half_time(HoldResult& r) {
    const double half = 0.5 * r.p_initial;
    for (std::size_t k = 1; k < r.p_locked.size(); ++k) {
        if (r.p_locked[k] <= half) {
            const double f = (r.p_locked[k - 1] - half) / (r.p_locked[k - 1] - r.p_locked[k]);
            r.t_locked_ns = r.times_ns[k - 1] + f * (r.times_ns[k] - r.times_ns[k - 1]);
            r.extrapolated = false;
            return;
        }
    }
    r.extrapolated = true;
    const std::size_t n = r.times_ns.size();
    const std::size_t first = n - std::max<std::size_t>(n / 3, 2);
    std::vector<double> t, lp;
    for (std::size_t k = first; k < n; ++k) {
        if (r.p_locked[k] <= 0.0) continue;
        t.push_back(r.times_ns[k]);
        lp.push_back(std::log(r.p_locked[k]));
    }
    if (t.size() < 2) {
        r.valid = false;
        return;
    }
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    const double lm = std::accumulate(lp.begin(), lp.end(), 0.0) / static_cast<double>(lp.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        sxx += (t[k] - tm) * (t[k] - tm);
        sxy += (t[k] - tm) * (lp[k] - lm);
    }
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) {
        r.valid = false;
        r.t_locked_ns = std::numeric_limits<double>::infinity();
        return;
    }
    r.t_locked_ns = tm + (std::log(half) - lm) / slope;
}

}  // namespace

HoldResult hold_lifetime(const SystemParams& params, const ChirpSchedule& chirp, const QuantumState& after_chirp,
                         double omega_hold_mhz, const HoldOptions& options) {
    if (!(omega_hold_mhz >= 0.0)) throw ValidationError("omega_hold", "must be >= 0");
    if (!(options.t_max_ns > 0.0)) throw ValidationError("t_max", "must be > 0");
    if (!(options.chunk_ns > 0.0)) throw ValidationError("chunk", "must be > 0");
    if (options.n_c < 0 || options.n_c >= params.n_levels) throw ValidationError("n_c", "must satisfy 0 <= n_c < N");
    HoldResult r;
    r.omega_hold_mhz = omega_hold_mhz;
    r.p_initial = locking_probability(after_chirp.occupations(), options.n_c);
    if (r.p_initial <= 0.5) {
        throw ValidationError("chirp", "initial locking too weak (P_locked=" + std::to_string(r.p_initial) + ")");
    }
    ChirpSchedule s = chirp;
    s.omega_hold_mhz = omega_hold_mhz;
    s.t_hold_ns = options.t_max_ns;
    const double t0 = chirp.chirp_end_ns();
    IntegratorConfig cfg = options.integrator;
    cfg.record_interval_ns = options.record_interval_ns;
    cfg.record_stride = 0;

    QuantumState state = after_chirp;
    r.times_ns.push_back(0.0);
    r.p_locked.push_back(r.p_initial);
    for (double t = t0; t < s.duration_ns() - 1e-9;) {
        cfg.t_start_ns = t;
        cfg.t_stop_ns = std::min(t + options.chunk_ns, s.duration_ns());
        const Trajectory tr = propagate_lindblad(params, s, state, cfg);
        const std::vector<double> pl = tr.locking_probability(options.n_c);
        for (std::size_t k = 1; k < tr.size(); ++k) {
            r.times_ns.push_back(tr.times_ns[k] - t0);
            r.p_locked.push_back(pl[k]);
        }
        state = *tr.final_state;
        t = cfg.t_stop_ns;
        if (r.p_locked.back() <= 0.5 * r.p_initial) break;
    }
    locate_half_time(r);
    return r;
}

HoldScan hold_scan(const SystemParams& params, const ChirpSchedule& chirp, const std::vector<double>& omega_holds,
                   const HoldOptions& options, int threads) {
    const QuantumState locked = prepare_locked_state(params, chirp, options.integrator);
    HoldScan scan;
    scan.results.resize(omega_holds.size());
    parallel_for(omega_holds.size(), threads, [&](std::size_t k) {
        scan.results[k] = hold_lifetime(params, chirp, locked, omega_holds[k], options);
    });
    return scan;
}

EtaFit fit_eta(const HoldScan& scan) {
    std::vector<double> x, y;
    for (const auto& r : scan.results) {
        if (r.valid && r.t_locked_ns > 0.0 && std::isfinite(r.t_locked_ns)) {
            x.push_back(r.omega_hold_mhz * 1e-3);
            y.push_back(std::log(r.t_locked_ns));
        }
    }
    if (x.size() < 4) throw ValidationError("scan", "need at least 4 Omega_hold points with valid T_locked");
    EtaFit f;
    f.points = static_cast<int>(x.size());
    const double n = static_cast<double>(x.size());
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - xm) * (x[k] - xm);
        sxy += (x[k] - xm) * (y[k] - ym);
        syy += (y[k] - ym) * (y[k] - ym);
    }
    if (sxx <= 0.0) throw ValidationError("scan", "Omega_hold values are all equal");
    f.eta_ns = sxy / sxx;
    f.intercept = ym - f.eta_ns * xm;
    double sse = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double res = y[k] - (f.intercept + f.eta_ns * x[k]);
        f.residuals.push_back(res);
        sse += res * res;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    const double se = std::sqrt(sse / (n - 2.0) / sxx);
    const double tq = boost::math::quantile(boost::math::complement(boost::math::students_t(n - 2.0), 0.025));
    f.ci_low_ns = f.eta_ns - tq * se;
    f.ci_high_ns = f.eta_ns + tq * se;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    f.dynamic_range_decades = (*hi - *lo) / std::log(10.0);
    if (f.dynamic_range_decades < 1.0) {
        f.warning = "T_locked spans less than one decade; eta is poorly constrained";
    }
    return f;
}

}  // namespace ladder
