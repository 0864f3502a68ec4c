#include "ladder/io.hpp"

#include "ladder/errors.hpp"

#include <iomanip>
#include <stdexcept>

namespace ladder::io {

namespace fs = std::filesystem;

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
    std::vector<std::string> header{"t"};
    for (int n = 0; n < traj.n_levels; ++n) header.push_back("P_" + std::to_string(n));
    for (const char* c : {"mean_n", "leakage", "omega_inst", "f_drive"}) header.emplace_back(c);
    CsvWriter w(path, header);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{traj.times_ns[k]};
        row.insert(row.end(), traj.occupations[k].begin(), traj.occupations[k].end());
        row.push_back(traj.mean_n[k]);
        row.push_back(traj.leakage[k]);
        row.push_back(traj.omega_mhz[k]);
        row.push_back(traj.f_drive_ghz[k]);
        w.row(row);
    }
}

void write_dressed(const fs::path& path, const DressedSpectrum& spectrum) {
    std::vector<std::string> header{"detuning_mhz"};
    const std::size_t branches = spectrum.energies.empty() ? 0 : spectrum.energies.front().size();
    for (std::size_t b = 0; b < branches; ++b) header.push_back("E_" + std::to_string(b));
    CsvWriter w(path, header);
    for (std::size_t k = 0; k < spectrum.detuning_mhz.size(); ++k) {
        std::vector<double> row{spectrum.detuning_mhz[k]};
        row.insert(row.end(), spectrum.energies[k].begin(), spectrum.energies[k].end());
        w.row(row);
    }
}

void write_wigner(const fs::path& path, const WignerGrid& grid, double t_ns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    out << "# t_ns=" << t_ns << " x_extent=" << grid.x_extent << " p_extent=" << grid.p_extent
        << " nx=" << grid.nx() << " np=" << grid.np() << " rows=p_ascending cols=x_ascending\n";
    for (int j = 0; j < grid.np(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) out << (i ? "," : "") << grid.values(j, i);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_map(const fs::path& path, const ThresholdMap& map) {
    CsvWriter w(path, {"omega_scaled", "beta_scaled", "p_locked", "n_levels"});
    for (std::size_t i = 0; i < map.omega_scaled.size(); ++i) {
        for (std::size_t j = 0; j < map.beta_scaled.size(); ++j) {
            w.row({map.omega_scaled[i], map.beta_scaled[j], map.p_locked[i][j],
                   static_cast<double>(map.n_levels[i][j])});
        }
    }
}

void write_contour(const fs::path& path, const ThresholdMap& map) {
    CsvWriter w(path, {"segment", "beta_scaled", "omega_scaled"});
    for (std::size_t s = 0; s < map.contour.size(); ++s) {
        for (const auto& p : map.contour[s]) w.row({static_cast<double>(s), p.beta_scaled, p.omega_scaled});
    }
}

void write_columns(const fs::path& path, const ThresholdMap& map) {
    CsvWriter w(path, {"beta_scaled", "omega_scaled_th", "p_locked", "refined", "found", "autoresonance_line",
                       "ladder_climbing_line"});
    for (const auto& c : map.columns) {
        w.row({c.beta_scaled, c.found ? c.omega_scaled : std::numeric_limits<double>::quiet_NaN(), c.p_locked,
               c.refined ? 1.0 : 0.0, c.found ? 1.0 : 0.0, autoresonance_threshold(c.beta_scaled),
               ladder_climbing_threshold(c.beta_scaled)});
    }
}

void write_hold_series(const fs::path& path, const HoldResult& r) {
    CsvWriter w(path, {"t_hold_ns", "p_locked"});
    for (std::size_t k = 0; k < r.times_ns.size(); ++k) w.row({r.times_ns[k], r.p_locked[k]});
}

void write_hold_summary(const fs::path& path, const HoldScan& scan) {
    CsvWriter w(path, {"omega_hold_mhz", "p_initial", "t_locked_ns", "extrapolated", "valid"});
    for (const auto& r : scan.results) {
        w.row({r.omega_hold_mhz, r.p_initial, r.t_locked_ns, r.extrapolated ? 1.0 : 0.0, r.valid ? 1.0 : 0.0});
    }
}

void write_escape_curve(const fs::path& path, const EscapeCurve& curve) {
    CsvWriter w(path, {"threshold", "escape"});
    for (std::size_t k = 0; k < curve.thresholds.size(); ++k) w.row({curve.thresholds[k], curve.escape[k]});
}

void write_populations(const fs::path& path, const std::vector<double>& truth, const std::vector<double>& recovered) {
    CsvWriter w(path, {"level", "p_true", "p_recovered"});
    const std::size_t n = std::max(truth.size(), recovered.size());
    for (std::size_t k = 0; k < n; ++k) {
        w.row({static_cast<double>(k), k < truth.size() ? truth[k] : 0.0, k < recovered.size() ? recovered[k] : 0.0});
    }
}

void write_duffing(const fs::path& path, const DuffingTrajectory& traj) {
    CsvWriter w(path, {"t", "x", "v", "energy"});
    for (std::size_t k = 0; k < traj.t.size(); ++k) w.row({traj.t[k], traj.x[k], traj.v[k], traj.energy[k]});
}

void write_classical_scaling(const fs::path& path, const ClassicalScaling& scaling) {
    CsvWriter w(path, {"chirp_rate", "epsilon_th", "epsilon_lo", "epsilon_hi", "estimate"});
    for (const auto& t : scaling.thresholds) {
        w.row({t.chirp_rate, t.epsilon, t.lo, t.hi, duffing_threshold_estimate(t.chirp_rate, 1.0)});
    }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot read " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config", std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace ladder::io
