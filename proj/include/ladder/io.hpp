#pragma once

// CSV and JSON persistence for scenario outputs.

#include "ladder/classical.hpp"
#include "ladder/evolve.hpp"
#include "ladder/measure.hpp"
#include "ladder/model.hpp"
#include "ladder/phase_space.hpp"
#include "ladder/sweep.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace ladder::io {

// Row-oriented CSV with full double precision.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

// Header: t, P_0..P_{N-1}, mean_n, leakage, omega_inst, f_drive.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
void write_dressed(const std::filesystem::path& path, const DressedSpectrum& spectrum);
// Comment header with extents and shape, then one row of values per p.
void write_wigner(const std::filesystem::path& path, const WignerGrid& grid, double t_ns);
void write_map(const std::filesystem::path& path, const ThresholdMap& map);
void write_contour(const std::filesystem::path& path, const ThresholdMap& map);
void write_columns(const std::filesystem::path& path, const ThresholdMap& map);
void write_hold_series(const std::filesystem::path& path, const HoldResult& result);
void write_hold_summary(const std::filesystem::path& path, const HoldScan& scan);
void write_escape_curve(const std::filesystem::path& path, const EscapeCurve& curve);
void write_populations(const std::filesystem::path& path, const std::vector<double>& truth,
                       const std::vector<double>& recovered);
void write_duffing(const std::filesystem::path& path, const DuffingTrajectory& traj);
void write_classical_scaling(const std::filesystem::path& path, const ClassicalScaling& scaling);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace ladder::io
