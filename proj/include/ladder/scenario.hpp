#pragma once

// Scenario configuration (strict JSON) and execution for the CLI.

#include "ladder/classical.hpp"
#include "ladder/evolve.hpp"
#include "ladder/model.hpp"
#include "ladder/sweep.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ladder {

inline const std::vector<std::string> kScenarios{"dressed", "dynamics", "wigner", "hold",
                                                 "sweep",   "classical", "measure-invert"};

struct DynamicsSpec {
    std::string solver{"auto"};  // unitary | lindblad | auto (lindblad when T1 is finite)
    int initial_level{0};
    int n_c{10};
    std::vector<double> snapshot_times_ns;
    int wigner_resolution{201};
    double wigner_extent{0.0};   // 0: automatic
};

struct DressedSpec {
    double omega_mhz{27.0};
    int levels{6};
    double detuning_min_mhz{-400.0};
    double detuning_max_mhz{100.0};
    int points{501};
};

struct HoldSpec {
    std::vector<double> omega_hold_mhz{20.0, 30.0, 40.0, 50.0, 60.0};
    double t_max_ns{3000.0};
    int n_c{10};
    double chunk_ns{250.0};
    double record_interval_ns{5.0};
};

struct SweepSpec {
    MapGridSpec grid{};
    MapOptions map{};
};

struct ClassicalSpec {
    DuffingParams duffing{};
    std::vector<double> chirp_rates{1e-4, 4.6415888336127795e-5, 2.1544346900318843e-5, 1e-5};
    int ensemble_size{1};
    double temperature{0.0};
    double trajectory_factor{2.0};  // sample trajectory at this multiple of the first threshold; 0 disables
};

struct MeasureSpec {
    std::vector<double> populations{0.2, 0.3, 0.5};
    double width{0.25};
    double noise_sigma{0.0};
    int repeats{1};
};

struct ScenarioConfig {
    std::string scenario;
    SystemParams system{};
    ChirpSchedule chirp{};
    IntegratorConfig integrator{};
    DynamicsSpec dynamics{};
    DressedSpec dressed{};
    HoldSpec hold{};
    SweepSpec sweep{};
    ClassicalSpec classical{};
    MeasureSpec measure{};
    std::filesystem::path out_dir{"out"};
    std::uint64_t seed{1};
    int parallel{0};  // 0: all available cores
};

// Strict parse: unknown keys and ill-typed values raise ValidationError naming
// the field. Everything is validated before returning.
ScenarioConfig parse_config(const nlohmann::json& j);

// Fully materialized configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& c);

// Applies "section.key=value" overrides to a raw config document. The value
// is parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

// What would run, without simulating.
nlohmann::json plan(const ScenarioConfig& c);

struct RunOutcome {
    int exit_code{0};                  // 0 ok, 3 flagged invariant violation
    nlohmann::json manifest;
};

// Runs the scenario, writes outputs and manifest.json into c.out_dir.
RunOutcome run_scenario(const ScenarioConfig& c, std::ostream& log);

std::string version();

}  // namespace ladder
