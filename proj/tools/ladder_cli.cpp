// Command-line scenario runner.
//
//   ladder <scenario> [--config PATH] [--out DIR] [--seed N] [--parallel K]
//                     [--set section.key=value]... [--dry-run]
//
// Exit codes: 0 success, 2 invalid input, 3 invariant violation at run time.

#include "ladder/errors.hpp"
#include "ladder/io.hpp"
#include "ladder/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInvariant = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chirped anharmonic-ladder simulator"};
    app.set_version_flag("--version", ladder::version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallel;
    std::vector<std::string> overrides;
    bool dry_run = false;

    app.add_option("--config", config_path, "JSON scenario config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--parallel", parallel, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--set", overrides, "override a config field, e.g. --set chirp.omega_mhz=190");
    app.add_flag("--dry-run", dry_run, "validate and print the resolved plan");

    const std::map<std::string, std::string> help{
        {"dressed", "dressed rotating-frame spectrum vs drive detuning"},
        {"dynamics", "occupation dynamics under a chirp (and hold)"},
        {"wigner", "dynamics plus Wigner snapshots"},
        {"hold", "hold-lifetime scan and barrier fit"},
        {"sweep", "dimensionless threshold map"},
        {"classical", "Duffing capture thresholds"},
        {"measure-invert", "escape-curve forward model and inversion"},
    };
    for (const auto& name : ladder::kScenarios) app.add_subcommand(name, help.at(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }
    const std::string scenario = app.get_subcommands().front()->get_name();

    try {
        nlohmann::json raw = config_path.empty() ? nlohmann::json::object() : ladder::io::read_json(config_path);
        if (raw.contains("scenario")) {
            const std::string from = raw["scenario"].is_string() ? raw["scenario"].get<std::string>()
                                                                  : raw["scenario"].dump();
            const bool compatible = from == scenario || (from == "dynamics" && scenario == "wigner");
            if (!compatible) {
                throw ladder::ValidationError("scenario",
                                              "config is for '" + from + "' but the subcommand is '" + scenario + "'");
            }
        }
        raw["scenario"] = scenario;
        for (const auto& o : overrides) ladder::apply_override(raw, o);
        if (!out_dir.empty()) raw["out_dir"] = out_dir;
        if (seed) raw["seed"] = *seed;
        if (parallel) raw["parallel"] = *parallel;

        const ladder::ScenarioConfig config = ladder::parse_config(raw);
        if (dry_run) {
            std::cout << ladder::plan(config).dump(2) << '\n';
            return 0;
        }
        const ladder::RunOutcome outcome = ladder::run_scenario(config, std::cerr);
        std::cout << outcome.manifest["results"].dump(2) << '\n';
        if (outcome.exit_code != 0) std::cerr << "error: flagged invariant violation (see manifest)\n";
        return outcome.exit_code;
    } catch (const ladder::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ladder::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
