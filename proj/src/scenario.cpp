#include "ladder/scenario.hpp"

#include "ladder/errors.hpp"
#include "ladder/io.hpp"
#include "ladder/measure.hpp"
#include "ladder/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#ifndef LADDER_VERSION
#define LADDER_VERSION "0.0.0"
#endif

namespace ladder {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return LADDER_VERSION; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reads the keys of one JSON object, rejecting anything not consumed.
class Section {
public:
    Section(const json& parent, std::string name) : name_(std::move(name)) {
        if (parent.contains(name_)) {
            obj_ = &parent.at(name_);
            if (!obj_->is_object()) throw ValidationError(name_, "must be an object");
        }
    }
    Section(const json* obj, std::string name) : obj_(obj), name_(std::move(name)) {
        if (obj_ && !obj_->is_object()) throw ValidationError(name_, "must be an object");
    }

    bool has(const char* key) const { return obj_ && obj_->contains(key); }
    const json* child(const char* key) {
        if (!has(key)) return nullptr;
        seen_.insert(key);
        return &obj_->at(key);
    }
    std::string path(const char* key) const { return name_ + "." + key; }

    template <class T>
    void get(const char* key, T& out) {
        if (!has(key)) return;
        seen_.insert(key);
        const json& v = obj_->at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ValidationError(path(key), "expected a number");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v.is_number_integer()) throw ValidationError(path(key), "expected an integer");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ValidationError(path(key), "expected true or false");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ValidationError(path(key), "expected a string");
            }
            out = v.get<T>();
        } catch (const json::exception&) {
            throw ValidationError(path(key), "has the wrong type");
        }
    }

    // Numbers, or null / "inf" for +infinity.
    void get_time(const char* key, double& out) {
        if (!has(key)) return;
        seen_.insert(key);
        const json& v = obj_->at(key);
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) {
            out = kInf;
        } else if (v.is_number()) {
            out = v.get<double>();
        } else {
            throw ValidationError(path(key), "expected a number, null or \"inf\"");
        }
    }

    void get_list(const char* key, std::vector<double>& out) {
        if (!has(key)) return;
        seen_.insert(key);
        const json& v = obj_->at(key);
        if (!v.is_array()) throw ValidationError(path(key), "expected an array of numbers");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_number()) throw ValidationError(path(key), "expected an array of numbers");
            out.push_back(x.get<double>());
        }
    }

    void finish() const {
        if (!obj_) return;
        for (auto it = obj_->begin(); it != obj_->end(); ++it) {
            if (!seen_.count(it.key())) throw ValidationError(name_ + "." + it.key(), "unknown key");
        }
    }

private:
    const json* obj_{nullptr};
    std::string name_;
    std::set<std::string> seen_;
};

json time_json(double t) { return std::isinf(t) ? json("inf") : json(t); }

const char* method_name(Method m) { return m == Method::rk4 ? "rk4" : "adaptive"; }

void parse_axis(Section& parent, const char* key, GridAxis& axis) {
    Section s(parent.child(key), parent.path(key));
    s.get("lo", axis.lo);
    s.get("hi", axis.hi);
    s.get("points", axis.points);
    s.finish();
    if (!(axis.lo > 0.0) || !(axis.hi > axis.lo)) throw ValidationError(parent.path(key), "need 0 < lo < hi");
    if (axis.points < 2) throw ValidationError(parent.path(key) + ".points", "need at least 2");
}

json axis_json(const GridAxis& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"points", a.points}}; }

void require_positive_list(const std::vector<double>& v, const std::string& field, bool allow_zero) {
    if (v.empty()) throw ValidationError(field, "must not be empty");
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0)) {
            throw ValidationError(field, allow_zero ? "entries must be >= 0" : "entries must be > 0");
        }
    }
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
    if (!j.is_object()) throw ValidationError("config", "top level must be an object");
    ScenarioConfig c;
    Section top(&j, "config");
    top.get("scenario", c.scenario);
    if (std::find(kScenarios.begin(), kScenarios.end(), c.scenario) == kScenarios.end()) {
        throw ValidationError("scenario", "unknown scenario '" + c.scenario + "'");
    }
    std::string out = c.out_dir.string();
    top.get("out_dir", out);
    c.out_dir = out;
    top.get("seed", c.seed);
    top.get("parallel", c.parallel);
    if (c.parallel < 0) throw ValidationError("parallel", "must be >= 0");

    {
        Section s(top.child("system"), "system");
        s.get("f01_ghz", c.system.f01_ghz);
        s.get("beta_r", c.system.beta_r);
        s.get("n_levels", c.system.n_levels);
        s.get_time("t1_ns", c.system.t1_ns);
        s.get("gamma_phi", c.system.gamma_phi);
        s.finish();
        try {
            c.system.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("system." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
    }
    {
        Section s(top.child("chirp"), "chirp");
        auto& ch = c.chirp;
        if (s.has("f_start_ghz") && s.has("start_detuning_mhz")) {
            throw ValidationError("chirp.start_detuning_mhz", "give either f_start_ghz or start_detuning_mhz");
        }
        if (s.has("t_chirp_ns") && s.has("n_target")) {
            throw ValidationError("chirp.n_target", "give either t_chirp_ns or n_target");
        }
        double start_detuning = (ch.f_start_ghz - c.system.f01_ghz) * 1e3;
        bool relative_start = false;
        if (s.has("start_detuning_mhz")) {
            s.get("start_detuning_mhz", start_detuning);
            relative_start = true;
        }
        s.get("f_start_ghz", ch.f_start_ghz);
        if (relative_start) ch.f_start_ghz = c.system.f01_ghz + start_detuning * 1e-3;
        s.get("alpha_mhz_per_ns", ch.alpha_mhz_per_ns);
        if (!(ch.alpha_mhz_per_ns > 0.0)) throw ValidationError("chirp.alpha_mhz_per_ns", "must be > 0");
        s.get("omega_mhz", ch.omega_mhz);
        s.get("t_rise_ns", ch.t_rise_ns);
        s.get("t_chirp_ns", ch.t_chirp_ns);
        if (s.has("n_target")) {
            double n_target = 0.0;
            s.get("n_target", n_target);
            if (!(n_target >= 0.0)) throw ValidationError("chirp.n_target", "must be >= 0");
            const double f_end = c.system.f01_ghz * (1.0 - n_target * c.system.beta_r);
            ch.t_chirp_ns = (ch.f_start_ghz - f_end) / (ch.alpha_mhz_per_ns * 1e-3);
        }
        ch.omega_hold_mhz = ch.omega_mhz;
        s.get("omega_hold_mhz", ch.omega_hold_mhz);
        s.get("t_hold_ns", ch.t_hold_ns);
        s.finish();
        try {
            ch.validate(c.system);
        } catch (const ValidationError& e) {
            throw ValidationError("chirp." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
    }
    {
        Section s(top.child("integrator"), "integrator");
        auto& in = c.integrator;
        s.get("dt_ns", in.dt_ns);
        std::string method = method_name(in.method);
        s.get("method", method);
        if (method == "rk4") in.method = Method::rk4;
        else if (method == "adaptive") in.method = Method::adaptive;
        else throw ValidationError("integrator.method", "expected \"rk4\" or \"adaptive\"");
        s.get("tolerance", in.tolerance);
        s.get("leak_tol", in.leak_tol);
        s.get("record_stride", in.record_stride);
        s.get("record_interval_ns", in.record_interval_ns);
        s.finish();
        try {
            in.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("integrator." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
    }
    {
        Section s(top.child("dynamics"), "dynamics");
        auto& d = c.dynamics;
        s.get("solver", d.solver);
        if (d.solver != "auto" && d.solver != "unitary" && d.solver != "lindblad") {
            throw ValidationError("dynamics.solver", "expected \"auto\", \"unitary\" or \"lindblad\"");
        }
        s.get("initial_level", d.initial_level);
        if (d.initial_level < 0 || d.initial_level >= c.system.n_levels) {
            throw ValidationError("dynamics.initial_level", "must satisfy 0 <= level < n_levels");
        }
        s.get("n_c", d.n_c);
        if (d.n_c < 0 || d.n_c >= c.system.n_levels) throw ValidationError("dynamics.n_c", "must satisfy 0 <= n_c < N");
        s.get_list("snapshot_times_ns", d.snapshot_times_ns);
        for (double t : d.snapshot_times_ns) {
            if (!(t >= 0.0) || t > c.chirp.duration_ns()) {
                throw ValidationError("dynamics.snapshot_times_ns", "times must lie within the schedule");
            }
        }
        s.get("wigner_resolution", d.wigner_resolution);
        if (d.wigner_resolution < 3) throw ValidationError("dynamics.wigner_resolution", "must be >= 3");
        s.get("wigner_extent", d.wigner_extent);
        if (d.wigner_extent < 0.0) throw ValidationError("dynamics.wigner_extent", "must be >= 0");
        s.finish();
        if (c.scenario == "wigner" && d.snapshot_times_ns.empty()) {
            throw ValidationError("dynamics.snapshot_times_ns", "the wigner scenario needs snapshot times");
        }
        if (d.solver == "lindblad" && !c.system.has_decay() && c.system.gamma_phi == 0.0) {
            // Allowed: the master equation then reduces to unitary evolution of ρ.
        }
    }
    {
        Section s(top.child("dressed"), "dressed");
        auto& d = c.dressed;
        s.get("omega_mhz", d.omega_mhz);
        s.get("levels", d.levels);
        s.get("detuning_min_mhz", d.detuning_min_mhz);
        s.get("detuning_max_mhz", d.detuning_max_mhz);
        s.get("points", d.points);
        s.finish();
        if (!(d.omega_mhz >= 0.0)) throw ValidationError("dressed.omega_mhz", "must be >= 0");
        if (d.levels < 2) throw ValidationError("dressed.levels", "must be >= 2");
        if (!(d.detuning_max_mhz > d.detuning_min_mhz)) throw ValidationError("dressed.detuning_max_mhz", "must exceed detuning_min_mhz");
        if (d.points < 2) throw ValidationError("dressed.points", "must be >= 2");
    }
    {
        Section s(top.child("hold"), "hold");
        auto& h = c.hold;
        s.get_list("omega_hold_mhz", h.omega_hold_mhz);
        s.get("t_max_ns", h.t_max_ns);
        s.get("n_c", h.n_c);
        s.get("chunk_ns", h.chunk_ns);
        s.get("record_interval_ns", h.record_interval_ns);
        s.finish();
        require_positive_list(h.omega_hold_mhz, "hold.omega_hold_mhz", true);
        if (!(h.t_max_ns > 0.0)) throw ValidationError("hold.t_max_ns", "must be > 0");
        if (h.n_c < 0 || h.n_c >= c.system.n_levels) throw ValidationError("hold.n_c", "must satisfy 0 <= n_c < N");
        if (!(h.chunk_ns > 0.0)) throw ValidationError("hold.chunk_ns", "must be > 0");
        if (!(h.record_interval_ns > 0.0)) throw ValidationError("hold.record_interval_ns", "must be > 0");
    }
    {
        Section s(top.child("sweep"), "sweep");
        auto& g = c.sweep.grid;
        auto& m = c.sweep.map;
        parse_axis(s, "omega_scaled", g.omega_scaled);
        parse_axis(s, "beta_scaled", g.beta_scaled);
        s.get("refine_columns", g.refine_columns);
        s.get("alpha_mhz_per_ns", m.alpha_mhz_per_ns);
        m.f01_ghz = c.system.f01_ghz;
        s.get_time("t1_ns", m.t1_ns);
        s.get("n_target_min", m.n_target_min);
        s.get("classical_depth", m.classical_depth);
        s.get("start_linewidths", m.start_linewidths);
        s.get("rise_scale", m.rise_scale);
        s.get("level_margin", m.level_margin);
        s.get("max_levels", m.max_levels);
        s.get("measure", m.measure);
        s.get("measure_width", m.measure_width);
        s.finish();
        m.integrator = c.integrator;
        try {
            m.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("sweep." + e.field().substr(e.field().find('.') + 1),
                                  std::string(e.what()).substr(e.field().size() + 2));
        }
    }
    {
        Section s(top.child("classical"), "classical");
        auto& k = c.classical;
        s.get("lambda", k.duffing.lambda);
        s.get("gamma", k.duffing.gamma);
        s.get("dt", k.duffing.dt);
        s.get("t_start_scale", k.duffing.t_start_scale);
        s.get("final_frequency", k.duffing.final_frequency);
        s.get("capture_fraction", k.duffing.capture_fraction);
        s.get_list("chirp_rates", k.chirp_rates);
        s.get("ensemble_size", k.ensemble_size);
        s.get("temperature", k.temperature);
        s.get("trajectory_factor", k.trajectory_factor);
        s.finish();
        require_positive_list(k.chirp_rates, "classical.chirp_rates", false);
        if (k.ensemble_size < 1) throw ValidationError("classical.ensemble_size", "must be >= 1");
        if (!(k.temperature >= 0.0)) throw ValidationError("classical.temperature", "must be >= 0");
        if (!(k.trajectory_factor >= 0.0)) throw ValidationError("classical.trajectory_factor", "must be >= 0");
        DuffingParams probe = k.duffing;
        probe.chirp_rate = k.chirp_rates.front();
        try {
            probe.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("classical." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
    }
    {
        Section s(top.child("measure"), "measure");
        auto& m = c.measure;
        s.get_list("populations", m.populations);
        s.get("width", m.width);
        s.get("noise_sigma", m.noise_sigma);
        s.get("repeats", m.repeats);
        s.finish();
        require_positive_list(m.populations, "measure.populations", true);
        double sum = 0.0;
        for (double p : m.populations) sum += p;
        if (sum > 1.0 + 1e-9) throw ValidationError("measure.populations", "must sum to at most 1");
        if (!(m.width >= 0.0)) throw ValidationError("measure.width", "must be >= 0");
        if (!(m.noise_sigma >= 0.0)) throw ValidationError("measure.noise_sigma", "must be >= 0");
        if (m.repeats < 1) throw ValidationError("measure.repeats", "must be >= 1");
    }
    top.finish();
    return c;
}

json to_json(const ScenarioConfig& c) {
    const auto& ch = c.chirp;
    const auto& in = c.integrator;
    const auto& m = c.sweep.map;
    const auto& k = c.classical;
    return {
        {"scenario", c.scenario},
        {"out_dir", c.out_dir.string()},
        {"seed", c.seed},
        {"parallel", c.parallel},
        {"system",
         {{"f01_ghz", c.system.f01_ghz},
          {"beta_r", c.system.beta_r},
          {"n_levels", c.system.n_levels},
          {"t1_ns", time_json(c.system.t1_ns)},
          {"gamma_phi", c.system.gamma_phi}}},
        {"chirp",
         {{"f_start_ghz", ch.f_start_ghz},
          {"alpha_mhz_per_ns", ch.alpha_mhz_per_ns},
          {"omega_mhz", ch.omega_mhz},
          {"t_rise_ns", ch.t_rise_ns},
          {"t_chirp_ns", ch.t_chirp_ns},
          {"omega_hold_mhz", ch.omega_hold_mhz},
          {"t_hold_ns", ch.t_hold_ns}}},
        {"integrator",
         {{"dt_ns", in.dt_ns},
          {"method", method_name(in.method)},
          {"tolerance", in.tolerance},
          {"leak_tol", in.leak_tol},
          {"record_stride", in.record_stride},
          {"record_interval_ns", in.record_interval_ns}}},
        {"dynamics",
         {{"solver", c.dynamics.solver},
          {"initial_level", c.dynamics.initial_level},
          {"n_c", c.dynamics.n_c},
          {"snapshot_times_ns", c.dynamics.snapshot_times_ns},
          {"wigner_resolution", c.dynamics.wigner_resolution},
          {"wigner_extent", c.dynamics.wigner_extent}}},
        {"dressed",
         {{"omega_mhz", c.dressed.omega_mhz},
          {"levels", c.dressed.levels},
          {"detuning_min_mhz", c.dressed.detuning_min_mhz},
          {"detuning_max_mhz", c.dressed.detuning_max_mhz},
          {"points", c.dressed.points}}},
        {"hold",
         {{"omega_hold_mhz", c.hold.omega_hold_mhz},
          {"t_max_ns", c.hold.t_max_ns},
          {"n_c", c.hold.n_c},
          {"chunk_ns", c.hold.chunk_ns},
          {"record_interval_ns", c.hold.record_interval_ns}}},
        {"sweep",
         {{"omega_scaled", axis_json(c.sweep.grid.omega_scaled)},
          {"beta_scaled", axis_json(c.sweep.grid.beta_scaled)},
          {"refine_columns", c.sweep.grid.refine_columns},
          {"alpha_mhz_per_ns", m.alpha_mhz_per_ns},
          {"t1_ns", time_json(m.t1_ns)},
          {"n_target_min", m.n_target_min},
          {"classical_depth", m.classical_depth},
          {"start_linewidths", m.start_linewidths},
          {"rise_scale", m.rise_scale},
          {"level_margin", m.level_margin},
          {"max_levels", m.max_levels},
          {"measure", m.measure},
          {"measure_width", m.measure_width}}},
        {"classical",
         {{"lambda", k.duffing.lambda},
          {"gamma", k.duffing.gamma},
          {"dt", k.duffing.dt},
          {"t_start_scale", k.duffing.t_start_scale},
          {"final_frequency", k.duffing.final_frequency},
          {"capture_fraction", k.duffing.capture_fraction},
          {"chirp_rates", k.chirp_rates},
          {"ensemble_size", k.ensemble_size},
          {"temperature", k.temperature},
          {"trajectory_factor", k.trajectory_factor}}},
        {"measure",
         {{"populations", c.measure.populations},
          {"width", c.measure.width},
          {"noise_sigma", c.measure.noise_sigma},
          {"repeats", c.measure.repeats}}},
    };
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &j;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
        node = &(*node)[parts[i]];
        if (!node->is_object()) throw ValidationError(key, "is not inside an object");
    }
    (*node)[parts.back()] = value;
}

namespace {

bool use_lindblad(const ScenarioConfig& c) {
    if (c.dynamics.solver == "auto") return c.system.has_decay() || c.system.gamma_phi > 0.0;
    return c.dynamics.solver == "lindblad";
}

std::vector<std::string> planned_outputs(const ScenarioConfig& c) {
    std::vector<std::string> out;
    if (c.scenario == "dressed") out = {"dressed.csv"};
    if (c.scenario == "dynamics" || c.scenario == "wigner") {
        out = {"trajectory.csv"};
        for (std::size_t k = 0; k < c.dynamics.snapshot_times_ns.size(); ++k) {
            out.push_back("wigner_" + std::to_string(k) + ".csv");
        }
    }
    if (c.scenario == "hold") {
        out = {"hold_summary.csv", "hold_map.csv"};
        for (std::size_t k = 0; k < c.hold.omega_hold_mhz.size(); ++k) out.push_back("hold_" + std::to_string(k) + ".csv");
    }
    if (c.scenario == "sweep") out = {"map.csv", "contour.csv", "thresholds.csv"};
    if (c.scenario == "classical") {
        out = {"classical_thresholds.csv"};
        if (c.classical.trajectory_factor > 0.0) out.push_back("duffing_trajectory.csv");
    }
    if (c.scenario == "measure-invert") out = {"escape_curve.csv", "populations.csv"};
    out.push_back("manifest.json");
    return out;
}

void ensure_writable(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("out_dir", "cannot create " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / ".write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw ValidationError("out_dir", dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

json drive_warnings(const ScenarioConfig& c) {
    json w = json::array();
    const DriveParams d{std::max(c.chirp.omega_mhz, c.chirp.omega_hold_mhz), c.chirp.f_start_ghz};
    if (auto msg = d.rwa_warning(c.system)) w.push_back(*msg);
    return w;
}

json run_dressed(const ScenarioConfig& c, const fs::path& dir) {
    SystemParams p = c.system;
    p.n_levels = std::min(c.dressed.levels, c.system.n_levels);
    std::vector<double> grid(static_cast<std::size_t>(c.dressed.points));
    for (int i = 0; i < c.dressed.points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            c.dressed.detuning_min_mhz + (c.dressed.detuning_max_mhz - c.dressed.detuning_min_mhz) * i / (c.dressed.points - 1);
    }
    const DressedSpectrum s = dressed_spectrum(p, c.dressed.omega_mhz, grid);
    io::write_dressed(dir / "dressed.csv", s);
    json crossings = json::array();
    for (int n = 0; n + 1 < p.n_levels; ++n) crossings.push_back((crossing_frequency(p, n) - p.f01_ghz) * 1e3);
    return {{"levels", p.n_levels}, {"crossing_detunings_mhz", crossings}};
}

json run_dynamics(const ScenarioConfig& c, const fs::path& dir, std::ostream& log) {
    const bool lindblad = use_lindblad(c);
    const auto& snaps = c.dynamics.snapshot_times_ns;
    std::vector<double> best_gap(snaps.size(), kInf);
    std::vector<std::optional<QuantumState>> states(snaps.size());
    std::vector<double> state_times(snaps.size(), 0.0);
    StateObserver observer;
    if (!snaps.empty()) {
        observer = [&](double t, const QuantumState& s) {
            for (std::size_t k = 0; k < snaps.size(); ++k) {
                const double gap = std::abs(t - snaps[k]);
                if (gap < best_gap[k]) {
                    best_gap[k] = gap;
                    states[k] = s;
                    state_times[k] = t;
                }
            }
        };
    }
    const QuantumState psi0 = QuantumState::fock(c.system.n_levels, c.dynamics.initial_level);
    log << "propagating " << (lindblad ? "master equation" : "Schrodinger equation") << " over "
        << c.chirp.duration_ns() << " ns\n";
    const Trajectory tr = lindblad ? propagate_lindblad(c.system, c.chirp, psi0, c.integrator, observer)
                                   : propagate_unitary(c.system, c.chirp, psi0, c.integrator, observer);
    io::write_trajectory(dir / "trajectory.csv", tr);

    json snapshots = json::array();
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        WignerGridSpec spec;
        spec.resolution = c.dynamics.wigner_resolution;
        spec.x_extent = spec.p_extent = c.dynamics.wigner_extent;
        const WignerGrid g = wigner(*states[k], spec);
        const std::string name = "wigner_" + std::to_string(k) + ".csv";
        io::write_wigner(dir / name, g, state_times[k]);
        snapshots.push_back({{"file", name},
                             {"requested_t_ns", snaps[k]},
                             {"t_ns", state_times[k]},
                             {"integral", g.integral()},
                             {"mean_n", states[k]->mean_level()}});
    }
    const double f_end = c.chirp.f_end_ghz();
    return {{"solver", lindblad ? "lindblad" : "unitary"},
            {"dt_ns", tr.dt_ns},
            {"steps", tr.steps},
            {"records", tr.size()},
            {"final_mean_n", tr.mean_n.back()},
            {"n_res_at_f_end", resonant_level(c.system, f_end)},
            {"final_p_locked", tr.locking_probability(c.dynamics.n_c).back()},
            {"max_leakage", *std::max_element(tr.leakage.begin(), tr.leakage.end())},
            {"max_norm_error", tr.max_norm_error},
            {"max_hermiticity_error", tr.max_hermiticity_error},
            {"min_eigenvalue", tr.min_eigenvalue},
            {"snapshots", snapshots}};
}

json run_hold(const ScenarioConfig& c, const fs::path& dir, std::ostream& log) {
    HoldOptions ho;
    ho.n_c = c.hold.n_c;
    ho.t_max_ns = c.hold.t_max_ns;
    ho.chunk_ns = c.hold.chunk_ns;
    ho.record_interval_ns = c.hold.record_interval_ns;
    ho.integrator = c.integrator;
    log << "hold scan over " << c.hold.omega_hold_mhz.size() << " amplitudes\n";
    const HoldScan scan = hold_scan(c.system, c.chirp, c.hold.omega_hold_mhz, ho, c.parallel);
    io::write_hold_summary(dir / "hold_summary.csv", scan);
    io::CsvWriter map(dir / "hold_map.csv", {"omega_hold_mhz", "t_hold_ns", "p_locked"});
    json rows = json::array();
    for (std::size_t k = 0; k < scan.results.size(); ++k) {
        const auto& r = scan.results[k];
        io::write_hold_series(dir / ("hold_" + std::to_string(k) + ".csv"), r);
        for (std::size_t i = 0; i < r.times_ns.size(); ++i) map.row({r.omega_hold_mhz, r.times_ns[i], r.p_locked[i]});
        rows.push_back({{"omega_hold_mhz", r.omega_hold_mhz},
                        {"p_initial", r.p_initial},
                        {"t_locked_ns", time_json(r.t_locked_ns)},
                        {"extrapolated", r.extrapolated},
                        {"valid", r.valid}});
    }
    json out{{"results", rows}, {"eta_theory_ns", kEtaTheoryNs}};
    try {
        const EtaFit f = fit_eta(scan);
        out["eta_fit"] = {{"eta_ns", f.eta_ns},
                          {"ci95_ns", {f.ci_low_ns, f.ci_high_ns}},
                          {"intercept", f.intercept},
                          {"r_squared", f.r_squared},
                          {"residuals", f.residuals},
                          {"dynamic_range_decades", f.dynamic_range_decades},
                          {"points", f.points},
                          {"warning", f.warning}};
        if (!f.warning.empty()) log << "warning: " << f.warning << '\n';
    } catch (const ValidationError& e) {
        out["eta_fit"] = nullptr;
        log << "eta fit skipped: " << e.what() << '\n';
    }
    return out;
}

json run_sweep(const ScenarioConfig& c, const fs::path& dir, std::ostream& log, bool& flagged) {
    log << "threshold map " << c.sweep.grid.omega_scaled.points << "x" << c.sweep.grid.beta_scaled.points << '\n';
    const ThresholdMap map = threshold_map(c.sweep.grid, c.sweep.map, c.parallel);
    io::write_map(dir / "map.csv", map);
    io::write_contour(dir / "contour.csv", map);
    io::write_columns(dir / "thresholds.csv", map);
    for (const auto& f : map.failures) log << "point failed: " << f << '\n';
    flagged = flagged || !map.failures.empty();
    const auto& s = map.scaling;
    return {{"failures", map.failures},
            {"contour_segments", map.contour.size()},
            {"classical_exponent", s.classical.exponent},
            {"alpha_exponent", s.alpha_exponent},
            {"classical_prefactor", s.classical_prefactor},
            {"quantum_level", s.quantum_level},
            {"quantum_max_deviation", s.quantum_max_deviation},
            {"break_beta_scaled", s.break_beta_scaled},
            {"omega_eq_beta_crossing", s.omega_eq_beta_crossing},
            {"theory", {{"autoresonance", "0.82 (beta/sqrt(alpha))^-1/2"}, {"ladder_climbing", "0.8"}}}};
}

json run_classical(const ScenarioConfig& c, const fs::path& dir, std::ostream& log) {
    const auto& k = c.classical;
    Ensemble e{k.ensemble_size, k.temperature, c.seed};
    log << "Duffing thresholds at " << k.chirp_rates.size() << " chirp rates\n";
    const ClassicalScaling s = classical_threshold_scaling(k.chirp_rates, k.duffing, e, c.parallel);
    io::write_classical_scaling(dir / "classical_thresholds.csv", s);
    json out{{"exponent", s.fit.exponent},
             {"prefactor", s.fit.prefactor},
             {"r_squared", s.fit.r_squared},
             {"exponent_stderr", s.fit.exponent_stderr},
             {"quantum_mapping", "epsilon <-> Omega, lambda <-> beta, chirp_rate <-> alpha (linear-frequency units)"}};
    if (k.trajectory_factor > 0.0) {
        DuffingParams p = k.duffing;
        p.chirp_rate = k.chirp_rates.front();
        p.epsilon = k.trajectory_factor * s.thresholds.front().epsilon;
        const DuffingTrajectory tr = integrate_duffing(p, {}, 100);
        io::write_duffing(dir / "duffing_trajectory.csv", tr);
        out["sample"] = {{"epsilon", p.epsilon},
                         {"captured", tr.result.captured},
                         {"final_energy", tr.result.final_energy},
                         {"phase_drift", tr.result.phase_drift}};
    }
    return out;
}

json run_measure(const ScenarioConfig& c, const fs::path& dir, bool& flagged) {
    const auto& m = c.measure;
    const int n = static_cast<int>(m.populations.size());
    const std::vector<double> thresholds = integer_spaced_thresholds(n);
    const EscapeCurve clean = escape_curve(m.populations, thresholds, m.width);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> noise(0.0, m.noise_sigma > 0.0 ? m.noise_sigma : 1.0);
    std::vector<double> sq_err(static_cast<std::size_t>(n), 0.0);
    Extraction first;
    EscapeCurve first_curve;
    int inconsistent = 0;
    for (int r = 0; r < m.repeats; ++r) {
        EscapeCurve curve = clean;
        if (m.noise_sigma > 0.0) {
            for (double& s : curve.escape) s += noise(rng);
        }
        const Extraction ex = extract_populations(curve, {n, m.width, m.noise_sigma});
        if (ex.inconsistent) ++inconsistent;
        for (int i = 0; i < n; ++i) {
            const double d = ex.populations[static_cast<std::size_t>(i)] - m.populations[static_cast<std::size_t>(i)];
            sq_err[static_cast<std::size_t>(i)] += d * d;
        }
        if (r == 0) {
            first = ex;
            first_curve = curve;
        }
    }
    io::write_escape_curve(dir / "escape_curve.csv", first_curve);
    io::write_populations(dir / "populations.csv", m.populations, first.populations);
    double max_err = 0.0, max_rms = 0.0;
    for (int i = 0; i < n; ++i) {
        max_err = std::max(max_err, std::abs(first.populations[static_cast<std::size_t>(i)] - m.populations[static_cast<std::size_t>(i)]));
        max_rms = std::max(max_rms, std::sqrt(sq_err[static_cast<std::size_t>(i)] / m.repeats));
    }
    // Repeats beyond the first are Monte Carlo statistics; only the reported record can fail the run.
    flagged = flagged || first.inconsistent;
    return {{"recovered", first.populations},
            {"max_abs_error", max_err},
            {"max_rms_error", max_rms},
            {"residual", first.residual},
            {"inconsistent_repeats", inconsistent},
            {"diagnostic", first.diagnostic}};
}

}  // namespace

json plan(const ScenarioConfig& c) {
    json p{{"scenario", c.scenario}, {"version", version()}, {"config", to_json(c)}, {"outputs", planned_outputs(c)}};
    if (c.scenario == "dynamics" || c.scenario == "wigner" || c.scenario == "hold") {
        const bool lindblad = c.scenario == "hold" || use_lindblad(c);
        const double dt = c.integrator.dt_ns > 0.0 ? c.integrator.dt_ns
                                                   : auto_time_step(c.system, c.chirp, lindblad, 0.0, c.chirp.chirp_end_ns());
        p["solver"] = lindblad ? "lindblad" : "unitary";
        p["chirp_dt_ns"] = dt;
        p["f_end_ghz"] = c.chirp.f_end_ghz();
        p["n_res_at_f_end"] = resonant_level(c.system, c.chirp.f_end_ghz());
    }
    if (c.scenario == "sweep") {
        p["points"] = c.sweep.grid.omega_scaled.points * c.sweep.grid.beta_scaled.points;
    }
    p["warnings"] = drive_warnings(c);
    return p;
}

RunOutcome run_scenario(const ScenarioConfig& c, std::ostream& log) {
    ensure_writable(c.out_dir);
    RunOutcome out;
    bool flagged = false;
    json results;
    if (c.scenario == "dressed") results = run_dressed(c, c.out_dir);
    else if (c.scenario == "dynamics" || c.scenario == "wigner") results = run_dynamics(c, c.out_dir, log);
    else if (c.scenario == "hold") results = run_hold(c, c.out_dir, log);
    else if (c.scenario == "sweep") results = run_sweep(c, c.out_dir, log, flagged);
    else if (c.scenario == "classical") results = run_classical(c, c.out_dir, log);
    else if (c.scenario == "measure-invert") results = run_measure(c, c.out_dir, flagged);
    out.exit_code = flagged ? 3 : 0;
    out.manifest = {{"version", version()},
                    {"scenario", c.scenario},
                    {"config", to_json(c)},
                    {"outputs", planned_outputs(c)},
                    {"results", results},
                    {"warnings", drive_warnings(c)},
                    {"flagged", flagged}};
    io::write_json(c.out_dir / "manifest.json", out.manifest);
    return out;
}

}  // namespace ladder
