#include "afs/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "afs/kernels.hpp"
#include "afs/presets.hpp"

namespace afs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Config

double RunConfig::effective_retrieval_start() const {
    if (retrieval_start) return *retrieval_start;
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PiecewiseSweep>) {
                return v.segments.size() >= 2 ? v.segments.back().t_begin : 0.0;
            } else if constexpr (std::is_same_v<T, SpatialGradient>) {
                return v.flip_time;
            } else {
                return 0.0;
            }
        },
        schedule.variant());
}

double RunConfig::effective_hold_time() const {
    return hold_time ? *hold_time : effective_retrieval_start();
}

void RunConfig::validate() const {
    medium.validate();
    if (initial == InitialState::pulse) {
        pulse.validate(medium);
    } else {
        if (pulse.injection != Injection::in_medium)
            throw ConfigError("pulse.initial", "polariton initial states require in_medium injection");
        pulse.validate(medium);
        if (schedule.is_spatial())
            throw ConfigError("pulse.initial", "polariton initial states need a uniform detuning");
        if (!(medium.beta > 0)) throw ConfigError("pulse.initial", "polariton initial states need beta > 0");
    }
    schedule.validate();
    if (!(t_end > 0) || !std::isfinite(t_end)) throw ConfigError("t_end", "must be positive");
    if (snapshot_stride < 0) throw ConfigError("snapshot_stride", "must be >= 0");
    if (retrieval_start && !(*retrieval_start >= 0))
        throw ConfigError("retrieval_start", "must be >= 0");
    if (retrieval_start && *retrieval_start > t_end)
        throw ConfigError("retrieval_start", "must not exceed t_end");
    std::set<std::string> seen;
    const std::pair<const char*, const std::optional<std::string>*> outs[] = {
        {"outputs.snapshots_csv", &outputs.snapshots_csv},
        {"outputs.boundary_csv", &outputs.boundary_csv},
        {"outputs.summary_json", &outputs.summary_json},
        {"outputs.polariton_csv", &outputs.polariton_csv}};
    for (const auto& [name, p] : outs) {
        if (!*p) continue;
        if ((*p)->empty()) throw ConfigError(name, "must not be empty");
        const std::string norm = fs::path(**p).lexically_normal().string();
        if (!seen.insert(norm).second) throw ConfigError(name, "duplicates another output path");
    }
}

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(join(path, it.key()), "unknown key");
    }
}

const json& object_at(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
    const json& v = j.at(key);
    if (!v.is_object()) throw ConfigError(join(path, key), "must be an object");
    return v;
}

double number(const json& j, const std::string& key, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key), "missing");
    }
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
    return v.get<double>();
}

std::optional<double> optional_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return number(j, key, path);
}

int integer(const json& j, const std::string& key, const std::string& path, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
    return v.get<int>();
}

std::string text(const json& j, const std::string& key, const std::string& path,
                 const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
    return v.get<std::string>();
}

MediumConfig medium_from(const json& j) {
    const std::string p = "medium";
    reject_unknown(j, p, {"beta", "gamma", "c", "length", "n_cells", "g_single", "n_atoms"});
    MediumConfig m;
    m.g_single = optional_number(j, "g_single", p);
    m.n_atoms = optional_number(j, "n_atoms", p);
    if (m.g_single && m.n_atoms && !j.contains("beta")) {
        m.beta = *m.g_single * std::sqrt(*m.n_atoms);
    } else {
        m.beta = number(j, "beta", p);
    }
    m.gamma = number(j, "gamma", p, 0.0);
    m.c = number(j, "c", p, 1.0);
    m.length = number(j, "length", p, 1.0);
    m.n_cells = integer(j, "n_cells", p, 1024);
    return m;
}

PulseSpec pulse_from(const json& j, InitialState& initial) {
    const std::string p = "pulse";
    reject_unknown(j, p, {"envelope", "z0", "center", "injection", "amplitude", "initial"});
    PulseSpec s;
    const std::string env = text(j, "envelope", p, "gaussian");
    if (env != "gaussian") throw ConfigError("pulse.envelope", "only \"gaussian\" is supported");
    s.z0 = number(j, "z0", p);
    s.center = number(j, "center", p, 0.5);
    const std::string inj = text(j, "injection", p, "in_medium");
    if (inj == "in_medium") {
        s.injection = Injection::in_medium;
    } else if (inj == "boundary_driven") {
        s.injection = Injection::boundary_driven;
    } else {
        throw ConfigError("pulse.injection", "must be \"in_medium\" or \"boundary_driven\"");
    }
    if (j.contains("amplitude")) {
        const json& a = j.at("amplitude");
        if (a.is_number()) {
            s.amplitude = {a.get<double>(), 0.0};
        } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
            s.amplitude = {a[0].get<double>(), a[1].get<double>()};
        } else {
            throw ConfigError("pulse.amplitude", "must be a number or [re, im]");
        }
    }
    const std::string init = text(j, "initial", p, "pulse");
    if (init == "pulse") {
        initial = InitialState::pulse;
    } else if (init == "psi") {
        initial = InitialState::psi;
    } else if (init == "phi") {
        initial = InitialState::phi;
    } else {
        throw ConfigError("pulse.initial", "must be \"pulse\", \"psi\" or \"phi\"");
    }
    return s;
}

DetuningSchedule schedule_from(const json& j) {
    const std::string p = "schedule";
    const std::string kind = text(j, "kind", p, "");
    if (kind == "constant") {
        reject_unknown(j, p, {"kind", "delta"});
        return ConstantDetuning{number(j, "delta", p, 0.0)};
    }
    if (kind == "linear_sweep") {
        reject_unknown(j, p, {"kind", "delta_start", "delta_end", "t_start", "t_end"});
        return LinearSweep{number(j, "delta_start", p), number(j, "delta_end", p),
                           number(j, "t_start", p, 0.0), number(j, "t_end", p)};
    }
    if (kind == "spatial_gradient") {
        reject_unknown(j, p, {"kind", "slope", "pivot", "flip_time"});
        return SpatialGradient{number(j, "slope", p), number(j, "pivot", p, 0.5),
                               number(j, "flip_time", p)};
    }
    if (kind == "piecewise") {
        reject_unknown(j, p, {"kind", "segments"});
        if (!j.contains("segments") || !j.at("segments").is_array())
            throw ConfigError("schedule.segments", "must be an array");
        PiecewiseSweep s;
        const json& arr = j.at("segments");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string sp = "schedule.segments[" + std::to_string(i) + "]";
            if (!arr[i].is_object()) throw ConfigError(sp, "must be an object");
            reject_unknown(arr[i], sp, {"t0", "t1", "delta0", "delta1"});
            s.segments.push_back({number(arr[i], "t0", sp), number(arr[i], "t1", sp),
                                  number(arr[i], "delta0", sp), number(arr[i], "delta1", sp)});
        }
        return s;
    }
    if (kind == "storage") {
        reject_unknown(j, p, {"kind", "delta_from", "delta_to", "ramp_time", "hold", "t_start"});
        return storage_retrieval_schedule(number(j, "delta_from", p), number(j, "delta_to", p),
                                          number(j, "ramp_time", p), number(j, "hold", p, 0.0),
                                          number(j, "t_start", p, 0.0))
            .schedule;
    }
    throw ConfigError("schedule.kind",
                      "must be one of constant, linear_sweep, spatial_gradient, piecewise, storage");
}

json schedule_to_json(const DetuningSchedule& s) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantDetuning>) {
                return {{"kind", "constant"}, {"delta", v.delta}};
            } else if constexpr (std::is_same_v<T, LinearSweep>) {
                return {{"kind", "linear_sweep"}, {"delta_start", v.delta_start},
                        {"delta_end", v.delta_end}, {"t_start", v.t_start}, {"t_end", v.t_end}};
            } else if constexpr (std::is_same_v<T, SpatialGradient>) {
                return {{"kind", "spatial_gradient"}, {"slope", v.slope}, {"pivot", v.pivot},
                        {"flip_time", v.flip_time}};
            } else {
                json segs = json::array();
                for (const auto& g : v.segments)
                    segs.push_back({{"t0", g.t_begin}, {"t1", g.t_end}, {"delta0", g.delta_begin},
                                    {"delta1", g.delta_end}});
                return {{"kind", "piecewise"}, {"segments", segs}};
            }
        },
        s.variant());
}

const char* initial_name(InitialState s) {
    switch (s) {
        case InitialState::psi: return "psi";
        case InitialState::phi: return "phi";
        default: return "pulse";
    }
}

}  // namespace

json to_json(const RunConfig& cfg) {
    json m = {{"beta", cfg.medium.beta}, {"gamma", cfg.medium.gamma}, {"c", cfg.medium.c},
              {"length", cfg.medium.length}, {"n_cells", cfg.medium.n_cells}};
    if (cfg.medium.g_single) m["g_single"] = *cfg.medium.g_single;
    if (cfg.medium.n_atoms) m["n_atoms"] = *cfg.medium.n_atoms;
    json p = {{"envelope", "gaussian"},
              {"z0", cfg.pulse.z0},
              {"center", cfg.pulse.center},
              {"injection",
               cfg.pulse.injection == Injection::in_medium ? "in_medium" : "boundary_driven"},
              {"amplitude", {cfg.pulse.amplitude.real(), cfg.pulse.amplitude.imag()}},
              {"initial", initial_name(cfg.initial)}};
    json out = json::object();
    if (cfg.outputs.snapshots_csv) out["snapshots_csv"] = *cfg.outputs.snapshots_csv;
    if (cfg.outputs.boundary_csv) out["boundary_csv"] = *cfg.outputs.boundary_csv;
    if (cfg.outputs.summary_json) out["summary_json"] = *cfg.outputs.summary_json;
    if (cfg.outputs.polariton_csv) out["polariton_csv"] = *cfg.outputs.polariton_csv;
    return {{"medium", m},
            {"pulse", p},
            {"schedule", schedule_to_json(cfg.schedule)},
            {"t_end", cfg.t_end},
            {"snapshot_stride", cfg.snapshot_stride},
            {"retrieval_start", cfg.effective_retrieval_start()},
            {"hold_time", cfg.effective_hold_time()},
            {"outputs", out}};
}

RunConfig from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "top level must be an object");
    reject_unknown(j, "", {"medium", "pulse", "schedule", "t_end", "snapshot_stride",
                           "retrieval_start", "hold_time", "outputs"});
    RunConfig c;
    c.medium = medium_from(object_at(j, "medium", ""));
    c.pulse = pulse_from(object_at(j, "pulse", ""), c.initial);
    c.schedule = schedule_from(object_at(j, "schedule", ""));
    c.t_end = number(j, "t_end", "");
    c.snapshot_stride = integer(j, "snapshot_stride", "", 0);
    c.retrieval_start = optional_number(j, "retrieval_start", "");
    c.hold_time = optional_number(j, "hold_time", "");
    if (j.contains("outputs")) {
        const json& o = object_at(j, "outputs", "");
        reject_unknown(o, "outputs", {"snapshots_csv", "boundary_csv", "summary_json", "polariton_csv"});
        auto opt = [&](const char* k) -> std::optional<std::string> {
            if (!o.contains(k) || o.at(k).is_null()) return std::nullopt;
            if (!o.at(k).is_string()) throw ConfigError(std::string("outputs.") + k, "must be a string");
            return o.at(k).get<std::string>();
        };
        c.outputs.snapshots_csv = opt("snapshots_csv");
        c.outputs.boundary_csv = opt("boundary_csv");
        c.outputs.summary_json = opt("summary_json");
        c.outputs.polariton_csv = opt("polariton_csv");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

// ---------------------------------------------------------------------------
// Execution

FieldState make_initial_state(const RunConfig& cfg) {
    if (cfg.initial == InitialState::pulse) return initial_state(cfg.medium, cfg.pulse);
    FieldState seed = FieldState::zeros(cfg.medium);
    std::vector<cplx> env(seed.size());
    for (std::size_t k = 0; k < env.size(); ++k)
        env[k] = cfg.pulse.profile(seed.cell_center(k) - cfg.pulse.center);
    const double delta = cfg.schedule.eval(0.0, 0.5 * cfg.medium.length);
    const auto branch = cfg.initial == InitialState::psi ? polariton::Branch::psi : polariton::Branch::phi;
    return polariton::compose(env, delta, branch, cfg.medium);
}

SimulationTrace execute(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.initial == InitialState::pulse)
        return run(cfg.medium, cfg.pulse, cfg.schedule, cfg.t_end, cfg.snapshot_stride);
    SimulationTrace t = run_from_state(cfg.medium, make_initial_state(cfg), cfg.schedule, cfg.t_end,
                                       cfg.snapshot_stride);
    t.pulse = cfg.pulse;
    t.warnings = resolution_warnings(cfg.medium, &cfg.pulse, cfg.schedule);
    return t;
}

RunSummary summarize(const RunConfig& cfg, const SimulationTrace& trace) {
    RunSummary s;
    s.warnings = trace.warnings;
    const double rs = std::min(cfg.effective_retrieval_start(), trace.end_time());
    if (metrics::input_energy(trace) > 0) {
        s.figures = metrics::memory_figures(trace, rs, cfg.effective_hold_time());
    } else {
        s.warnings.push_back({"figures.no_input", "input energy is zero; figures are not defined"});
    }
    s.conditions = polariton::condition_report(cfg.medium, cfg.pulse, cfg.schedule, cfg.t_end);
    return s;
}

json summary_json(const RunConfig& cfg, const RunSummary& s) {
    auto entry = [](const polariton::ConditionEntry& e) {
        return json{{"ratio", e.ratio}, {"verdict", polariton::to_string(e.verdict)}};
    };
    json w = json::array();
    for (const auto& x : s.warnings) w.push_back({{"code", x.code}, {"message", x.message}});
    return {{"units",
             "internal units: c = 1 and L = 1 unless overridden in medium; times in L/c, rates and "
             "detunings in c/L, lengths in L"},
            {"figures",
             {{"efficiency", s.figures.efficiency},
              {"fidelity", s.figures.fidelity},
              {"transmitted_fraction", s.figures.transmitted_fraction},
              {"stored_fraction_at_hold", s.figures.stored_fraction_at_hold},
              {"retrieval_delay", s.figures.retrieval_delay}}},
            {"conditions",
             {{s.conditions.detuning.name, entry(s.conditions.detuning)},
              {s.conditions.adiabaticity.name, entry(s.conditions.adiabaticity)},
              {s.conditions.dispersion.name, entry(s.conditions.dispersion)}}},
            {"warnings", w},
            {"config", to_json(cfg)}};
}

namespace {

std::ofstream open_out(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream o(path);
    if (!o) throw Error("cannot write " + path);
    return o;
}

}  // namespace

void write_boundary_csv(const std::string& path, const SimulationTrace& trace) {
    auto o = open_out(path);
    o << "t,re_E_out,im_E_out\n";
    for (std::size_t k = 0; k < trace.steps(); ++k) {
        const cplx v = trace.boundary_out[k];
        o << fmt(trace.sample_time(k)) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
    }
}

void write_snapshots_csv(const std::string& path, const SimulationTrace& trace) {
    auto o = open_out(path);
    o << "t,z,re_E,im_E,re_sigma,im_sigma\n";
    for (const auto& s : trace.snapshots) {
        for (std::size_t k = 0; k < s.state.size(); ++k) {
            const cplx e = s.state.e_field[k], c = s.state.coherence[k];
            o << fmt(s.t) << ',' << fmt(s.state.cell_center(k)) << ',' << fmt(e.real()) << ','
              << fmt(e.imag()) << ',' << fmt(c.real()) << ',' << fmt(c.imag()) << '\n';
        }
    }
}

void write_polariton_csv(const std::string& path, const RunConfig& cfg, const SimulationTrace& trace) {
    if (cfg.schedule.is_spatial() || !(cfg.medium.beta > 0)) return;
    const auto& st = trace.final_state();
    const auto f = polariton::decompose(st, cfg.schedule, cfg.medium);
    auto o = open_out(path);
    o << "t,k,theta,abs2_psi,abs2_phi,abs2_E,abs2_sigma\n";
    for (std::size_t i = 0; i < f.k_grid.size(); ++i) {
        o << fmt(st.t) << ',' << fmt(f.k_grid[i]) << ',' << fmt(f.theta[i]) << ','
          << fmt(std::norm(f.psi[i])) << ',' << fmt(std::norm(f.phi[i])) << ','
          << fmt(std::norm(f.e_k[i])) << ',' << fmt(std::norm(f.sigma_k[i])) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

std::string resolve(const std::string& out_dir, const std::string& p) {
    if (out_dir.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(out_dir) / p).string();
}

RunSummary simulate_and_write(const RunConfig& cfg, const std::string& out_dir) {
    const auto trace = execute(cfg);
    const auto s = summarize(cfg, trace);
    const auto& o = cfg.outputs;
    if (o.boundary_csv) write_boundary_csv(resolve(out_dir, *o.boundary_csv), trace);
    if (o.snapshots_csv) write_snapshots_csv(resolve(out_dir, *o.snapshots_csv), trace);
    if (o.polariton_csv) write_polariton_csv(resolve(out_dir, *o.polariton_csv), cfg, trace);
    if (o.summary_json) {
        auto f = open_out(resolve(out_dir, *o.summary_json));
        f << summary_json(cfg, s).dump(2) << '\n';
    }
    return s;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = load_config(config_path);
    const auto s = simulate_and_write(cfg, out_dir);
    std::cout << "efficiency=" << s.figures.efficiency << " fidelity=" << s.figures.fidelity
              << " transmitted=" << s.figures.transmitted_fraction
              << " conditions: detuning=" << polariton::to_string(s.conditions.detuning.verdict)
              << " adiabaticity=" << polariton::to_string(s.conditions.adiabaticity.verdict)
              << " dispersion=" << polariton::to_string(s.conditions.dispersion.verdict);
    if (!s.warnings.empty()) std::cout << " warnings=" << s.warnings.size();
    std::cout << '\n';
    return kExitOk;
}

json::json_pointer pointer_for(const std::string& dotted) {
    std::string ptr;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError(dotted, "malformed parameter path");
        ptr += "/" + part;
    }
    return json::json_pointer(ptr);
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("values", "not a number: " + item);
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw ConfigError("values", "not a number: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("values", "must list at least one value");
    return out;
}

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& values,
              const std::string& out_dir, int jobs) {
    const auto base = load_config(config_path);
    const auto vals = parse_values(values);
    json resolved = to_json(base);
    resolved["outputs"] = json::object();
    const auto ptr = pointer_for(param);
    if (!resolved.contains(ptr) || !resolved.at(ptr).is_number())
        throw ConfigError(param, "does not address a numeric field of the config");
    const bool integral = resolved.at(ptr).is_number_integer();

    std::vector<RunConfig> cfgs;
    for (double v : vals) {
        json j = resolved;
        if (integral) {
            if (v != std::floor(v)) throw ConfigError(param, "requires integer values");
            j[ptr] = static_cast<long long>(v);
        } else {
            j[ptr] = v;
        }
        // The patched retrieval point is recomputed unless it was the swept field.
        if (param != "retrieval_start" && !base.retrieval_start) j.erase("retrieval_start");
        if (param != "hold_time" && !base.hold_time) j.erase("hold_time");
        cfgs.push_back(from_json(j));
    }

    fs::create_directories(out_dir);
    std::vector<RunSummary> results(cfgs.size());
    presets::parallel_for(cfgs.size(), jobs, [&](std::size_t i) {
        RunConfig c = cfgs[i];
        c.outputs.summary_json = "sweep_" + std::to_string(i) + ".json";
        results[i] = simulate_and_write(c, out_dir);
    });

    auto o = open_out((fs::path(out_dir) / "sweep.csv").string());
    o << "value,efficiency,fidelity,transmitted_fraction\n";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const auto& f = results[i].figures;
        o << fmt(vals[i]) << ',' << fmt(f.efficiency) << ',' << fmt(f.fidelity) << ','
          << fmt(f.transmitted_fraction) << '\n';
    }
    std::cout << "sweep: " << vals.size() << " runs written to " << out_dir << '\n';
    return kExitOk;
}

int cmd_polaritons(const std::string& out_dir, double beta, double lo, double hi, int points) {
    if (!(beta > 0)) throw ConfigError("beta", "must be positive");
    if (points < 2) throw ConfigError("points", "must be >= 2");
    if (!(hi > lo)) throw ConfigError("max", "must exceed min");
    fs::create_directories(out_dir);
    auto o = open_out((fs::path(out_dir) / "polaritons.csv").string());
    o << "delta_over_beta,theta0,lambda1_over_beta,lambda2_over_beta,v_psi,v_phi\n";
    for (int i = 0; i < points; ++i) {
        const double r = lo + (hi - lo) * i / (points - 1);
        const double th = polariton::mixing_angle(0.0, r * beta, beta);
        const auto l = polariton::eigenvalues(th, beta);
        const auto v = polariton::group_velocities(th);
        o << fmt(r) << ',' << fmt(th) << ',' << fmt(l.lambda1 / beta) << ','
          << fmt(l.lambda2 / beta) << ',' << fmt(v.psi) << ',' << fmt(v.phi) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv) {
    CLI::App app{"Atomic frequency sweep memory simulator"};
    app.require_subcommand(1);
    std::string config, out, param, values, name, backend = "auto";
    int jobs = 1;
    double beta = 1.0, lo = -10.0, hi = 10.0;
    int points = 201;
    app.add_option("--backend", backend, "Kernel backend: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    auto* sim = app.add_subcommand("simulate", "Run one simulation from a JSON config");
    sim->add_option("--config", config, "Config path")->required();
    sim->add_option("--out", out, "Directory for relative output paths");

    auto* pre = app.add_subcommand("preset", "Run a figure preset");
    pre->add_option("name", name, "Preset name")->required();
    pre->add_option("--out", out, "Output directory")->required();
    pre->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* sw = app.add_subcommand("sweep", "Scan one numeric config field");
    sw->add_option("--config", config, "Base config path")->required();
    sw->add_option("--param", param, "Dotted path of the field, e.g. medium.gamma")->required();
    sw->add_option("--values", values, "Comma-separated values")->required();
    sw->add_option("--out", out, "Output directory")->required();
    sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* pol = app.add_subcommand("polaritons", "Tabulate mixing angle, eigenvalues and velocities");
    pol->add_option("--out", out, "Output directory")->required();
    pol->add_option("--beta", beta, "Coupling");
    pol->add_option("--min", lo, "Smallest delta/beta");
    pol->add_option("--max", hi, "Largest delta/beta");
    pol->add_option("--points", points, "Grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (backend != "auto") {
            const auto b = backend == "avx2" ? kernels::Backend::avx2 : kernels::Backend::scalar;
            if (!kernels::set_backend(b)) throw ConfigError("backend", backend + " is not available");
        }
        if (*sim) return cmd_simulate(config, out);
        if (*pre) {
            presets::run_preset(name, out, jobs, std::cout);
            return kExitOk;
        }
        if (*sw) return cmd_sweep(config, param, values, out, jobs);
        if (*pol) return cmd_polaritons(out, beta, lo, hi, points);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalBlowup& e) {
        std::cerr << "numerical blowup: " << e.what() << '\n';
        return kExitBlowup;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace afs::cli
