#include "afs/presets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace afs::presets {

namespace fs = std::filesystem;
using cli::fmt;
using cli::RunConfig;

UnknownPreset::UnknownPreset(const std::string& name)
    : ConfigError("preset", [&] {
          std::string msg = "unknown preset \"" + name + "\"; valid names:";
          for (const auto& n : names()) msg += " " + n;
          return msg;
      }()) {}

double delta_omega(double z0, double c) { return c / z0; }

const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"fig2", "fig3", "fig4a", "fig4b", "s5", "s6", "s7", "s8"};
    return n;
}

RunConfig storage_run(const StorageParams& p) {
    const double dw = delta_omega(p.z0);
    RunConfig c;
    c.medium.beta = p.beta_over_dw * dw;
    c.medium.gamma = p.gamma;
    c.medium.n_cells = p.n_cells;
    c.pulse.z0 = p.z0;
    c.pulse.center = p.center;
    const double beta = c.medium.beta;
    const double d0 = p.delta0_over_beta * beta;
    const double ramp =
        p.ramp_time > 0 ? p.ramp_time : std::abs(2.0 * d0) / (p.rate_over_beta2 * beta * beta);
    const auto s = storage_retrieval_schedule(d0, -d0, ramp, p.hold);
    c.schedule = s.schedule;
    c.retrieval_start = s.retrieval_start;
    c.hold_time = ramp + 0.5 * p.hold;
    c.t_end = s.retrieval_end + p.tail;
    return c;
}

RunConfig fig2() {
    StorageParams p;
    p.n_cells = 4096;
    p.z0 = 0.045;
    p.beta_over_dw = 30.0;
    p.delta0_over_beta = -50.0;
    p.rate_over_beta2 = 0.4;
    p.hold = 0.2;
    p.center = 0.25;
    p.tail = 0.9;
    return storage_run(p);
}

std::vector<double> fig3_ratios() { return {-10, -5, -2, -1, 0, 1, 2, 5, 10}; }

RunConfig fig3_member(double delta_over_beta) {
    RunConfig c;
    const double z0 = 0.045;
    c.medium.n_cells = 4096;
    c.medium.beta = 30.0 * delta_omega(z0);
    c.pulse.z0 = z0;
    c.pulse.center = 0.3;
    c.initial = cli::InitialState::psi;
    const double delta = delta_over_beta * c.medium.beta;
    c.schedule = ConstantDetuning{delta};
    const double v = polariton::group_velocities(polariton::mixing_angle(0.0, delta, c.medium.beta)).psi;
    // Travel about 0.4 L, capped at one transit time.
    c.t_end = std::min(0.4 / std::max(v, 1e-9), 1.0);
    c.snapshot_stride = 16;
    return c;
}

std::vector<double> fig4_depths() { return {10, 30, 100, 300, 1000}; }

RunConfig fig4_member(double gamma_over_dw, double depth) {
    const double z0 = 0.15;
    const double dw = delta_omega(z0);
    const double gamma = gamma_over_dw * dw;
    // depth = beta^2 L / (c gamma) with L = c = 1.
    const double beta = std::sqrt(depth * gamma);
    StorageParams p;
    p.n_cells = 1024;
    p.z0 = z0;
    p.beta_over_dw = beta / dw;
    p.delta0_over_beta = -8.0;
    p.ramp_time = 2.0 / 3.0;
    p.hold = 0.0;
    p.center = 0.5;
    p.gamma = gamma;
    p.tail = 1.5;
    return storage_run(p);
}

std::vector<double> s5_ratios() { return {-10.0, -1.0, -0.1}; }

RunConfig s5_member(double delta0_over_beta) {
    StorageParams p;
    p.delta0_over_beta = delta0_over_beta;
    return storage_run(p);
}

std::vector<double> s6_rates() { return {0.3, 3.0, 30.0}; }

RunConfig s6_member(double rate_over_beta2) {
    StorageParams p;
    p.rate_over_beta2 = rate_over_beta2;
    return storage_run(p);
}

std::vector<double> s7_couplings() { return {16.0, 4.0}; }

RunConfig s7_member(double beta_over_dw) {
    StorageParams p;
    p.beta_over_dw = beta_over_dw;
    return storage_run(p);
}

GemSetup s8(double z0) {
    GemSetup g;
    g.medium.n_cells = 4096;
    g.medium.beta = 10.0 * delta_omega(z0);
    g.pulse.z0 = z0;
    // Keep the envelope inside the medium for wider pulses.
    g.pulse.center = std::max(0.15, 2.7 * z0);
    g.slope = 0.1 * g.medium.beta * g.medium.beta;
    g.t_flip = 1.6;
    g.t_end = 4.0;
    return g;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

namespace {

struct Member {
    std::string label;
    RunConfig config;
};

struct MemberResult {
    SimulationTrace trace;
    cli::RunSummary summary;
};

std::ofstream open_csv(const fs::path& p) {
    std::ofstream o(p);
    if (!o) throw Error("cannot write " + p.string());
    return o;
}

std::vector<MemberResult> run_members(const std::string& preset, const std::vector<Member>& members,
                                      const fs::path& dir, int jobs, std::ostream& log) {
    std::vector<MemberResult> out(members.size());
    std::mutex log_mutex;
    parallel_for(members.size(), jobs, [&](std::size_t i) {
        const auto& m = members[i];
        auto trace = cli::execute(m.config);
        auto summary = cli::summarize(m.config, trace);
        const std::string stem = preset + "_" + m.label;
        cli::write_boundary_csv((dir / (stem + "_boundary.csv")).string(), trace);
        {
            std::ofstream j(dir / (stem + ".json"));
            j << cli::summary_json(m.config, summary).dump(2) << '\n';
        }
        {
            std::lock_guard<std::mutex> lock(log_mutex);
            log << preset << " " << m.label << ": efficiency=" << summary.figures.efficiency
                << " transmitted=" << summary.figures.transmitted_fraction << '\n';
        }
        out[i] = {std::move(trace), std::move(summary)};
    });
    return out;
}

std::string label_of(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    std::string s = buf;
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

std::span<const cplx> before(const SimulationTrace& t, double t_cut) {
    std::size_t k = 0;
    while (k < t.steps() && t.sample_time(k) < t_cut) ++k;
    return {t.boundary_out.data(), k};
}

std::span<const cplx> after(const SimulationTrace& t, double t_cut) {
    std::size_t k = 0;
    while (k < t.steps() && t.sample_time(k) < t_cut) ++k;
    return {t.boundary_out.data() + k, t.steps() - k};
}

void preset_fig2(const fs::path& dir, int jobs, std::ostream& log) {
    const auto cfg = fig2();
    const auto r = run_members("fig2", {{"run", cfg}}, dir, jobs, log);
    const auto& s = r[0].summary;
    const auto& seg = std::get<PiecewiseSweep>(cfg.schedule.variant()).segments;
    const double hold_field =
        metrics::max_field_fraction(r[0].trace, seg.front().t_end + 0.05, seg.back().t_begin);
    auto o = open_csv(dir / "fig2.csv");
    o << "efficiency,fidelity,transmitted_fraction,stored_fraction_at_hold,max_hold_field_fraction,"
         "retrieval_delay,beta_over_delta0,adiabaticity_margin,bandwidth_over_beta\n";
    o << fmt(s.figures.efficiency) << ',' << fmt(s.figures.fidelity) << ','
      << fmt(s.figures.transmitted_fraction) << ',' << fmt(s.figures.stored_fraction_at_hold) << ','
      << fmt(hold_field) << ',' << fmt(s.figures.retrieval_delay) << ','
      << fmt(s.conditions.detuning.ratio) << ',' << fmt(s.conditions.adiabaticity.ratio) << ','
      << fmt(s.conditions.dispersion.ratio) << '\n';
}

void preset_fig3(const fs::path& dir, int jobs, std::ostream& log) {
    std::vector<Member> members;
    for (double r : fig3_ratios()) members.push_back({label_of(r), fig3_member(r)});
    const auto res = run_members("fig3", members, dir, jobs, log);
    auto o = open_csv(dir / "fig3.csv");
    o << "delta_over_beta,v_analytic,v_measured\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& c = members[i].config;
        const double delta = c.schedule.eval(0.0, 0.5);
        const double va = polariton::group_velocities(
                              polariton::mixing_angle(0.0, delta, c.medium.beta), c.medium.c)
                              .psi;
        const double vm = metrics::measure_group_velocity(res[i].trace, 0.0, c.t_end);
        o << fmt(fig3_ratios()[i]) << ',' << fmt(va) << ',' << fmt(vm) << '\n';
    }
}

void preset_fig4(const std::string& name, double gamma_over_dw, const fs::path& dir, int jobs,
                 std::ostream& log) {
    std::vector<Member> members;
    for (double d : fig4_depths()) members.push_back({"d" + label_of(d), fig4_member(gamma_over_dw, d)});
    const auto res = run_members(name, members, dir, jobs, log);
    auto o = open_csv(dir / (name + ".csv"));
    o << "optical_depth,efficiency,fidelity,transmitted_fraction,beta,gamma\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& f = res[i].summary.figures;
        const auto& m = members[i].config.medium;
        o << fmt(optical_depth(m)) << ',' << fmt(f.efficiency) << ',' << fmt(f.fidelity) << ','
          << fmt(f.transmitted_fraction) << ',' << fmt(m.beta) << ',' << fmt(m.gamma) << '\n';
    }
}

void preset_s5(const fs::path& dir, int jobs, std::ostream& log) {
    std::vector<Member> members;
    for (double r : s5_ratios()) members.push_back({label_of(r), s5_member(r)});
    const auto res = run_members("s5", members, dir, jobs, log);
    auto o = open_csv(dir / "s5.csv");
    o << "delta0_over_beta,transmitted_fraction,efficiency,sin2_theta0,oscillation_rate_over_beta\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& c = members[i].config;
        const double beta = c.medium.beta;
        const double th = polariton::mixing_angle(0.0, s5_ratios()[i] * beta, beta);
        const auto pre = before(res[i].trace, c.effective_retrieval_start());
        const double rate = metrics::oscillation_rate(pre, res[i].trace.dt, 0.2 * beta);
        const auto& f = res[i].summary.figures;
        o << fmt(s5_ratios()[i]) << ',' << fmt(f.transmitted_fraction) << ',' << fmt(f.efficiency)
          << ',' << fmt(std::sin(th) * std::sin(th)) << ',' << fmt(rate / beta) << '\n';
    }
}

void preset_s6(const fs::path& dir, int jobs, std::ostream& log) {
    std::vector<Member> members;
    for (double r : s6_rates()) members.push_back({label_of(r), s6_member(r)});
    const auto res = run_members("s6", members, dir, jobs, log);
    auto o = open_csv(dir / "s6.csv");
    o << "rate_over_beta2,transmitted_fraction,efficiency\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& f = res[i].summary.figures;
        o << fmt(s6_rates()[i]) << ',' << fmt(f.transmitted_fraction) << ',' << fmt(f.efficiency)
          << '\n';
    }
}

void preset_s7(const fs::path& dir, int jobs, std::ostream& log) {
    std::vector<Member> members;
    for (double b : s7_couplings()) members.push_back({label_of(b), s7_member(b)});
    const auto res = run_members("s7", members, dir, jobs, log);
    auto o = open_csv(dir / "s7.csv");
    o << "beta_over_delta_omega,efficiency,duration_ratio\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& c = members[i].config;
        const auto post = after(res[i].trace, c.effective_retrieval_start());
        const double ratio = metrics::pulse_duration(post, res[i].trace.dt) /
                             metrics::input_duration(c.pulse, c.medium.c);
        o << fmt(s7_couplings()[i]) << ',' << fmt(res[i].summary.figures.efficiency) << ','
          << fmt(ratio) << '\n';
    }
}

void preset_s8(const fs::path& dir, std::ostream& log) {
    auto o = open_csv(dir / "s8.csv");
    o << "z0,slope,rel_l2_discrepancy,centroid_shift,gem_pre_flip_fraction,gem_efficiency,"
         "afs_efficiency\n";
    for (double z0 : {0.05, 0.10}) {
        const auto g = s8(z0);
        const auto r = gem::compare_afs_gem(g.medium, g.pulse, g.slope, g.t_flip, g.t_end);
        o << fmt(z0) << ',' << fmt(g.slope) << ',' << fmt(r.rel_l2_discrepancy) << ','
          << fmt(r.centroid_shift) << ',' << fmt(r.gem_pre_flip_fraction) << ','
          << fmt(r.gem_efficiency) << ',' << fmt(r.afs_efficiency) << '\n';
        auto b = open_csv(dir / ("s8_z" + label_of(z0) + "_boundary.csv"));
        b << "t,re_E_afs,im_E_afs,re_E_gem,im_E_gem\n";
        for (std::size_t k = 0; k < r.gem_output.size(); ++k) {
            b << fmt((static_cast<double>(k) + 0.5) * r.dt) << ',' << fmt(r.afs_output[k].real())
              << ',' << fmt(r.afs_output[k].imag()) << ',' << fmt(r.gem_output[k].real()) << ','
              << fmt(r.gem_output[k].imag()) << '\n';
        }
        log << "s8 z0=" << z0 << ": discrepancy=" << r.rel_l2_discrepancy
            << " centroid_shift=" << r.centroid_shift << '\n';
    }
}

}  // namespace

void run_preset(const std::string& name, const std::string& out_dir, int jobs, std::ostream& log) {
    const auto& valid = names();
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) throw UnknownPreset(name);
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    if (name == "fig2") return preset_fig2(dir, jobs, log);
    if (name == "fig3") return preset_fig3(dir, jobs, log);
    if (name == "fig4a") return preset_fig4(name, kFig4GammaA, dir, jobs, log);
    if (name == "fig4b") return preset_fig4(name, kFig4GammaB, dir, jobs, log);
    if (name == "s5") return preset_s5(dir, jobs, log);
    if (name == "s6") return preset_s6(dir, jobs, log);
    if (name == "s7") return preset_s7(dir, jobs, log);
    preset_s8(dir, log);
}

}  // namespace afs::presets
