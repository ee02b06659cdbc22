#include "afs/metrics.hpp"

#include <fftw3.h>

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

namespace afs::metrics {

namespace {

std::size_t first_index_at_or_after(const SimulationTrace& trace, double t) {
    // sample_time(k) = t_origin + (k + 1/2) dt
    const double x = (t - trace.t_origin) / trace.dt - 0.5;
    if (x <= 0) return 0;
    const auto k = static_cast<std::size_t>(std::ceil(x - 1e-9));
    return std::min(k, trace.steps());
}

double out_energy(const SimulationTrace& trace, std::size_t k0, std::size_t k1) {
    double s = 0.0;
    for (std::size_t k = k0; k < k1; ++k) s += std::norm(trace.boundary_out[k]);
    return trace.medium.c * s * trace.dt;
}

void check_retrieval_start(const SimulationTrace& trace, double retrieval_start) {
    if (retrieval_start > trace.end_time())
        throw DomainError("retrieval_start lies beyond the end of the trace");
}

}  // namespace

double input_energy(const SimulationTrace& trace) {
    if (trace.pulse && trace.pulse->injection == Injection::boundary_driven) {
        return trace.energy_log.empty() ? 0.0 : trace.energy_log.back().cumulative_in;
    }
    return trace.initial_energy;
}

double efficiency(const SimulationTrace& trace, double retrieval_start) {
    check_retrieval_start(trace, retrieval_start);
    const double e_in = input_energy(trace);
    if (!(e_in > 0)) throw DomainError("efficiency: input energy is zero");
    return out_energy(trace, first_index_at_or_after(trace, retrieval_start), trace.steps()) / e_in;
}

double transmitted_fraction(const SimulationTrace& trace, double retrieval_start) {
    check_retrieval_start(trace, retrieval_start);
    const double e_in = input_energy(trace);
    if (!(e_in > 0)) throw DomainError("transmitted_fraction: input energy is zero");
    return out_energy(trace, 0, first_index_at_or_after(trace, retrieval_start)) / e_in;
}

double stored_fraction(const SimulationTrace& trace, double t) {
    const double e_in = input_energy(trace);
    if (!(e_in > 0) || trace.energy_log.empty()) return 0.0;
    const auto it = std::min_element(trace.energy_log.begin(), trace.energy_log.end(),
                                     [t](const EnergySample& a, const EnergySample& b) {
                                         return std::abs(a.t - t) < std::abs(b.t - t);
                                     });
    return (it->total - it->field) / e_in;
}

double max_field_fraction(const SimulationTrace& trace, double t0, double t1) {
    double m = 0.0;
    for (const auto& e : trace.energy_log)
        if (e.t >= t0 && e.t <= t1 && e.total > 0) m = std::max(m, e.field / e.total);
    return m;
}

double input_duration(const PulseSpec& pulse, double c) { return pulse.z0 / (2.0 * c); }

double centroid_time(std::span<const cplx> series, double t0, double dt) {
    double w = 0.0, m = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double p = std::norm(series[k]);
        w += p;
        m += p * (t0 + static_cast<double>(k) * dt);
    }
    return w > 0 ? m / w : t0;
}

double pulse_duration(std::span<const cplx> series, double dt) {
    const double tc = centroid_time(series, 0.0, dt);
    double w = 0.0, v = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double p = std::norm(series[k]);
        const double d = static_cast<double>(k) * dt - tc;
        w += p;
        v += p * d * d;
    }
    return w > 0 ? std::sqrt(v / w) : 0.0;
}

double retrieval_delay(const SimulationTrace& trace, double retrieval_start) {
    check_retrieval_start(trace, retrieval_start);
    const std::size_t k0 = first_index_at_or_after(trace, retrieval_start);
    const std::span<const cplx> tail(trace.boundary_out.data() + k0, trace.steps() - k0);
    return centroid_time(tail, trace.sample_time(k0), trace.dt) - retrieval_start;
}

cplx reference_at_exit(const PulseSpec& pulse, const MediumConfig& medium, double t) {
    if (pulse.injection == Injection::boundary_driven)
        return pulse.profile(medium.c * t - medium.length - pulse.center);
    return pulse.profile(medium.length - medium.c * t - pulse.center);
}

double shape_fidelity(std::span<const cplx> out, double t0, double dt,
                      const std::function<cplx(double)>& ref, double ref_norm2, double tau_guess,
                      double tau_span) {
    double out_norm2 = 0.0;
    for (const auto& v : out) out_norm2 += std::norm(v);
    out_norm2 *= dt;
    if (!(out_norm2 > 0) || !(ref_norm2 > 0)) throw UndefinedFidelity();

    auto overlap = [&](double tau) {
        cplx acc{};
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double t = t0 + static_cast<double>(k) * dt;
            acc += std::conj(out[k]) * ref(t - tau);
        }
        acc *= dt;
        return std::norm(acc) / (out_norm2 * ref_norm2);
    };

    constexpr int kScan = 400;
    const double h = 2.0 * tau_span / kScan;
    double best_tau = tau_guess, best = -1.0;
    for (int i = 0; i <= kScan; ++i) {
        const double tau = tau_guess - tau_span + h * i;
        const double v = overlap(tau);
        if (v > best) {
            best = v;
            best_tau = tau;
        }
    }
    // Golden-section refinement on the bracketing interval.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_tau - h, b = best_tau + h;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = overlap(x1), f2 = overlap(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * std::max(1.0, std::abs(best_tau)); ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = overlap(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = overlap(x2);
        }
    }
    best = std::max({best, f1, f2});
    return std::clamp(best, 0.0, 1.0);
}

double fidelity(const SimulationTrace& trace, double retrieval_start, const PulseSpec& reference) {
    check_retrieval_start(trace, retrieval_start);
    const auto& m = trace.medium;
    const std::size_t k0 = first_index_at_or_after(trace, retrieval_start);
    const std::span<const cplx> tail(trace.boundary_out.data() + k0, trace.steps() - k0);
    const double t0 = trace.sample_time(k0);

    const double t_ref = reference.injection == Injection::boundary_driven
                             ? (m.length + reference.center) / m.c
                             : (m.length - reference.center) / m.c;
    const double tau_guess = centroid_time(tail, t0, trace.dt) - t_ref;
    const double width = reference.z0 / m.c;
    const double span = std::max(4.0 * width, 2.0 * pulse_duration(tail, trace.dt));
    const double ref_norm2 = std::norm(reference.amplitude) * width * std::sqrt(kPi / 2.0);
    return shape_fidelity(
        tail, t0, trace.dt, [&](double t) { return reference_at_exit(reference, m, t); }, ref_norm2,
        tau_guess, span);
}

MemoryFigures memory_figures(const SimulationTrace& trace, double retrieval_start,
                             double hold_time) {
    MemoryFigures f;
    f.efficiency = efficiency(trace, retrieval_start);
    f.transmitted_fraction = transmitted_fraction(trace, retrieval_start);
    f.stored_fraction_at_hold = stored_fraction(trace, hold_time);
    f.retrieval_delay = retrieval_delay(trace, retrieval_start);
    if (trace.pulse && f.efficiency > 0) {
        try {
            f.fidelity = fidelity(trace, retrieval_start, *trace.pulse);
        } catch (const UndefinedFidelity&) {
            f.fidelity = 0.0;
        }
    }
    return f;
}

// ---------------------------------------------------------------------------

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        r += e * e;
    }
    f.rms = std::sqrt(r / n);
    return f;
}

}  // namespace

double measure_group_velocity(const SimulationTrace& trace, double t0, double t1) {
    std::vector<double> ts, zs;
    for (const auto& s : trace.snapshots) {
        if (s.t < t0 || s.t > t1) continue;
        double w = 0.0, m = 0.0;
        for (std::size_t k = 0; k < s.state.size(); ++k) {
            const double p = std::norm(s.state.e_field[k]);
            w += p;
            m += p * s.state.cell_center(k);
        }
        if (!(w > 0)) continue;
        ts.push_back(s.t);
        zs.push_back(m / w);
    }
    if (ts.size() < 3)
        throw InsufficientData("measure_group_velocity: fewer than 3 snapshots in window");
    return least_squares(ts, zs).slope;
}

DecayFit fit_decay_rate(const SimulationTrace& trace, double t0, double t1) {
    std::vector<double> ts, ys;
    double worst_field = 0.0;
    bool non_monotone = false;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& e : trace.energy_log) {
        if (e.t < t0 || e.t > t1) continue;
        if (!(e.total > 0)) continue;
        ts.push_back(e.t);
        ys.push_back(std::log(e.total));
        worst_field = std::max(worst_field, e.field / e.total);
        if (e.total > prev * (1.0 + 1e-9)) non_monotone = true;
        prev = e.total;
    }
    if (ts.size() < 3) throw InsufficientData("fit_decay_rate: fewer than 3 samples in window");
    const auto f = least_squares(ts, ys);
    DecayFit out;
    out.rate = -f.slope;
    out.rms_residual = f.rms;
    out.samples = ts.size();
    if (non_monotone || f.rms > 1e-3)
        out.warnings.push_back({"fit.poor", "energy is not a clean exponential in the window"});
    if (worst_field > 0.05)
        out.warnings.push_back({"fit.field_fraction", "field carries more than 5% of the energy"});
    return out;
}

double oscillation_rate(std::span<const cplx> series, double dt, double min_omega) {
    const std::size_t n = series.size();
    if (n < 8) throw InsufficientData("oscillation_rate: series too short");
    std::vector<double> in(n * 8, 0.0);
    double mean = 0.0;
    for (const auto& v : series) mean += std::norm(v);
    mean /= static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) in[k] = std::norm(series[k]) - mean;

    const int p = static_cast<int>(in.size());
    std::vector<cplx> spec(in.size() / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(p, in.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double dw = 2.0 * kPi / (static_cast<double>(p) * dt);
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t m = 1; m + 1 < spec.size(); ++m) {
        if (static_cast<double>(m) * dw <= min_omega) continue;
        const double v = std::abs(spec[m]);
        if (v > best_v) {
            best_v = v;
            best = m;
        }
    }
    if (best == 0) throw InsufficientData("oscillation_rate: no spectral content above cutoff");
    // Parabolic interpolation of the peak.
    const double a = std::abs(spec[best - 1]), b = std::abs(spec[best]), c = std::abs(spec[best + 1]);
    const double den = a - 2.0 * b + c;
    const double shift = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
    return 0.5 * (static_cast<double>(best) + shift) * dw;
}

}  // namespace afs::metrics
