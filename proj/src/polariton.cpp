#include "afs/polariton.hpp"

#include <fftw3.h>

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <type_traits>

namespace afs::polariton {

double mixing_angle(double k, double delta, double beta, double c) {
    if (!(beta > 0)) throw DegenerateCoupling();
    const double x = c * k + delta;
    // atan2(2 beta, -x) lies in (0, pi) because beta > 0.
    return 0.5 * std::atan2(2.0 * beta, -x);
}

Eigenvalues eigenvalues(double theta, double beta) {
    if (!(theta > 0.0 && theta < 0.5 * kPi))
        throw PoleError("eigenvalues: theta must lie strictly inside (0, pi/2)");
    return {beta / std::tan(theta), -beta * std::tan(theta)};
}

GroupVelocities group_velocities(double theta0, double c) {
    const double cs = std::cos(theta0);
    const double v_psi = c * cs * cs;
    return {v_psi, c - v_psi};
}

double theta_dot(double delta_dot, double beta, double theta) {
    const double s = std::sin(2.0 * theta);
    return -(delta_dot / (4.0 * beta)) * s * s;
}

// ---------------------------------------------------------------------------

namespace {

// out[m] = n^{-1/2} sum_j in[j] exp(sign * 2 pi i j m / n), sign = +1 or -1.
std::vector<cplx> dft(const std::vector<cplx>& in, int sign) {
    const int n = static_cast<int>(in.size());
    std::vector<cplx> buf(in);
    std::vector<cplx> out(in.size());
    auto* ib = reinterpret_cast<fftw_complex*>(buf.data());
    auto* ob = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, ib, ob, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= norm;
    return out;
}

// Map FFT bin order (0..n-1) to negative-to-positive order.
std::size_t bin_of(std::size_t idx, std::size_t n) { return (idx + n / 2) % n; }

double k_of(std::size_t idx, std::size_t n, double l_pad) {
    const auto m = static_cast<long long>(idx) - static_cast<long long>(n / 2);
    return 2.0 * kPi * static_cast<double>(m) / l_pad;
}

std::vector<cplx> padded(const std::vector<cplx>& v, std::size_t n_pad) {
    std::vector<cplx> out(n_pad, cplx{});
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

double sum_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

}  // namespace

double PolaritonFrame::psi_energy() const { return sum_norm(psi); }
double PolaritonFrame::phi_energy() const { return sum_norm(phi); }
double PolaritonFrame::field_energy() const { return sum_norm(e_k); }
double PolaritonFrame::coherence_energy() const { return sum_norm(sigma_k); }

PolaritonFrame decompose(const FieldState& state, double delta, const MediumConfig& medium) {
    const std::size_t n = state.size();
    if (n == 0 || state.coherence.size() != n)
        throw ConfigError("state", "empty or inconsistent arrays");
    const std::size_t n_pad = n * kPadFactor;
    const double l_pad = static_cast<double>(n_pad) * state.dz;

    const auto e_raw = dft(padded(state.e_field, n_pad), +1);
    const auto s_raw = dft(padded(state.coherence, n_pad), +1);

    PolaritonFrame f;
    f.delta = delta;
    f.k_grid.resize(n_pad);
    f.theta.resize(n_pad);
    f.lambda1.resize(n_pad);
    f.lambda2.resize(n_pad);
    f.e_k.resize(n_pad);
    f.sigma_k.resize(n_pad);
    f.psi.resize(n_pad);
    f.phi.resize(n_pad);
    for (std::size_t i = 0; i < n_pad; ++i) {
        const std::size_t b = bin_of(i, n_pad);
        const double k = k_of(i, n_pad, l_pad);
        const double th = mixing_angle(k, delta, medium.beta, medium.c);
        const double cs = std::cos(th), sn = std::sin(th);
        f.k_grid[i] = k;
        f.theta[i] = th;
        f.lambda1[i] = medium.beta * cs / sn;
        f.lambda2[i] = -medium.beta * sn / cs;
        f.e_k[i] = e_raw[b];
        f.sigma_k[i] = s_raw[b];
        f.psi[i] = cs * e_raw[b] - sn * s_raw[b];
        f.phi[i] = sn * e_raw[b] + cs * s_raw[b];
    }
    return f;
}

PolaritonFrame decompose(const FieldState& state, const DetuningSchedule& schedule,
                         const MediumConfig& medium) {
    if (schedule.is_spatial())
        throw UnsupportedSchedule("decompose: spatial-gradient schedules have no single k-space frame");
    return decompose(state, schedule.eval(state.t, 0.5 * medium.length), medium);
}

FieldState compose(const std::vector<cplx>& envelope, double delta, Branch branch,
                   const MediumConfig& medium) {
    const std::size_t n = static_cast<std::size_t>(medium.n_cells);
    if (envelope.size() != n) throw ConfigError("envelope", "length must equal medium.n_cells");
    const std::size_t n_pad = n * kPadFactor;
    const double l_pad = static_cast<double>(n_pad) * medium.dz();

    const auto f = dft(padded(envelope, n_pad), +1);
    std::vector<cplx> e_k(n_pad), s_k(n_pad);
    for (std::size_t i = 0; i < n_pad; ++i) {
        const std::size_t b = bin_of(i, n_pad);
        const double th = mixing_angle(k_of(i, n_pad, l_pad), delta, medium.beta, medium.c);
        const double cs = std::cos(th), sn = std::sin(th);
        if (branch == Branch::psi) {
            e_k[b] = cs * f[b];
            s_k[b] = -sn * f[b];
        } else {
            e_k[b] = sn * f[b];
            s_k[b] = cs * f[b];
        }
    }
    const auto e = dft(e_k, -1);
    const auto s = dft(s_k, -1);
    FieldState out = FieldState::zeros(medium);
    std::copy(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n), out.e_field.begin());
    std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n), out.coherence.begin());
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double ratio_at(double delta, double rate, double beta) {
    const double th = mixing_angle(0.0, delta, beta);
    const double td = std::abs(theta_dot(rate, beta, th));
    if (td == 0.0) return 0.0;
    const double t = std::tan(th);
    const double lmin = beta * std::min(1.0 / t, t);
    return td / lmin;
}

}  // namespace

double adiabaticity_margin(const DetuningSchedule& schedule, double beta, double t0, double t1,
                           double c) {
    if (!(beta > 0)) throw DegenerateCoupling();
    if (!(t1 > t0)) throw DomainError("adiabaticity_margin: t1 must exceed t0");

    if (const auto* g = std::get_if<SpatialGradient>(&schedule.variant())) {
        // Retarded-frame equivalent sweep rate; the peak over theta is attained
        // somewhere along the pulse path, so use the analytic maximum.
        const double rate = std::abs(g->slope) * c;
        return 3.0 * std::sqrt(3.0) / 4.0 * rate / (4.0 * beta * beta);
    }

    constexpr int kSamples = 20000;
    double best = 0.0;
    auto probe = [&](double t) {
        if (t < t0 || t > t1) return;
        best = std::max(best, ratio_at(schedule.eval(t, 0.0), schedule.rate_at(t), beta));
    };
    for (int i = 0; i <= kSamples; ++i)
        probe(t0 + (t1 - t0) * static_cast<double>(i) / kSamples);

    // Within a linear piece the ratio peaks at theta = pi/6 or pi/3, i.e.
    // Delta = -+2 beta/sqrt(3); probe those crossings exactly.
    auto refine = [&](double ta, double tb, double da, double db) {
        if (tb <= ta || da == db) return;
        for (double target : {-2.0 * beta / std::sqrt(3.0), 2.0 * beta / std::sqrt(3.0), 0.0}) {
            const double s = (target - da) / (db - da);
            if (s >= 0.0 && s <= 1.0) probe(ta + s * (tb - ta));
        }
    };
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LinearSweep>) {
                refine(v.t_start, v.t_end, v.delta_start, v.delta_end);
            } else if constexpr (std::is_same_v<T, PiecewiseSweep>) {
                for (const auto& s : v.segments) refine(s.t_begin, s.t_end, s.delta_begin, s.delta_end);
            }
        },
        schedule.variant());
    return best;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::warn: return "warn";
        case Verdict::fail: return "fail";
    }
    return "fail";
}

Verdict classify(double ratio) {
    if (ratio < 0.2) return Verdict::pass;
    if (ratio < 0.5) return Verdict::warn;
    return Verdict::fail;
}

bool ConditionReport::all_pass() const { return worst() == Verdict::pass; }

Verdict ConditionReport::worst() const {
    return std::max({detuning.verdict, adiabaticity.verdict, dispersion.verdict});
}

ConditionReport condition_report(const MediumConfig& medium, const PulseSpec& pulse,
                                 const DetuningSchedule& schedule, double t_end) {
    ConditionReport r;
    const double beta = medium.beta;
    const double d0 = std::abs(schedule.eval(0.0, std::clamp(pulse.center, 0.0, medium.length)));
    r.detuning.name = "beta_over_delta0";
    r.detuning.ratio = d0 > 0 ? beta / d0 : std::numeric_limits<double>::infinity();

    r.adiabaticity.name = "adiabaticity_margin";
    if (beta > 0) {
        double t1 = t_end > 0 ? t_end : schedule.horizon();
        if (!(t1 > 0)) t1 = 1.0;
        r.adiabaticity.ratio = adiabaticity_margin(schedule, beta, 0.0, t1, medium.c);
    } else {
        r.adiabaticity.ratio = std::numeric_limits<double>::infinity();
    }

    r.dispersion.name = "bandwidth_over_beta";
    const double bw = bandwidth(pulse, medium.c);
    r.dispersion.ratio = beta > 0 ? bw / beta : std::numeric_limits<double>::infinity();

    for (auto* e : {&r.detuning, &r.adiabaticity, &r.dispersion}) e->verdict = classify(e->ratio);
    return r;
}

}  // namespace afs::polariton
