#include "afs/gem.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "afs/metrics.hpp"

namespace afs::gem {

SimulationTrace run_gem(const MediumConfig& medium, const PulseSpec& pulse, double slope,
                        double t_flip, double t_end) {
    return run(medium, pulse, SpatialGradient{slope, 0.5 * medium.length, t_flip}, t_end);
}

double midpoint_crossing_time(const PulseSpec& pulse, const MediumConfig& medium) {
    const double half = 0.5 * medium.length;
    if (pulse.injection == Injection::boundary_driven) return (half + pulse.center) / medium.c;
    return (half - pulse.center) / medium.c;
}

DetuningSchedule matched_afs_schedule(double slope, double c, double t_flip, double t_zero,
                                      double horizon) {
    if (slope == 0.0) return ConstantDetuning{0.0};
    const double r = slope * c;
    const double end = std::max(horizon, t_flip) + 1.0;
    PiecewiseSweep p;
    p.segments.push_back({0.0, t_flip, -r * t_zero, r * (t_flip - t_zero)});
    p.segments.push_back({t_flip, end, r * (t_flip - t_zero), r * (2.0 * t_flip - end - t_zero)});
    return p;
}

namespace {

std::vector<double> magnitudes(const std::vector<cplx>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](cplx x) { return std::abs(x); });
    return out;
}

// Linear interpolation of samples y[k] at (k + 1/2) dt; zero outside.
double sample(const std::vector<double>& y, double dt, double t) {
    const double x = t / dt - 0.5;
    if (x < 0.0 || x > static_cast<double>(y.size() - 1)) return 0.0;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= y.size()) return y.back();
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * y[i] + w * y[i + 1];
}

}  // namespace

ComparisonResult compare_afs_gem(const MediumConfig& medium, const PulseSpec& pulse, double slope,
                                 double t_flip, double t_end) {
    medium.validate();
    pulse.validate(medium);
    const auto afs_schedule = matched_afs_schedule(slope, medium.c, t_flip,
                                                   midpoint_crossing_time(pulse, medium), t_end);

    auto gem_job = std::async(std::launch::async,
                              [&] { return run_gem(medium, pulse, slope, t_flip, t_end); });
    auto afs_job = std::async(std::launch::async,
                              [&] { return run(medium, pulse, afs_schedule, t_end); });
    const SimulationTrace g = gem_job.get();
    const SimulationTrace a = afs_job.get();

    ComparisonResult r;
    r.dt = g.dt;
    r.gem_output = g.boundary_out;
    r.afs_output = a.boundary_out;
    r.warnings = g.warnings;
    if (pulse.z0 > 0.1 * medium.length) {
        r.warnings.push_back({"gem.regime",
                              "z0 exceeds 0.1 L; the retarded-frame mapping between protocols is "
                              "approximate"});
    }

    const double t_cut = std::min(t_flip, g.end_time());
    r.gem_efficiency = metrics::efficiency(g, t_cut);
    r.afs_efficiency = metrics::efficiency(a, t_cut);
    r.gem_pre_flip_fraction = metrics::transmitted_fraction(g, t_cut);

    // Centroids over the post-flip window.
    std::size_t k0 = 0;
    while (k0 < g.steps() && g.sample_time(k0) < t_cut) ++k0;
    const std::span<const cplx> gp(g.boundary_out.data() + k0, g.steps() - k0);
    const std::span<const cplx> ap(a.boundary_out.data() + k0, a.steps() - k0);
    const double t0 = k0 < g.steps() ? g.sample_time(k0) : g.end_time();
    const double cg = metrics::centroid_time(gp, t0, g.dt);
    const double ca = metrics::centroid_time(ap, t0, a.dt);
    r.centroid_shift = ca - cg;

    const auto ga = magnitudes(r.gem_output);
    const auto aa = magnitudes(r.afs_output);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < ga.size(); ++k) {
        const double t = (static_cast<double>(k) + 0.5) * g.dt;
        const double d = sample(aa, a.dt, t + r.centroid_shift) - ga[k];
        num += d * d;
        den += ga[k] * ga[k];
    }
    r.rel_l2_discrepancy = den > 0 ? std::sqrt(num / den) : (num > 0 ? 1.0 : 0.0);
    return r;
}

}  // namespace afs::gem
