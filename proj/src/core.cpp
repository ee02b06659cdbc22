#include "afs/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace afs {

MediumConfig MediumConfig::from_atoms(double g_single, double n_atoms, double gamma, int n_cells) {
    MediumConfig m;
    m.g_single = g_single;
    m.n_atoms = n_atoms;
    m.beta = g_single * std::sqrt(n_atoms);
    m.gamma = gamma;
    m.n_cells = n_cells;
    return m;
}

void MediumConfig::validate() const {
    if (!std::isfinite(beta) || beta < 0) throw ConfigError("medium.beta", "must be finite and >= 0");
    if (!std::isfinite(gamma) || gamma < 0) throw ConfigError("medium.gamma", "must be finite and >= 0");
    if (!(c > 0) || !std::isfinite(c)) throw ConfigError("medium.c", "must be positive");
    if (!(length > 0) || !std::isfinite(length)) throw ConfigError("medium.length", "must be positive");
    if (n_cells < 16) throw ConfigError("medium.n_cells", "must be >= 16");
    if (g_single.has_value() != n_atoms.has_value())
        throw ConfigError("medium.g_single", "g_single and n_atoms must be given together");
    if (g_single) {
        if (*n_atoms < 0) throw ConfigError("medium.n_atoms", "must be >= 0");
        const double derived = *g_single * std::sqrt(*n_atoms);
        const double scale = std::max(std::abs(derived), 1e-300);
        if (std::abs(derived - beta) > 1e-12 * scale)
            throw ConfigError("medium.beta", "inconsistent with g_single*sqrt(n_atoms)");
    }
}

double optical_depth(const MediumConfig& medium) {
    if (medium.gamma == 0.0) return std::numeric_limits<double>::infinity();
    return medium.beta * medium.beta * medium.length / (medium.c * medium.gamma);
}

bool is_infinite_depth(double depth) { return std::isinf(depth) && depth > 0; }

// ---------------------------------------------------------------------------

cplx PulseSpec::profile(double x) const {
    const double u = x / z0;
    return amplitude * std::exp(-u * u);
}

void PulseSpec::validate(const MediumConfig& medium) const {
    if (!(z0 > 0) || !std::isfinite(z0)) throw ConfigError("pulse.z0", "must be positive");
    if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
        throw ConfigError("pulse.amplitude", "must be finite");
    if (!std::isfinite(center)) throw ConfigError("pulse.center", "must be finite");
    if (injection == Injection::in_medium) {
        if (!(center > 0 && center < medium.length))
            throw ConfigError("pulse.center", "must lie inside (0, L) for in_medium injection");
        // Edge intensity below 1e-6 of peak.
        const double edge = std::min(center, medium.length - center) / z0;
        if (std::exp(-2.0 * edge * edge) >= 1e-6)
            throw ConfigError("pulse.center", "pulse does not fit inside the medium");
    } else if (center < 0) {
        throw ConfigError("pulse.center", "entry delay must be >= 0 for boundary_driven injection");
    }
}

double bandwidth(const PulseSpec& pulse, double c) { return c / pulse.z0; }

double gaussian_energy(const PulseSpec& pulse) {
    return std::norm(pulse.amplitude) * pulse.z0 * std::sqrt(kPi / 2.0);
}

// ---------------------------------------------------------------------------

namespace {

void check_segments(const std::vector<Segment>& segs) {
    if (segs.empty()) throw ConfigError("schedule.segments", "must not be empty");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        const std::string path = "schedule.segments[" + std::to_string(i) + "]";
        if (!std::isfinite(s.t_begin) || !std::isfinite(s.t_end) || !std::isfinite(s.delta_begin) ||
            !std::isfinite(s.delta_end))
            throw ConfigError(path, "values must be finite");
        if (s.t_begin < 0) throw ConfigError(path + ".t0", "must be >= 0");
        if (!(s.t_end > s.t_begin)) throw ConfigError(path + ".t1", "must exceed t0");
        if (i > 0 && s.t_begin < segs[i - 1].t_end)
            throw ConfigError(path + ".t0", "segments must be sorted and non-overlapping");
    }
}

struct Evaluator {
    double t;
    double z;
    double operator()(const ConstantDetuning& s) const { return s.delta; }
    double operator()(const LinearSweep& s) const {
        if (t <= s.t_start) return s.delta_start;
        if (t >= s.t_end) return s.delta_end;
        const double f = (t - s.t_start) / (s.t_end - s.t_start);
        return s.delta_start + (s.delta_end - s.delta_start) * f;
    }
    double operator()(const SpatialGradient& s) const {
        const double d = s.slope * (z - s.pivot);
        return t < s.flip_time ? d : -d;
    }
    double operator()(const PiecewiseSweep& s) const {
        const auto& segs = s.segments;
        if (t <= segs.front().t_begin) return segs.front().delta_begin;
        // Last segment starting at or before t.
        auto it = std::upper_bound(segs.begin(), segs.end(), t,
                                   [](double v, const Segment& g) { return v < g.t_begin; });
        const Segment& g = *(it - 1);
        if (t >= g.t_end) return g.delta_end;
        const double f = (t - g.t_begin) / (g.t_end - g.t_begin);
        return g.delta_begin + (g.delta_end - g.delta_begin) * f;
    }
};

}  // namespace

DetuningSchedule::DetuningSchedule(LinearSweep s) : v_(s) {}
DetuningSchedule::DetuningSchedule(PiecewiseSweep s) : v_(std::move(s)) {}

void DetuningSchedule::validate() const {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantDetuning>) {
                if (!std::isfinite(s.delta)) throw ConfigError("schedule.delta", "must be finite");
            } else if constexpr (std::is_same_v<T, LinearSweep>) {
                if (!std::isfinite(s.delta_start) || !std::isfinite(s.delta_end))
                    throw ConfigError("schedule.delta_start", "must be finite");
                if (!(s.t_end > s.t_start)) throw ConfigError("schedule.t_end", "must exceed t_start");
                if (s.t_start < 0) throw ConfigError("schedule.t_start", "must be >= 0");
            } else if constexpr (std::is_same_v<T, SpatialGradient>) {
                if (!std::isfinite(s.slope)) throw ConfigError("schedule.slope", "must be finite");
                if (!std::isfinite(s.pivot)) throw ConfigError("schedule.pivot", "must be finite");
                if (!(s.flip_time >= 0)) throw ConfigError("schedule.flip_time", "must be >= 0");
            } else {
                check_segments(s.segments);
            }
        },
        v_);
}

double DetuningSchedule::eval(double t, double z) const { return std::visit(Evaluator{t, z}, v_); }

double DetuningSchedule::at(double t, double z, double length) const {
    if (!(z >= 0.0 && z <= length)) throw DomainError("detuning_at: z outside [0, L]");
    if (!(t >= 0.0)) throw DomainError("detuning_at: t must be >= 0");
    return eval(t, z);
}

double DetuningSchedule::rate_at(double t) const {
    return std::visit(
        [t](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSweep>) {
                return (t > s.t_start && t < s.t_end) ? s.rate() : 0.0;
            } else if constexpr (std::is_same_v<T, PiecewiseSweep>) {
                for (const auto& g : s.segments)
                    if (t > g.t_begin && t < g.t_end) return g.rate();
                return 0.0;
            } else {
                return 0.0;
            }
        },
        v_);
}

double DetuningSchedule::max_abs(double length) const {
    return std::visit(
        [length](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantDetuning>) {
                return std::abs(s.delta);
            } else if constexpr (std::is_same_v<T, LinearSweep>) {
                return std::max(std::abs(s.delta_start), std::abs(s.delta_end));
            } else if constexpr (std::is_same_v<T, SpatialGradient>) {
                return std::abs(s.slope) * std::max(std::abs(s.pivot), std::abs(length - s.pivot));
            } else {
                double m = 0.0;
                for (const auto& g : s.segments)
                    m = std::max({m, std::abs(g.delta_begin), std::abs(g.delta_end)});
                return m;
            }
        },
        v_);
}

std::vector<double> DetuningSchedule::breakpoints() const {
    return std::visit(
        [](const auto& s) -> std::vector<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSweep>) {
                return {s.t_start, s.t_end};
            } else if constexpr (std::is_same_v<T, SpatialGradient>) {
                return {s.flip_time};
            } else if constexpr (std::is_same_v<T, PiecewiseSweep>) {
                std::vector<double> out;
                for (const auto& g : s.segments) {
                    out.push_back(g.t_begin);
                    out.push_back(g.t_end);
                }
                return out;
            } else {
                return {};
            }
        },
        v_);
}

double DetuningSchedule::horizon() const {
    const auto b = breakpoints();
    return b.empty() ? 0.0 : *std::max_element(b.begin(), b.end());
}

DetuningSchedule DetuningSchedule::negated() const {
    return std::visit(
        [](auto s) -> DetuningSchedule {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantDetuning>) {
                s.delta = -s.delta;
            } else if constexpr (std::is_same_v<T, LinearSweep>) {
                s.delta_start = -s.delta_start;
                s.delta_end = -s.delta_end;
            } else if constexpr (std::is_same_v<T, SpatialGradient>) {
                s.slope = -s.slope;
            } else {
                for (auto& g : s.segments) {
                    g.delta_begin = -g.delta_begin;
                    g.delta_end = -g.delta_end;
                }
            }
            return DetuningSchedule(s);
        },
        v_);
}

StorageSchedule storage_retrieval_schedule(double delta_from, double delta_to, double ramp_time,
                                           double hold, double t_start) {
    if (!(ramp_time > 0)) throw ConfigError("schedule.ramp_time", "must be positive");
    if (hold < 0) throw ConfigError("schedule.hold", "must be >= 0");
    PiecewiseSweep p;
    const double a = t_start;
    const double b = a + ramp_time;
    const double c = b + hold;
    const double d = c + ramp_time;
    p.segments.push_back({a, b, delta_from, delta_to});
    p.segments.push_back({c, d, delta_to, delta_from});
    return {DetuningSchedule(std::move(p)), c, d};
}

double detuning_at(const DetuningSchedule& schedule, double t, double z, double length) {
    return schedule.at(t, z, length);
}

}  // namespace afs
