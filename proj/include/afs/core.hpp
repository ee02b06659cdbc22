#pragma once

// Medium, pulse and detuning-schedule types shared by every run.
//
// Internal units: c = 1 and L = 1. Rates (beta, gamma, detuning, sweep rate,
// bandwidth) are expressed in units of c/L, times in L/c.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace afs {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Semantic validation failure; `field()` is a dotted path such as "pulse.z0".
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Medium

struct MediumConfig {
    double beta = 0.0;   // collective coupling g*sqrt(N)
    double gamma = 0.0;  // polarization decay rate
    double c = 1.0;
    double length = 1.0;
    int n_cells = 1024;
    std::optional<double> g_single;
    std::optional<double> n_atoms;

    double dz() const { return length / n_cells; }
    /// One-cell advection per step.
    double dt() const { return dz() / c; }

    /// beta = g*sqrt(N) when both are given; otherwise the stored beta.
    static MediumConfig from_atoms(double g_single, double n_atoms, double gamma, int n_cells);

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// beta^2 L / (c gamma). Returns +infinity when gamma == 0.
double optical_depth(const MediumConfig& medium);
bool is_infinite_depth(double depth);

// ---------------------------------------------------------------------------
// Pulse

enum class Envelope { gaussian };
enum class Injection { in_medium, boundary_driven };

struct PulseSpec {
    Envelope envelope = Envelope::gaussian;
    double z0 = 0.1;      // 1/e half-width of exp[-(z/z0)^2]
    double center = 0.5;  // initial center (in_medium) or entry delay distance (boundary_driven)
    Injection injection = Injection::in_medium;
    cplx amplitude{1.0, 0.0};

    /// Envelope value at distance `x` from the center.
    cplx profile(double x) const;

    void validate(const MediumConfig& medium) const;
};

/// Pulse bandwidth convention: c / z0.
double bandwidth(const PulseSpec& pulse, double c = 1.0);

/// Energy of the initial in-medium envelope on the continuum, |A|^2 z0 sqrt(pi/2).
double gaussian_energy(const PulseSpec& pulse);

// ---------------------------------------------------------------------------
// Detuning schedules

struct ConstantDetuning {
    double delta = 0.0;
};

/// Holds delta_start before t_start and delta_end after t_end.
struct LinearSweep {
    double delta_start = 0.0;
    double delta_end = 0.0;
    double t_start = 0.0;
    double t_end = 1.0;

    double rate() const { return (delta_end - delta_start) / (t_end - t_start); }
};

/// Delta(z) = slope (z - pivot) before flip_time, -slope (z - pivot) after.
struct SpatialGradient {
    double slope = 0.0;
    double pivot = 0.5;
    double flip_time = 1.0;
};

struct Segment {
    double t_begin = 0.0;
    double t_end = 0.0;
    double delta_begin = 0.0;
    double delta_end = 0.0;

    double rate() const { return (delta_end - delta_begin) / (t_end - t_begin); }
};

/// Sorted, non-overlapping linear segments. Before the first segment the
/// schedule holds its start value; in gaps and after the last it holds the
/// previous end value.
struct PiecewiseSweep {
    std::vector<Segment> segments;
};

class DetuningSchedule {
public:
    using Variant = std::variant<ConstantDetuning, LinearSweep, SpatialGradient, PiecewiseSweep>;

    DetuningSchedule() : v_(ConstantDetuning{}) {}
    DetuningSchedule(ConstantDetuning s) : v_(s) {}
    DetuningSchedule(LinearSweep s);
    DetuningSchedule(SpatialGradient s) : v_(s) {}
    DetuningSchedule(PiecewiseSweep s);

    /// Delta at (t, z). Throws DomainError for z outside [0, length] or t < 0.
    double at(double t, double z, double length = 1.0) const;
    /// Unchecked evaluation for the solver's hot path.
    double eval(double t, double z) const;
    /// d(Delta)/dt for temporal variants (zero for constant and spatial).
    double rate_at(double t) const;

    bool is_spatial() const { return std::holds_alternative<SpatialGradient>(v_); }
    /// Largest |Delta| reachable over z in [0, length] for all t.
    double max_abs(double length = 1.0) const;
    /// Times at which the temporal derivative jumps (segment boundaries).
    std::vector<double> breakpoints() const;
    /// End of the last temporal feature (ramp end, flip time); 0 for constants.
    double horizon() const;

    const Variant& variant() const { return v_; }

    /// A copy with every detuning value negated.
    DetuningSchedule negated() const;

    void validate() const;

private:
    Variant v_;
};

/// Forward ramp delta_from -> delta_to starting at t_start, a plateau of
/// `hold`, then the reverse ramp back to delta_from. Returns the schedule and
/// the start time of the reverse ramp.
struct StorageSchedule {
    DetuningSchedule schedule;
    double retrieval_start = 0.0;
    double retrieval_end = 0.0;
};
StorageSchedule storage_retrieval_schedule(double delta_from, double delta_to, double ramp_time,
                                           double hold, double t_start = 0.0);

/// Convenience: evaluate with domain checks.
double detuning_at(const DetuningSchedule& schedule, double t, double z, double length = 1.0);

}  // namespace afs
