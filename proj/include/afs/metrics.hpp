#pragma once

// Figures of merit extracted from a SimulationTrace.

#include <functional>
#include <span>
#include <vector>

#include "afs/core.hpp"
#include "afs/solver.hpp"

namespace afs::metrics {

class UndefinedFidelity : public Error {
public:
    UndefinedFidelity() : Error("fidelity undefined: no output energy after retrieval start") {}
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

struct MemoryFigures {
    double efficiency = 0.0;
    double fidelity = 0.0;
    double transmitted_fraction = 0.0;
    double stored_fraction_at_hold = 0.0;
    double retrieval_delay = 0.0;
};

/// Initial total_excitation for in-medium runs, injected energy when driven.
double input_energy(const SimulationTrace& trace);

/// Output energy with sample time >= retrieval_start, over input energy.
double efficiency(const SimulationTrace& trace, double retrieval_start);
/// Output energy with sample time < retrieval_start, over input energy.
double transmitted_fraction(const SimulationTrace& trace, double retrieval_start);
/// Coherence energy over input energy at the energy sample closest to `t`.
double stored_fraction(const SimulationTrace& trace, double t);
/// Largest field_energy / total_excitation over energy samples in [t0, t1].
double max_field_fraction(const SimulationTrace& trace, double t0, double t1);
/// Output energy centroid after retrieval_start, minus retrieval_start.
double retrieval_delay(const SimulationTrace& trace, double retrieval_start);

/// Free-propagation envelope of `pulse` at z = L as a function of time.
cplx reference_at_exit(const PulseSpec& pulse, const MediumConfig& medium, double t);

/// max over tau of |sum out*(t_k) ref(t_k - tau) dt|^2 / (sum |out|^2 dt * ref_norm2),
/// with samples out[k] at t0 + k dt. The scan covers tau_guess +- tau_span and
/// refines the best bracket by golden section.
double shape_fidelity(std::span<const cplx> out, double t0, double dt,
                      const std::function<cplx(double)>& ref, double ref_norm2, double tau_guess,
                      double tau_span);

/// Shape fidelity of the retrieved output against the freely propagated input.
double fidelity(const SimulationTrace& trace, double retrieval_start, const PulseSpec& reference);

MemoryFigures memory_figures(const SimulationTrace& trace, double retrieval_start,
                             double hold_time);

/// Least-squares slope of the field-energy centroid over snapshots in [t0, t1].
double measure_group_velocity(const SimulationTrace& trace, double t0, double t1);

struct DecayFit {
    double rate = 0.0;          // energy decay rate, positive when decaying
    double rms_residual = 0.0;  // in log(energy)
    std::size_t samples = 0;
    std::vector<Warning> warnings;
};

/// Exponential fit of total_excitation over [t0, t1].
DecayFit fit_decay_rate(const SimulationTrace& trace, double t0, double t1);

/// RMS duration of |a|^2 for samples spaced by dt.
double pulse_duration(std::span<const cplx> series, double dt);
/// RMS duration of |E(L,t)|^2 for the freely propagated Gaussian input: z0 / 2c.
double input_duration(const PulseSpec& pulse, double c = 1.0);
/// Energy centroid time of samples a[k] at t0 + k dt.
double centroid_time(std::span<const cplx> series, double t0, double dt);

/// Dominant angular frequency of intensity oscillations above `min_omega`,
/// halved to give the amplitude exchange rate.
double oscillation_rate(std::span<const cplx> series, double dt, double min_omega);

}  // namespace afs::metrics
