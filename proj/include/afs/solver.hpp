#pragma once

// One-dimensional Maxwell-Bloch integrator for the field envelope E(z,t) and
// the atomic coherence sigma(z,t):
//
//   d/dt sigma        = -i (Delta - i gamma) sigma + i beta E
//   (c d/dz + d/dt) E =  i beta sigma
//
// Lie splitting with dz = c dt: an exact one-cell shift of E followed by the
// exact 2x2 exponential of the local linear system in every cell.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "afs/core.hpp"
#include "afs/kernels.hpp"

namespace afs {

struct FieldState {
    double t = 0.0;
    double dz = 0.0;
    std::vector<cplx> e_field;    // cell k centred at (k + 1/2) dz
    std::vector<cplx> coherence;  // same layout

    std::size_t size() const { return e_field.size(); }
    double cell_center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dz; }

    static FieldState zeros(const MediumConfig& medium);
};

/// sum over cells of (|E|^2 + |sigma|^2) dz.
double total_excitation(const FieldState& state);
/// sum over cells of |E|^2 dz.
double field_energy(const FieldState& state);

class NumericalBlowup : public Error {
public:
    explicit NumericalBlowup(std::size_t step)
        : Error("non-finite values in state at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

struct Warning {
    std::string code;
    std::string message;
};

struct Snapshot {
    double t = 0.0;
    FieldState state;
};

struct EnergySample {
    double t = 0.0;                  // end of the step
    double total = 0.0;              // total_excitation
    double field = 0.0;              // field_energy
    double cumulative_out = 0.0;     // c * sum |E(L)|^2 dt
    double cumulative_in = 0.0;      // c * sum |E(0)|^2 dt
};

struct SimulationTrace {
    MediumConfig medium;
    std::optional<PulseSpec> pulse;
    double dt = 0.0;
    double t_origin = 0.0;
    double initial_energy = 0.0;
    std::vector<Snapshot> snapshots;
    /// One sample per step; sample k left the medium during [k dt, (k+1) dt]
    /// and is stamped at the crossing time (k + 1/2) dt.
    std::vector<cplx> boundary_out;
    /// Injected values (boundary_driven runs only), stamped like boundary_out.
    std::vector<cplx> boundary_in;
    std::vector<double> schedule_log;  // Delta(t_mid, L/2)
    std::vector<EnergySample> energy_log;
    std::vector<Warning> warnings;

    std::size_t steps() const { return boundary_out.size(); }
    double sample_time(std::size_t k) const {
        return t_origin + (static_cast<double>(k) + 0.5) * dt;
    }
    double end_time() const { return t_origin + static_cast<double>(steps()) * dt; }
    const FieldState& final_state() const { return snapshots.back().state; }
};

/// Exact exp(A dt) for A = [[0, i beta], [i beta, -i delta - gamma]].
kernels::Mat2 local_propagator(double beta, double delta, double gamma, double dt);

/// Resolution and regime checks attached to a trace rather than thrown:
/// dz <= z0/20, beta dt <= 0.2, and (spatial gradients) no aliasing of the
/// dephased coherence before the flip.
std::vector<Warning> resolution_warnings(const MediumConfig& medium, const PulseSpec* pulse,
                                         const DetuningSchedule& schedule);

/// Initial state for a pulse: the in-medium envelope, or zeros when driven.
FieldState initial_state(const MediumConfig& medium, const PulseSpec& pulse);

/// In-place integrator. Spatial-gradient propagators are cached per regime.
class Stepper {
public:
    Stepper(MediumConfig medium, DetuningSchedule schedule, FieldState state);

    /// Advances one step of dt = dz/c, injecting `source` at z = 0.
    /// Returns the value that left the medium at z = L.
    cplx advance(cplx source = {});

    const FieldState& state() const { return state_; }
    std::size_t step_index() const { return step_; }
    double time() const { return state_.t; }
    double dt() const { return dt_; }

private:
    void react(double t0, double duration, bool flipped_regime, bool cached);
    void build_cellwise(double duration, bool flipped, std::vector<cplx> (&out)[4]) const;

    MediumConfig medium_;
    DetuningSchedule schedule_;
    FieldState state_;
    double dt_;
    double t_origin_;
    std::size_t step_ = 0;
    std::vector<cplx> pre_[4];
    std::vector<cplx> post_[4];
    std::vector<cplx> scratch_[4];
};

struct StepOutcome {
    FieldState state;
    cplx outflow;
};

/// One splitting step on a copy of `state`. dt must equal dz/c.
StepOutcome step(const FieldState& state, const MediumConfig& medium,
                 const DetuningSchedule& schedule, double dt, cplx source = {});

/// snapshot_stride <= 0 keeps only the initial and final states.
SimulationTrace run(const MediumConfig& medium, const PulseSpec& pulse,
                    const DetuningSchedule& schedule, double t_end, int snapshot_stride = 0);

/// Integrates from an explicit initial state (no boundary source).
SimulationTrace run_from_state(const MediumConfig& medium, FieldState initial,
                               const DetuningSchedule& schedule, double t_end,
                               int snapshot_stride = 0);

}  // namespace afs
