#include "afs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace afs {

FieldState FieldState::zeros(const MediumConfig& medium) {
    FieldState s;
    s.dz = medium.dz();
    s.e_field.assign(static_cast<std::size_t>(medium.n_cells), cplx{});
    s.coherence.assign(static_cast<std::size_t>(medium.n_cells), cplx{});
    return s;
}

double total_excitation(const FieldState& state) {
    const auto n = kernels::norms(state.e_field, state.coherence);
    return (n.field + n.coherence) * state.dz;
}

double field_energy(const FieldState& state) {
    return kernels::norms(state.e_field, state.coherence).field * state.dz;
}

// ---------------------------------------------------------------------------

kernels::Mat2 local_propagator(double beta, double delta, double gamma, double dt) {
    // A = m I + (A - m I), (A - m I)^2 = q^2 I, so
    // exp(A dt) = e^{m dt} [cosh(q dt) I + dt sinhc(q dt) (A - m I)].
    const cplx a00{0.0, 0.0};
    const cplx a01{0.0, beta};
    const cplx a10{0.0, beta};
    const cplx a11{-gamma, -delta};
    const cplx m = 0.5 * (a00 + a11);
    const cplx h = 0.5 * (a00 - a11);
    const cplx q = std::sqrt(h * h + a01 * a10);
    const cplx x = q * dt;

    cplx ch, shc;  // cosh(x), sinh(x)/x
    if (std::abs(x) < 1e-4) {
        const cplx x2 = x * x;
        ch = 1.0 + x2 / 2.0 + x2 * x2 / 24.0 + x2 * x2 * x2 / 720.0;
        shc = 1.0 + x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0;
    } else {
        ch = std::cosh(x);
        shc = std::sinh(x) / x;
    }
    const cplx scale = std::exp(m * dt);
    const cplx k = scale * dt * shc;
    kernels::Mat2 out;
    out.m00 = scale * ch + k * h;
    out.m01 = k * a01;
    out.m10 = k * a10;
    out.m11 = scale * ch - k * h;
    return out;
}

std::vector<Warning> resolution_warnings(const MediumConfig& medium, const PulseSpec* pulse,
                                         const DetuningSchedule& schedule) {
    std::vector<Warning> out;
    const double dz = medium.dz();
    const double dt = medium.dt();
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };
    if (pulse && dz > pulse->z0 / 20.0) {
        out.push_back({"resolution.dz",
                       "dz = " + fmt(dz) + " exceeds z0/20 = " + fmt(pulse->z0 / 20.0)});
    }
    if (medium.beta * dt > 0.2) {
        out.push_back({"resolution.dt",
                       "beta*dt = " + fmt(medium.beta * dt) + " exceeds 0.2"});
    }
    if (const auto* g = std::get_if<SpatialGradient>(&schedule.variant())) {
        const double phase = std::abs(g->slope) * g->flip_time * dz;
        if (phase > kPi) {
            out.push_back({"resolution.gradient_aliasing",
                           "|slope|*t_flip*dz = " + fmt(phase) +
                               " exceeds pi; dephased coherence aliases on the grid"});
        }
    }
    return out;
}

FieldState initial_state(const MediumConfig& medium, const PulseSpec& pulse) {
    FieldState s = FieldState::zeros(medium);
    if (pulse.injection == Injection::in_medium) {
        for (std::size_t k = 0; k < s.size(); ++k) s.e_field[k] = pulse.profile(s.cell_center(k) - pulse.center);
    }
    return s;
}

// ---------------------------------------------------------------------------

Stepper::Stepper(MediumConfig medium, DetuningSchedule schedule, FieldState state)
    : medium_(std::move(medium)),
      schedule_(std::move(schedule)),
      state_(std::move(state)),
      dt_(medium_.dt()),
      t_origin_(state_.t) {
    if (state_.size() != static_cast<std::size_t>(medium_.n_cells) ||
        state_.coherence.size() != state_.size())
        throw ConfigError("state", "array length does not match medium.n_cells");
    if (state_.dz == 0.0) state_.dz = medium_.dz();
    if (schedule_.is_spatial()) {
        build_cellwise(dt_, false, pre_);
        build_cellwise(dt_, true, post_);
    }
}

void Stepper::build_cellwise(double duration, bool flipped, std::vector<cplx> (&out)[4]) const {
    const auto& g = std::get<SpatialGradient>(schedule_.variant());
    const std::size_t n = state_.size();
    for (auto& v : out) v.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double d = g.slope * (state_.cell_center(k) - g.pivot);
        if (flipped) d = -d;
        const auto m = local_propagator(medium_.beta, d, medium_.gamma, duration);
        out[0][k] = m.m00;
        out[1][k] = m.m01;
        out[2][k] = m.m10;
        out[3][k] = m.m11;
    }
}

void Stepper::react(double t0, double duration, bool flipped, bool cached) {
    if (!schedule_.is_spatial()) {
        const double delta = schedule_.eval(t0 + 0.5 * duration, 0.5 * medium_.length);
        const auto m = local_propagator(medium_.beta, delta, medium_.gamma, duration);
        kernels::apply_uniform(m, state_.e_field, state_.coherence);
        return;
    }
    std::vector<cplx>(*src)[4] = nullptr;
    if (cached) {
        src = flipped ? &post_ : &pre_;
    } else {
        build_cellwise(duration, flipped, scratch_);
        src = &scratch_;
    }
    const kernels::Mat2Field f{(*src)[0], (*src)[1], (*src)[2], (*src)[3]};
    kernels::apply_cellwise(f, state_.e_field, state_.coherence);
}

cplx Stepper::advance(cplx source) {
    auto& e = state_.e_field;
    const cplx out = e.back();
    std::move_backward(e.begin(), e.end() - 1, e.end());
    e.front() = source;

    const double t0 = t_origin_ + static_cast<double>(step_) * dt_;
    const double t1 = t0 + dt_;
    if (const auto* g = std::get_if<SpatialGradient>(&schedule_.variant())) {
        const double flip = g->flip_time;
        if (t1 <= flip) {
            react(t0, dt_, false, true);
        } else if (t0 >= flip) {
            react(t0, dt_, true, true);
        } else {
            // The flip lands inside this step: split the reaction.
            react(t0, flip - t0, false, false);
            react(flip, t1 - flip, true, false);
        }
    } else {
        react(t0, dt_, false, true);
    }
    ++step_;
    state_.t = t_origin_ + static_cast<double>(step_) * dt_;
    return out;
}

StepOutcome step(const FieldState& state, const MediumConfig& medium,
                 const DetuningSchedule& schedule, double dt, cplx source) {
    if (std::abs(dt - medium.dt()) > 1e-12 * medium.dt())
        throw DomainError("step: dt must equal dz/c");
    Stepper s(medium, schedule, state);
    const cplx out = s.advance(source);
    if (!std::isfinite(total_excitation(s.state()))) throw NumericalBlowup(0);
    return {s.state(), out};
}

// ---------------------------------------------------------------------------

namespace {

SimulationTrace integrate(const MediumConfig& medium, FieldState initial,
                          const DetuningSchedule& schedule, double t_end, int stride,
                          const PulseSpec* pulse) {
    medium.validate();
    schedule.validate();
    if (!(t_end > 0)) throw ConfigError("t_end", "must be positive");

    SimulationTrace trace;
    trace.medium = medium;
    if (pulse) trace.pulse = *pulse;
    trace.dt = medium.dt();
    trace.warnings = resolution_warnings(medium, pulse, schedule);

    const double dt = trace.dt;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const bool driven = pulse && pulse->injection == Injection::boundary_driven;

    trace.boundary_out.reserve(steps);
    trace.schedule_log.reserve(steps);
    trace.energy_log.reserve(steps);
    if (driven) trace.boundary_in.reserve(steps);

    trace.initial_energy = total_excitation(initial);
    trace.snapshots.push_back({initial.t, initial});

    Stepper stepper(medium, schedule, std::move(initial));
    const double t_origin = stepper.time();
    trace.t_origin = t_origin;
    double cum_out = 0.0;
    double cum_in = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = t_origin + (static_cast<double>(k) + 0.5) * dt;
        cplx src{};
        if (driven) {
            src = pulse->profile(medium.c * t_mid - pulse->center);
            trace.boundary_in.push_back(src);
            cum_in += medium.c * std::norm(src) * dt;
        }
        trace.schedule_log.push_back(schedule.eval(t_mid, 0.5 * medium.length));
        const cplx out = stepper.advance(src);
        trace.boundary_out.push_back(out);
        cum_out += medium.c * std::norm(out) * dt;

        const auto& st = stepper.state();
        const auto n = kernels::norms(st.e_field, st.coherence);
        const double total = (n.field + n.coherence) * st.dz;
        if (!std::isfinite(total)) throw NumericalBlowup(k);
        trace.energy_log.push_back({st.t, total, n.field * st.dz, cum_out, cum_in});

        const bool last = k + 1 == steps;
        if (last || (stride > 0 && (k + 1) % static_cast<std::size_t>(stride) == 0))
            trace.snapshots.push_back({st.t, st});
    }
    return trace;
}

}  // namespace

SimulationTrace run(const MediumConfig& medium, const PulseSpec& pulse,
                    const DetuningSchedule& schedule, double t_end, int snapshot_stride) {
    medium.validate();
    pulse.validate(medium);
    return integrate(medium, initial_state(medium, pulse), schedule, t_end, snapshot_stride, &pulse);
}

SimulationTrace run_from_state(const MediumConfig& medium, FieldState initial,
                               const DetuningSchedule& schedule, double t_end,
                               int snapshot_stride) {
    return integrate(medium, std::move(initial), schedule, t_end, snapshot_stride, nullptr);
}

}  // namespace afs
