#include <doctest.h>

#include <cmath>

#include "afs/metrics.hpp"
#include "afs/polariton.hpp"
#include "helpers.hpp"

using namespace afs;
using namespace afs::metrics;
using testing::rel;

TEST_CASE("efficiency without coupling is the free-transit fraction") {
    const auto m = testing::medium(0.0, 0.0, 1024);
    const auto p = testing::pulse(0.05, 0.4);
    const auto tr = run(m, p, ConstantDetuning{0.0}, 1.0);
    // Exit time of the centre is 0.6; energy arriving after t_r is
    // 1/2 erfc(sqrt 2 (t_r - 0.6) / z0) of the total. Cut points sit on step
    // boundaries so no sample straddles them.
    for (int k : {563, 614, 645}) {
        const double tr_start = k * m.dt();
        const double oracle = 0.5 * std::erfc(std::sqrt(2.0) * (tr_start - 0.6) / 0.05);
        CHECK(std::abs(efficiency(tr, tr_start) - oracle) < 2e-3);
        CHECK(std::abs(efficiency(tr, tr_start) + transmitted_fraction(tr, tr_start) - 1.0) < 1e-9);
    }
}

TEST_CASE("overdamped medium retrieves almost nothing") {
    const double beta = 100.0;
    const auto m = testing::medium(beta, 10 * beta, 2048);
    const auto p = testing::pulse(0.05, 0.3);
    const auto st = storage_retrieval_schedule(-10 * beta, 10 * beta, 20.0 / (0.3 * beta), 0.3);
    const auto tr = run(m, p, st.schedule, st.retrieval_end + 1.0);
    CHECK(efficiency(tr, st.retrieval_start) < 0.01);
}

TEST_CASE("efficiency errors") {
    const auto m = testing::medium(0.0, 0.0, 64);
    const auto tr = run(m, testing::pulse(0.1, 0.5), ConstantDetuning{0.0}, 0.5);
    CHECK_THROWS_AS(efficiency(tr, 0.6), DomainError);
    // Nothing reaches the exit before t = 0.3: the tail there underflows to zero.
    const auto quiet = run(testing::medium(0.0, 0.0, 256), testing::pulse(0.02, 0.2), ConstantDetuning{0.0}, 0.3);
    CHECK_THROWS_AS(fidelity(quiet, 0.25, *quiet.pulse), UndefinedFidelity);
}

TEST_CASE("shape fidelity closed forms") {
    const double dt = 1e-3;
    auto gauss = [](double w, double c) { return [=](double t) { return cplx(std::exp(-std::pow((t - c) / w, 2))); }; };
    const double w = 0.05;
    auto build = [&](double width, double center, cplx phase) {
        std::vector<cplx> v(3000);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = phase * gauss(width, center)(k * dt);
        return v;
    };
    const double ref_norm2 = w * std::sqrt(kPi / 2.0);

    // Exact shifted copy with a global phase.
    const auto same = build(w, 1.7, std::polar(1.0, 0.8));
    CHECK(shape_fidelity(same, 0.0, dt, gauss(w, 0.2), ref_norm2, 1.4, 0.3) ==
          doctest::Approx(1.0).epsilon(1e-9));

    // Gaussian overlap: F = 2 a b / (a^2 + b^2) for amplitude widths a, b.
    const auto wide2 = build(2 * w, 1.5, 1.0);
    CHECK(shape_fidelity(wide2, 0.0, dt, gauss(w, 0.5), ref_norm2, 1.0, 0.3) ==
          doctest::Approx(0.8).epsilon(1e-6));
    const auto wide_rt2 = build(std::sqrt(2.0) * w, 1.5, 1.0);
    CHECK(shape_fidelity(wide_rt2, 0.0, dt, gauss(w, 0.5), ref_norm2, 1.0, 0.3) ==
          doctest::Approx(2 * std::sqrt(2.0) / 3).epsilon(1e-6));
}

TEST_CASE("fidelity of free propagation is one") {
    const auto m = testing::medium(0.0, 0.0, 1024);
    const auto p = testing::pulse(0.05, 0.4, {0.0, 2.0});
    const auto tr = run(m, p, ConstantDetuning{0.0}, 1.0);
    CHECK(fidelity(tr, 0.0, p) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(retrieval_delay(tr, 0.0) == doctest::Approx(0.6).epsilon(1e-3));
}

TEST_CASE("group velocity measurements") {
    SUBCASE("free propagation") {
        const auto m = testing::medium(0.0, 0.0, 1024);
        const auto tr = run(m, testing::pulse(0.05, 0.3), ConstantDetuning{0.0}, 0.4, 32);
        CHECK(rel(measure_group_velocity(tr, 0.0, 0.4), 1.0) < 1e-6);
    }
    const double z0 = 0.05;
    const double beta = 30.0 / z0;
    const auto m = testing::medium(beta, 0.0, 4096);
    for (double r : {0.0, -2.0}) {
        const double delta = r * beta;
        std::vector<cplx> env(m.n_cells);
        for (std::size_t k = 0; k < env.size(); ++k) env[k] = std::exp(-std::pow(((k + 0.5) * m.dz() - 0.3) / z0, 2));
        const auto s = polariton::compose(env, delta, polariton::Branch::psi, m);
        const auto tr = run_from_state(m, s, ConstantDetuning{delta}, 0.5, 32);
        const double v = polariton::group_velocities(polariton::mixing_angle(0.0, delta, beta)).psi;
        CHECK(std::abs(measure_group_velocity(tr, 0.0, 0.5) / v - 1.0) < 0.05);
    }
}

TEST_CASE("group velocity needs three snapshots") {
    const auto m = testing::medium(0.0, 0.0, 128);
    const auto tr = run(m, testing::pulse(0.05, 0.3), ConstantDetuning{0.0}, 0.1);
    CHECK_THROWS_AS(measure_group_velocity(tr, 0.0, 0.1), InsufficientData);
}

TEST_CASE("decay fits") {
    SUBCASE("stored state after a sweep to +50 beta decays at 2 gamma sin^2 theta") {
        const double z0 = 0.05, beta = 30.0 / z0, gamma = 1.5;
        const auto m = testing::medium(beta, gamma, 2048);
        const double ramp = 100 * beta / (0.4 * beta * beta);
        const auto st = storage_retrieval_schedule(-50 * beta, 50 * beta, ramp, 0.6);
        const auto tr = run(m, testing::pulse(z0, 0.3), st.schedule, st.retrieval_start);
        const auto fit = fit_decay_rate(tr, ramp + 0.05, st.retrieval_start);
        const double th = polariton::mixing_angle(0.0, 50 * beta, beta);
        CHECK(std::abs(fit.rate / (2 * gamma * std::pow(std::sin(th), 2)) - 1.0) < 0.1);
        CHECK(fit.warnings.empty());
    }
    SUBCASE("no decay without gamma") {
        const double z0 = 0.05, beta = 30.0 / z0;
        const auto m = testing::medium(beta, 0.0, 2048);
        const double ramp = 100 * beta / (0.4 * beta * beta);
        const auto st = storage_retrieval_schedule(-50 * beta, 50 * beta, ramp, 1.2);
        const auto tr = run(m, testing::pulse(z0, 0.3), st.schedule, st.retrieval_start);
        // Light leaked during the ramp has left the medium by t = 1.05.
        CHECK(std::abs(fit_decay_rate(tr, 1.05, st.retrieval_start).rate) < 1e-8);
    }
    SUBCASE("equal mixing decays at gamma") {
        // Coherence at Delta = 0 projects equally on both branches; the field
        // then carries about half the energy, so a warning is expected.
        const auto m = testing::medium(200.0, 1.0, 2048);
        FieldState s = FieldState::zeros(m);
        for (std::size_t k = 0; k < s.size(); ++k)
            s.coherence[k] = std::exp(-std::pow((s.cell_center(k) - 0.5) / 0.05, 2));
        const auto tr = run_from_state(m, s, ConstantDetuning{0.0}, 0.2);
        const auto fit = fit_decay_rate(tr, 0.02, 0.2);
        CHECK(std::abs(fit.rate / 1.0 - 1.0) < 0.15);
        CHECK_FALSE(fit.warnings.empty());
    }
}

TEST_CASE("pulse duration and oscillation rate") {
    const double dt = 1e-3, w = 0.04;
    std::vector<cplx> g(2000);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = std::exp(-std::pow((k * dt - 1.0) / w, 2));
    CHECK(pulse_duration(g, dt) == doctest::Approx(w / 2).epsilon(1e-6));
    CHECK(centroid_time(g, 0.0, dt) == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<cplx> osc(4000);
    const double rate = 37.0;
    for (std::size_t k = 0; k < osc.size(); ++k) osc[k] = std::cos(rate * k * dt) * std::exp(-0.2 * k * dt);
    CHECK(oscillation_rate(osc, dt, 10.0) == doctest::Approx(rate).epsilon(2e-3));
}
