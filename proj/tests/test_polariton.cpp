#include <doctest.h>

#include <cmath>

#include "afs/polariton.hpp"
#include "afs/presets.hpp"
#include "helpers.hpp"

using namespace afs;
using namespace afs::polariton;
using testing::rel;

TEST_CASE("mixing angle examples") {
    const double beta = 2.5;
    CHECK(std::abs(mixing_angle(0.0, 0.0, beta) - kPi / 4) < 1e-15);
    // cos 2theta = 10 / sqrt(104).
    const double oracle = 0.5 * std::acos(10.0 / std::sqrt(104.0));
    CHECK(std::abs(mixing_angle(0.0, -10 * beta, beta) - oracle) < 1e-14);
    CHECK(mixing_angle(0.0, -10 * beta, beta) == doctest::Approx(0.0987).epsilon(1e-3));
    CHECK(std::abs(mixing_angle(0.0, 10 * beta, beta) - (kPi / 2 - oracle)) < 1e-14);
    CHECK_THROWS_AS(mixing_angle(0.0, 1.0, 0.0), DegenerateCoupling);
}

TEST_CASE("mixing angle depends on ck + delta only") {
    CHECK(mixing_angle(3.0, -1.0, 1.0) == mixing_angle(0.0, 2.0, 1.0));
    CHECK(mixing_angle(1.0, 0.0, 1.0, 2.0) == mixing_angle(0.0, 2.0, 1.0));
}

TEST_CASE("eigenvalue examples") {
    const auto e = eigenvalues(kPi / 4, 3.0);
    CHECK(e.lambda1 == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(e.lambda2 == doctest::Approx(-3.0).epsilon(1e-15));
    const auto s = eigenvalues(1e-9, 1.0);
    CHECK(s.lambda1 > 1e8);
    CHECK(s.lambda2 < 0.0);
    CHECK(s.lambda2 > -1e-8);
    const auto f = eigenvalues(0.0987, 1.0);
    CHECK(f.lambda1 == doctest::Approx(10.099).epsilon(1e-3));
    CHECK(f.lambda2 == doctest::Approx(-0.09902).epsilon(1e-3));
    CHECK(rel(f.lambda1 * f.lambda2, -1.0) < 1e-12);
    CHECK_THROWS_AS(eigenvalues(0.0, 1.0), PoleError);
    CHECK_THROWS_AS(eigenvalues(kPi / 2, 1.0), PoleError);
}

TEST_CASE("group velocity examples") {
    const auto a = group_velocities(kPi / 4, 1.0);
    CHECK(a.psi == doctest::Approx(0.5));
    CHECK(a.phi == doctest::Approx(0.5));
    const auto b = group_velocities(kPi / 2, 1.0);
    CHECK(std::abs(b.psi) < 1e-15);
    CHECK(b.phi == doctest::Approx(1.0));
    const auto c = group_velocities(0.0987, 1.0);
    CHECK(c.psi == doctest::Approx(0.99029).epsilon(1e-4));
    CHECK(c.phi == doctest::Approx(0.00971).epsilon(1e-2));
}

TEST_CASE("theta_dot examples") {
    const double beta = 4.0;
    CHECK(theta_dot(0.4 * beta * beta, beta, kPi / 4) == doctest::Approx(-0.1 * beta));
    CHECK(theta_dot(5.0, beta, 0.0) == 0.0);
    CHECK(theta_dot(0.0, beta, 0.7) == 0.0);
}

namespace {

FieldState gaussian_field(const MediumConfig& m, double z0, double center) {
    FieldState s = FieldState::zeros(m);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double u = (s.cell_center(k) - center) / z0;
        s.e_field[k] = std::exp(-u * u);
    }
    return s;
}

}  // namespace

TEST_CASE("decompose: pure field state splits by sin^2 theta(0)") {
    const double z0 = 0.05;
    const auto m = testing::medium(10.0 / z0 * 10.0, 0.0, 512);  // beta = 100 bandwidths
    const auto s = gaussian_field(m, z0, 0.5);
    const auto f = decompose(s, -10 * m.beta, m);
    const double frac = f.phi_energy() / (f.psi_energy() + f.phi_energy());
    const double th = mixing_angle(0.0, -10 * m.beta, m.beta);
    CHECK(std::abs(frac - std::sin(th) * std::sin(th)) < 5e-4);
    CHECK(std::abs(frac - 0.0097) < 5e-4);
}

TEST_CASE("decompose: pure coherence at large positive detuning is Psi") {
    const auto m = testing::medium(5.0, 0.0, 256);
    FieldState s = FieldState::zeros(m);
    auto g = testing::rng(30);
    for (auto& c : s.coherence) c = {testing::uniform(g, -1, 1), testing::uniform(g, -1, 1)};
    const auto f = decompose(s, 1e7, m);
    CHECK(f.psi_energy() / (f.psi_energy() + f.phi_energy()) > 1.0 - 1e-6);
}

TEST_CASE("decompose: Parseval and pointwise orthogonality") {
    const auto m = testing::medium(3.0, 0.0, 128);
    FieldState s = FieldState::zeros(m);
    auto g = testing::rng(31);
    for (std::size_t k = 0; k < s.size(); ++k) {
        s.e_field[k] = {testing::uniform(g, -1, 1), testing::uniform(g, -1, 1)};
        s.coherence[k] = {testing::uniform(g, -1, 1), testing::uniform(g, -1, 1)};
    }
    const auto f = decompose(s, 1.7, m);
    double direct = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) direct += std::norm(s.e_field[k]) + std::norm(s.coherence[k]);
    CHECK(rel(f.psi_energy() + f.phi_energy(), direct) < 1e-10);
    for (std::size_t i = 0; i < f.k_grid.size(); ++i) {
        const double a = std::norm(f.psi[i]) + std::norm(f.phi[i]);
        const double b = std::norm(f.e_k[i]) + std::norm(f.sigma_k[i]);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(b, 1e-300));
    }
}

TEST_CASE("decompose: transform agrees with a direct DFT, k ordered negative to positive") {
    const auto m = testing::medium(2.0, 0.0, 16);
    FieldState s = FieldState::zeros(m);
    auto g = testing::rng(32);
    for (auto& e : s.e_field) e = {testing::uniform(g, -1, 1), testing::uniform(g, -1, 1)};
    const auto f = decompose(s, 0.0, m);
    const std::size_t n_pad = s.size() * kPadFactor;
    REQUIRE(f.k_grid.size() == n_pad);
    std::vector<cplx> padded(n_pad);
    std::copy(s.e_field.begin(), s.e_field.end(), padded.begin());
    const auto ref = testing::naive_dft(padded);
    const double l_pad = n_pad * s.dz;
    for (std::size_t i = 0; i < n_pad; ++i) {
        const long mi = static_cast<long>(i) - static_cast<long>(n_pad / 2);
        CHECK(f.k_grid[i] == doctest::Approx(2 * kPi * mi / l_pad));
        const std::size_t bin = static_cast<std::size_t>((mi + static_cast<long>(n_pad)) % static_cast<long>(n_pad));
        CHECK(std::abs(f.e_k[i] - ref[bin]) < 1e-12);
    }
    for (std::size_t i = 1; i < n_pad; ++i) CHECK(f.k_grid[i] > f.k_grid[i - 1]);
}

TEST_CASE("decompose rejects gradient schedules") {
    const auto m = testing::medium(2.0, 0.0, 32);
    CHECK_THROWS_AS(decompose(FieldState::zeros(m), SpatialGradient{1.0, 0.5, 1.0}, m),
                    UnsupportedSchedule);
    CHECK_NOTHROW(decompose(FieldState::zeros(m), ConstantDetuning{1.0}, m));
}

TEST_CASE("compose builds a single-branch state") {
    const double z0 = 0.05;
    const auto m = testing::medium(30.0 / z0, 0.0, 1024);
    std::vector<cplx> env(m.n_cells);
    for (std::size_t k = 0; k < env.size(); ++k) {
        const double u = ((k + 0.5) * m.dz() - 0.4) / z0;
        env[k] = std::exp(-u * u);
    }
    for (double r : {-3.0, 0.0, 2.0}) {
        const auto psi = compose(env, r * m.beta, Branch::psi, m);
        const auto f = decompose(psi, r * m.beta, m);
        CHECK(f.phi_energy() / f.psi_energy() < 1e-10);
        const auto phi = compose(env, r * m.beta, Branch::phi, m);
        const auto h = decompose(phi, r * m.beta, m);
        CHECK(h.psi_energy() / h.phi_energy() < 1e-10);
    }
}

TEST_CASE("adiabaticity margin") {
    const double beta = 3.0;
    CHECK(adiabaticity_margin(ConstantDetuning{-5.0}, beta, 0.0, 1.0) == 0.0);
    // Linear sweep through resonance: the ratio peaks at theta = pi/6 and pi/3,
    // where it is (3 sqrt 3 / 4) |rate| / (4 beta^2); at theta = pi/4 it is |rate| / (4 beta^2).
    const double rate = 0.4 * beta * beta;
    const DetuningSchedule s = LinearSweep{-50 * beta, 50 * beta, 0.0, 100 * beta / rate};
    const double m = adiabaticity_margin(s, beta, 0.0, 100 * beta / rate);
    CHECK(m == doctest::Approx(3 * std::sqrt(3.0) / 4 * 0.1).epsilon(1e-9));
    // Independent oracle: very dense direct sampling of the defining ratio.
    double best = 0.0;
    const int n = 400000;
    for (int i = 0; i <= n; ++i) {
        const double d = -50 * beta + 100 * beta * i / n;
        const double th = 0.5 * std::atan2(2 * beta, -d);
        const double td = std::abs(rate / (4 * beta) * std::pow(std::sin(2 * th), 2));
        const double lmin = std::min(beta / std::tan(th), beta * std::tan(th));
        best = std::max(best, td / lmin);
    }
    CHECK(m == doctest::Approx(best).epsilon(1e-8));
    // Window that avoids the peak.
    const double t_res = 50 * beta / rate;
    const double half = adiabaticity_margin(s, beta, t_res - 1e-9, t_res + 1e-9);
    CHECK(half == doctest::Approx(rate / (4 * beta * beta)).epsilon(1e-6));
}

TEST_CASE("condition report verdicts") {
    const auto f2 = presets::fig2();
    const auto r = condition_report(f2.medium, f2.pulse, f2.schedule, f2.t_end);
    CHECK(r.detuning.ratio == doctest::Approx(1.0 / 50));
    CHECK(r.dispersion.ratio == doctest::Approx(1.0 / 30));
    CHECK(r.adiabaticity.ratio == doctest::Approx(3 * std::sqrt(3.0) / 4 * 0.1).epsilon(1e-6));
    CHECK(r.all_pass());

    const auto s5 = presets::s5_member(-0.1);
    const auto r5 = condition_report(s5.medium, s5.pulse, s5.schedule, s5.t_end);
    CHECK(r5.detuning.ratio == doctest::Approx(10.0));
    CHECK(r5.detuning.verdict == Verdict::fail);

    const auto s7 = presets::s7_member(4.0);
    const auto r7 = condition_report(s7.medium, s7.pulse, s7.schedule, s7.t_end);
    CHECK(r7.dispersion.ratio == doctest::Approx(0.25));
    CHECK(r7.dispersion.verdict == Verdict::warn);

    CHECK(classify(0.19) == Verdict::pass);
    CHECK(classify(0.2) == Verdict::warn);
    CHECK(classify(0.5) == Verdict::fail);
}
