#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "afs/core.hpp"
#include "afs/solver.hpp"

namespace testing {

using afs::cplx;

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed1234abcdULL + salt); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// X_m = n^{-1/2} sum_j x_j exp(+2 pi i j m / n), written out directly.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc{};
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = 2.0 * M_PI * static_cast<double>((j * m) % n) / static_cast<double>(n);
            acc += x[j] * cplx(std::cos(ph), std::sin(ph));
        }
        out[m] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

inline afs::MediumConfig medium(double beta, double gamma, int n) {
    afs::MediumConfig m;
    m.beta = beta;
    m.gamma = gamma;
    m.n_cells = n;
    return m;
}

inline afs::PulseSpec pulse(double z0, double center, cplx amp = {1.0, 0.0}) {
    afs::PulseSpec p;
    p.z0 = z0;
    p.center = center;
    p.amplitude = amp;
    return p;
}

}  // namespace testing
