#pragma once

// Data-parallel inner loops of the solver. Each kernel has a scalar reference
// and an AVX2+FMA variant; the active backend is picked once from cpuid and
// can be overridden (tests pin both to check equivalence).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace afs::kernels {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix acting on (E, sigma).
struct Mat2 {
    cplx m00{1.0, 0.0}, m01{}, m10{}, m11{1.0, 0.0};
};

/// Per-cell propagators stored as four parallel arrays.
struct Mat2Field {
    std::span<const cplx> m00, m01, m10, m11;
};

enum class Backend { scalar, avx2 };

/// (e, s) <- M (e, s) for every cell.
void apply_uniform(const Mat2& m, std::span<cplx> e, std::span<cplx> s);
/// (e_i, s_i) <- M_i (e_i, s_i).
void apply_cellwise(const Mat2Field& m, std::span<cplx> e, std::span<cplx> s);
/// Sum over cells of |e|^2 (first) and |s|^2 (second).
struct NormPair {
    double field = 0.0;
    double coherence = 0.0;
};
NormPair norms(std::span<const cplx> e, std::span<const cplx> s);

Backend active_backend();
bool backend_available(Backend b);
/// Forces a backend; returns false (and changes nothing) if unavailable.
bool set_backend(Backend b);
std::string_view backend_name(Backend b);

namespace scalar {
void apply_uniform(const Mat2& m, std::span<cplx> e, std::span<cplx> s);
void apply_cellwise(const Mat2Field& m, std::span<cplx> e, std::span<cplx> s);
NormPair norms(std::span<const cplx> e, std::span<const cplx> s);
}  // namespace scalar

#if defined(AFS_HAVE_AVX2)
namespace avx2 {
void apply_uniform(const Mat2& m, std::span<cplx> e, std::span<cplx> s);
void apply_cellwise(const Mat2Field& m, std::span<cplx> e, std::span<cplx> s);
NormPair norms(std::span<const cplx> e, std::span<const cplx> s);
}  // namespace avx2
#endif

}  // namespace afs::kernels
