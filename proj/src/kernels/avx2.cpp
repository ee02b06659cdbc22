// Built with -mavx2 -mfma; only reached after a cpuid check.

#include <immintrin.h>

#include "afs/kernels.hpp"

namespace afs::kernels::avx2 {

namespace {

// Two interleaved complex doubles per register: [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// (a + ib) * v with a, b broadcast.
inline __m256d mul_bcast(__m256d re, __m256d im, __m256d v) {
    const __m256d swapped = _mm256_permute_pd(v, 0b0101);
    return _mm256_fmaddsub_pd(re, v, _mm256_mul_pd(im, swapped));
}

// Lane-wise complex product of two packed pairs.
inline __m256d mul_packed(__m256d a, __m256d v) {
    const __m256d are = _mm256_movedup_pd(a);
    const __m256d aim = _mm256_permute_pd(a, 0b1111);
    return mul_bcast(are, aim, v);
}

inline cplx mul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void apply_uniform(const Mat2& m, std::span<cplx> e, std::span<cplx> s) {
    const std::size_t n = e.size();
    const __m256d r00 = _mm256_set1_pd(m.m00.real()), i00 = _mm256_set1_pd(m.m00.imag());
    const __m256d r01 = _mm256_set1_pd(m.m01.real()), i01 = _mm256_set1_pd(m.m01.imag());
    const __m256d r10 = _mm256_set1_pd(m.m10.real()), i10 = _mm256_set1_pd(m.m10.imag());
    const __m256d r11 = _mm256_set1_pd(m.m11.real()), i11 = _mm256_set1_pd(m.m11.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d ev = load2(&e[i]);
        const __m256d sv = load2(&s[i]);
        store2(&e[i], _mm256_add_pd(mul_bcast(r00, i00, ev), mul_bcast(r01, i01, sv)));
        store2(&s[i], _mm256_add_pd(mul_bcast(r10, i10, ev), mul_bcast(r11, i11, sv)));
    }
    for (; i < n; ++i) {
        const cplx ei = e[i], si = s[i];
        e[i] = mul(m.m00, ei) + mul(m.m01, si);
        s[i] = mul(m.m10, ei) + mul(m.m11, si);
    }
}

void apply_cellwise(const Mat2Field& m, std::span<cplx> e, std::span<cplx> s) {
    const std::size_t n = e.size();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d ev = load2(&e[i]);
        const __m256d sv = load2(&s[i]);
        const __m256d a00 = load2(&m.m00[i]), a01 = load2(&m.m01[i]);
        const __m256d a10 = load2(&m.m10[i]), a11 = load2(&m.m11[i]);
        store2(&e[i], _mm256_add_pd(mul_packed(a00, ev), mul_packed(a01, sv)));
        store2(&s[i], _mm256_add_pd(mul_packed(a10, ev), mul_packed(a11, sv)));
    }
    for (; i < n; ++i) {
        const cplx ei = e[i], si = s[i];
        e[i] = mul(m.m00[i], ei) + mul(m.m01[i], si);
        s[i] = mul(m.m10[i], ei) + mul(m.m11[i], si);
    }
}

NormPair norms(std::span<const cplx> e, std::span<const cplx> s) {
    const std::size_t n = e.size();
    __m256d acc_e = _mm256_setzero_pd();
    __m256d acc_s = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d ev = load2(&e[i]);
        const __m256d sv = load2(&s[i]);
        acc_e = _mm256_fmadd_pd(ev, ev, acc_e);
        acc_s = _mm256_fmadd_pd(sv, sv, acc_s);
    }
    NormPair out{hsum(acc_e), hsum(acc_s)};
    for (; i < n; ++i) {
        out.field += std::norm(e[i]);
        out.coherence += std::norm(s[i]);
    }
    return out;
}

}  // namespace afs::kernels::avx2
