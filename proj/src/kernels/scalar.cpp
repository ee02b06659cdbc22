#include "afs/kernels.hpp"

namespace afs::kernels::scalar {

namespace {
// Explicit real arithmetic: std::complex operator* carries inf/nan recovery
// branches that block vectorization and differ from the SIMD lanes.
inline cplx mul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}
}  // namespace

void apply_uniform(const Mat2& m, std::span<cplx> e, std::span<cplx> s) {
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ei = e[i];
        const cplx si = s[i];
        e[i] = mul(m.m00, ei) + mul(m.m01, si);
        s[i] = mul(m.m10, ei) + mul(m.m11, si);
    }
}

void apply_cellwise(const Mat2Field& m, std::span<cplx> e, std::span<cplx> s) {
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ei = e[i];
        const cplx si = s[i];
        e[i] = mul(m.m00[i], ei) + mul(m.m01[i], si);
        s[i] = mul(m.m10[i], ei) + mul(m.m11[i], si);
    }
}

NormPair norms(std::span<const cplx> e, std::span<const cplx> s) {
    NormPair out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        out.field += e[i].real() * e[i].real() + e[i].imag() * e[i].imag();
        out.coherence += s[i].real() * s[i].real() + s[i].imag() * s[i].imag();
    }
    return out;
}

}  // namespace afs::kernels::scalar
