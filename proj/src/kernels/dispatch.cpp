#include <atomic>

#include "afs/kernels.hpp"

namespace afs::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(AFS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::avx2 : Backend::scalar; }

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{detect()};
    return b;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool backend_available(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    current().store(b, std::memory_order_relaxed);
    return true;
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void apply_uniform(const Mat2& m, std::span<cplx> e, std::span<cplx> s) {
#if defined(AFS_HAVE_AVX2)
    if (active_backend() == Backend::avx2) return avx2::apply_uniform(m, e, s);
#endif
    scalar::apply_uniform(m, e, s);
}

void apply_cellwise(const Mat2Field& m, std::span<cplx> e, std::span<cplx> s) {
#if defined(AFS_HAVE_AVX2)
    if (active_backend() == Backend::avx2) return avx2::apply_cellwise(m, e, s);
#endif
    scalar::apply_cellwise(m, e, s);
}

NormPair norms(std::span<const cplx> e, std::span<const cplx> s) {
#if defined(AFS_HAVE_AVX2)
    if (active_backend() == Backend::avx2) return avx2::norms(e, s);
#endif
    return scalar::norms(e, s);
}

}  // namespace afs::kernels
