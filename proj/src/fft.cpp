#include "fft.hpp"

namespace afs::detail {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace afs::detail
