#pragma once

#include <mutex>

namespace afs::detail {

// FFTW planner calls are not thread-safe; execution is.
std::mutex& fftw_planner_mutex();

}  // namespace afs::detail
