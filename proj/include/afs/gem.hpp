#pragma once

// Gradient echo reference protocol and its comparison with a matched sweep.

#include <vector>

#include "afs/core.hpp"
#include "afs/solver.hpp"

namespace afs::gem {

/// Solver run under SpatialGradient{slope, L/2, t_flip}.
SimulationTrace run_gem(const MediumConfig& medium, const PulseSpec& pulse, double slope,
                        double t_flip, double t_end);

/// Time at which the free pulse centroid reaches z = L/2.
double midpoint_crossing_time(const PulseSpec& pulse, const MediumConfig& medium);

/// Temporal sweep with rate slope*c up to t_flip and -slope*c afterwards,
/// crossing zero at t_zero. Runs to `horizon` as a piecewise schedule.
/// slope == 0 gives a constant zero schedule.
DetuningSchedule matched_afs_schedule(double slope, double c, double t_flip, double t_zero,
                                      double horizon);

struct ComparisonResult {
    std::vector<cplx> afs_output;
    std::vector<cplx> gem_output;
    double dt = 0.0;
    double rel_l2_discrepancy = 0.0;  // on |E(L,t)| after centroid alignment
    double centroid_shift = 0.0;      // afs centroid minus gem centroid, post-flip window
    double afs_efficiency = 0.0;      // post-flip output over input energy
    double gem_efficiency = 0.0;
    double gem_pre_flip_fraction = 0.0;
    std::vector<Warning> warnings;
};

/// Both runs execute concurrently.
ComparisonResult compare_afs_gem(const MediumConfig& medium, const PulseSpec& pulse, double slope,
                                 double t_flip, double t_end);

}  // namespace afs::gem
