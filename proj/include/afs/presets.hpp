#pragma once

// Figure presets in internal units. Every rate is tied to the pulse bandwidth
// through delta_omega(), so changing that one convention rescales all presets.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "afs/cli.hpp"
#include "afs/gem.hpp"

namespace afs::presets {

class UnknownPreset : public ConfigError {
public:
    explicit UnknownPreset(const std::string& name);
};

/// Delta omega := c / z0.
double delta_omega(double z0, double c = 1.0);

const std::vector<std::string>& names();

/// Sweep -delta0 -> +delta0 -> -delta0 with a plateau in between.
struct StorageParams {
    int n_cells = 4096;
    double z0 = 0.05;
    double beta_over_dw = 10.0;
    double delta0_over_beta = -10.0;
    double rate_over_beta2 = 0.3;  // |d Delta / dt| during the ramps
    double ramp_time = 0.0;        // overrides rate_over_beta2 when > 0
    double hold = 2.0;
    double center = 0.2;
    double gamma = 0.0;
    double tail = 1.2;  // simulated time after the reverse ramp ends
};
cli::RunConfig storage_run(const StorageParams& p);

cli::RunConfig fig2();

std::vector<double> fig3_ratios();
cli::RunConfig fig3_member(double delta_over_beta);

std::vector<double> fig4_depths();
inline constexpr double kFig4GammaA = 5e-2;  // in units of delta omega
inline constexpr double kFig4GammaB = 2e-3;
cli::RunConfig fig4_member(double gamma_over_dw, double depth);

std::vector<double> s5_ratios();
cli::RunConfig s5_member(double delta0_over_beta);

std::vector<double> s6_rates();
cli::RunConfig s6_member(double rate_over_beta2);

std::vector<double> s7_couplings();
cli::RunConfig s7_member(double beta_over_dw);

struct GemSetup {
    MediumConfig medium;
    PulseSpec pulse;
    double slope = 0.0;
    double t_flip = 1.6;
    double t_end = 4.0;
};
/// Short-pulse comparison; the gradient defaults to 0.1 beta^2 per unit length.
GemSetup s8(double z0 = 0.05);

/// Runs every member, writing per-run CSVs and `<name>.csv` into out_dir.
/// Throws UnknownPreset.
void run_preset(const std::string& name, const std::string& out_dir, int jobs, std::ostream& log);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace afs::presets
