#pragma once

// Run configuration, JSON serialization and the command-line entry point.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "afs/core.hpp"
#include "afs/metrics.hpp"
#include "afs/polariton.hpp"
#include "afs/solver.hpp"

namespace afs::cli {

enum class InitialState { pulse, psi, phi };

struct Outputs {
    std::optional<std::string> snapshots_csv;
    std::optional<std::string> boundary_csv;
    std::optional<std::string> summary_json;
    std::optional<std::string> polariton_csv;
};

struct RunConfig {
    MediumConfig medium;
    PulseSpec pulse;
    DetuningSchedule schedule;
    double t_end = 1.0;
    int snapshot_stride = 0;
    /// Pulse envelope loaded as the field (default) or as a single polariton branch.
    InitialState initial = InitialState::pulse;
    /// Defaults to the start of the last piecewise segment, the flip time of a
    /// gradient, or 0 otherwise.
    std::optional<double> retrieval_start;
    /// Time at which stored_fraction_at_hold is sampled; defaults to retrieval_start.
    std::optional<double> hold_time;
    Outputs outputs;

    double effective_retrieval_start() const;
    double effective_hold_time() const;
    /// Sub-config validation plus distinct output paths.
    void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Throws ConfigError with a dotted field path on malformed input.
RunConfig from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Initial state implied by cfg.initial.
FieldState make_initial_state(const RunConfig& cfg);
SimulationTrace execute(const RunConfig& cfg);

struct RunSummary {
    metrics::MemoryFigures figures;
    polariton::ConditionReport conditions;
    std::vector<Warning> warnings;
};

RunSummary summarize(const RunConfig& cfg, const SimulationTrace& trace);
nlohmann::json summary_json(const RunConfig& cfg, const RunSummary& s);

void write_boundary_csv(const std::string& path, const SimulationTrace& trace);
void write_snapshots_csv(const std::string& path, const SimulationTrace& trace);
/// Decomposition of the final state; no-op for spatial schedules.
void write_polariton_csv(const std::string& path, const RunConfig& cfg, const SimulationTrace& trace);

/// Fixed-precision, locale-independent number formatting used by every CSV.
std::string fmt(double v);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;

int main(int argc, const char* const* argv);

}  // namespace afs::cli
