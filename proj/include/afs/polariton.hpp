#pragma once

// Closed-form k-space eigenstructure of the coupled field/coherence system and
// the dark-state-like polariton decomposition of simulator states.

#include <string>
#include <utility>
#include <vector>

#include "afs/core.hpp"
#include "afs/solver.hpp"

namespace afs::polariton {

class DegenerateCoupling : public Error {
public:
    DegenerateCoupling() : Error("mixing angle undefined for beta <= 0") {}
};

class PoleError : public Error {
public:
    using Error::Error;
};

class UnsupportedSchedule : public Error {
public:
    using Error::Error;
};

/// theta in [0, pi/2] with sin 2theta = 2 beta / R and cos 2theta = -(ck + delta) / R,
/// R = sqrt(4 beta^2 + (ck + delta)^2). theta -> 0 for delta -> -inf.
double mixing_angle(double k, double delta, double beta, double c = 1.0);

struct Eigenvalues {
    double lambda1;  // beta cot(theta) > 0
    double lambda2;  // -beta tan(theta) < 0
};
/// Throws PoleError unless theta lies strictly inside (0, pi/2).
Eigenvalues eigenvalues(double theta, double beta);

struct GroupVelocities {
    double psi;  // c cos^2 theta
    double phi;  // c sin^2 theta
};
GroupVelocities group_velocities(double theta0, double c = 1.0);

/// -(delta_dot / 4 beta) sin^2(2 theta).
double theta_dot(double delta_dot, double beta, double theta);

/// k-resolved decomposition of a field state.
///
/// Transform: X(k_n) = N_pad^{-1/2} sum_j X_j exp(+i k_n z_j), z_j = j dz, on a
/// grid zero-padded to 4 N, k_n = 2 pi n / L_pad ordered from negative to
/// positive. The integrated equations rotate sigma at -Delta, while the closed
/// form angle above diagonalizes the opposite orientation; with this kernel
/// the eigenmodes of the simulated dynamics are
///   Psi = cos(theta) E - sin(theta) sigma,  Phi = sin(theta) E + cos(theta) sigma.
struct PolaritonFrame {
    std::vector<double> k_grid;
    std::vector<double> theta;
    std::vector<double> lambda1;
    std::vector<double> lambda2;
    std::vector<cplx> e_k;
    std::vector<cplx> sigma_k;
    std::vector<cplx> psi;
    std::vector<cplx> phi;
    double delta = 0.0;

    double psi_energy() const;
    double phi_energy() const;
    double field_energy() const;
    double coherence_energy() const;
};

inline constexpr int kPadFactor = 4;

PolaritonFrame decompose(const FieldState& state, double delta, const MediumConfig& medium);
/// Same, but rejects spatially varying schedules (UnsupportedSchedule).
PolaritonFrame decompose(const FieldState& state, const DetuningSchedule& schedule,
                         const MediumConfig& medium);

enum class Branch { psi, phi };

/// A state carrying only one polariton branch whose k-space amplitude is the
/// transform of `envelope` (cell-centred samples, length n_cells).
FieldState compose(const std::vector<cplx>& envelope, double delta, Branch branch,
                   const MediumConfig& medium);

/// max over a dense sampling of [t0, t1] of |theta_dot| / min(|lambda1|, |lambda2|)
/// at k = 0. Spatial gradients are judged by their effective sweep rate slope * c.
double adiabaticity_margin(const DetuningSchedule& schedule, double beta, double t0, double t1,
                           double c = 1.0);

enum class Verdict { pass, warn, fail };
std::string to_string(Verdict v);
/// pass < 0.2, warn < 0.5, otherwise fail.
Verdict classify(double ratio);

struct ConditionEntry {
    std::string name;
    double ratio = 0.0;
    Verdict verdict = Verdict::pass;
};

struct ConditionReport {
    ConditionEntry detuning;     // beta / |Delta_0|
    ConditionEntry adiabaticity; // adiabaticity_margin
    ConditionEntry dispersion;   // bandwidth / beta
    bool all_pass() const;
    Verdict worst() const;
};

/// `t_end` bounds the adiabaticity sampling window; defaults to the schedule horizon.
ConditionReport condition_report(const MediumConfig& medium, const PulseSpec& pulse,
                                 const DetuningSchedule& schedule, double t_end = -1.0);

}  // namespace afs::polariton
