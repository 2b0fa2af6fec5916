#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dyadic/dynamics.hpp"
#include "dyadic/field.hpp"

namespace dyadic {

struct IntegrationSpan {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt_init = 1e-4;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double safety = 0.9;     // step controller factor, also the nonlinear CFL margin
    double rel_tol = 1e-9;   // embedded error tolerance per step
    double abs_tol = 1e-14;

    void validate() const;
};

struct IntegrateOptions {
    std::uint64_t snapshot_cadence = 1;  // full-field snapshot every N accepted steps
    double blowup_ceiling = 1e8;         // sup_norm_proxy above this flags blow-up and stops
    double sobolev_beta = 1.0;           // beta used in the diagnostics series
};

struct StepLog {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
};

struct DiagnosticsRow {
    double t = 0.0;
    double energy = 0.0;
    double sobolev = 0.0;
    double sup_proxy = 0.0;
    double dissipation_rate = 0.0;     // 2 * sum of 2^{2 alpha j} u_Q^2
    std::vector<double> level_energy;  // J+1 entries
};

/// Time series of fields plus the running per-cube integrals int u_Q^2 dt
/// (trapezoid over accepted steps) that regularity analysis consumes.
struct Trajectory {
    LatticeConfig config;
    ModelParams params;
    double t_start = 0.0;
    double t_end = 0.0;  // time actually reached
    double sobolev_beta = 1.0;
    std::vector<std::pair<double, CoefficientField>> snapshots;
    std::vector<std::vector<double>> sq_integrals;  // [level][flat index]: int u_Q^2 dt
    std::vector<DiagnosticsRow> diagnostics;
    StepLog step_log;
    bool blow_up_flagged = false;
    double blow_up_time = 0.0;
    double max_energy = 0.0;

    /// int u_Q^2 dt summed over level j (compensated).
    double level_sq_integral(int level) const;

    /// Dissipation integral int 2^{2 alpha j} u_Q^2 dt for one cube, with the
    /// rate taken from `params` (zero in inviscid mode).
    double dissipation_integral(const CubeId& cube) const;

    /// Sum of dissipation integrals over all cubes.
    double dissipation_total() const;
};

/// A step produced a NaN/Inf state.
class instability_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The controller ran into the dt_min floor.
class stiffness_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One step of the integrating-factor Bogacki-Shampine 3(2) scheme: the
/// diagonal dissipation is advanced by exact per-level exponentials, the
/// cascade term by the explicit stages. With dissipation disabled this is
/// classical BS3. Throws instability_error if the result is not finite.
CoefficientField etd_step(const CoefficientField& u, double dt, const ModelParams& params,
                          const CascadeTable& table);

/// Adaptive integration with the embedded 2nd-order error estimate and a PI
/// step controller. Deterministic: fixed evaluation order, no threading.
Trajectory integrate(const CoefficientField& u0, const IntegrationSpan& span,
                     const ModelParams& params, const CascadeTable& table,
                     const IntegrateOptions& options = {});

/// u_Q(t) = u_Q(0) exp(-2^{2 alpha j} t); the oracle the scheme must match
/// exactly on dissipation-only problems.
CoefficientField linear_exact_solution(const CoefficientField& u0, double t,
                                       const ModelParams& params);

}  // namespace dyadic
