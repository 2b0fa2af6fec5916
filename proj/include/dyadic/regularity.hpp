#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dyadic/field.hpp"
#include "dyadic/integrator.hpp"
#include "dyadic/lattice.hpp"

namespace dyadic {

struct RegularityParams {
    double alpha = 1.0;
    double badness_constant = 1.0;   // C in the badness criterion (>= side)
    double critical_constant = 1.0;  // prefactor of the amplitude threshold

    void validate() const;
};

/// Amplitude threshold critical_constant * 2^{-j (5 - 4 alpha) / 2}: below it
/// the level-j nonlinear growth is dominated by dissipation.
double critical_threshold(int level, const RegularityParams& params);

struct SupercriticalCube {
    CubeId id;
    double excess_ratio = 0.0;  // |u_Q| / threshold, > 1
};

/// Cubes with |u_Q| strictly above the critical threshold, sorted by excess
/// ratio descending (ties by cube id).
std::vector<SupercriticalCube> supercritical_cubes(const CoefficientField& u,
                                                   const RegularityParams& params);

class missing_diagnostics_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BadCubeLevel {
    int level = 0;
    std::vector<CubeId> cubes;  // flat-index order
    std::uint64_t count = 0;
    double paper_bound = 0.0;   // C * 2^{j (5 - 4 alpha)}
    double level_budget = 0.0;  // 2^{2 alpha j} * int E_j dt
    double raw_integral = 0.0;  // int E_j dt
};

/// Per-level bad-cube sets from accumulated int u_Q^2 dt, with the bound
/// data and the limsup dimension fit over the resulting families.
struct BadCubeReport {
    RegularityParams params;
    int dim = 3;
    int max_level = 0;
    double horizon = 0.0;            // T of the underlying trajectory
    double energy_budget = 0.0;      // sum over levels of level_budget
    std::vector<BadCubeLevel> levels;
    std::optional<double> dimension_estimate;  // nullopt: fewer than 2 non-empty levels
    double theoretical_dimension = 0.0;        // 5 - 4 alpha clamped to [0, dim]

    std::uint64_t total_bad() const;
};

/// Q at level j is bad iff 2^{2 j alpha} (int_0^T u_Q^2 dt)^{1/2} >= C 2^{-j(5-4alpha)}.
/// Every report is cross-checked against the per-level budget identity
/// count_j * C^2 * 2^{-2j(5-4alpha)} <= 2^{4 j alpha} * int E_j dt, which is
/// forced by the criterion itself.
BadCubeReport bad_cubes(const Trajectory& traj, const RegularityParams& params);

struct LevelMargin {
    int level = 0;
    std::uint64_t count = 0;
    double bound = 0.0;   // (energy_budget / C^2) * 2^{j (5 - 4 alpha)}
    double margin = 0.0;  // bound / count, +inf when count = 0
    bool pass = false;
};

struct BoundCheckResult {
    bool all_pass = false;
    std::vector<LevelMargin> levels;
};

/// Checks count_j <= (energy_budget / C^2) * 2^{j (5 - 4 alpha)} per level.
BoundCheckResult badcount_bound_check(const BadCubeReport& report, double energy_budget);

/// Growth exponent of the bad-cube families via the limsup fit; 0 when no
/// level has a bad cube. Estimator errors propagate.
double singular_dimension_estimate(const BadCubeReport& report);

/// Structured text form: header, then one line per level
/// (j, count, paper bound, level budget, budget bound, margin, pass).
void write_badcube_report(const BadCubeReport& report, const BoundCheckResult& check,
                          std::ostream& out);

}  // namespace dyadic
