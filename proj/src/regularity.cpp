#include "dyadic/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "dyadic/numerics.hpp"

namespace dyadic {

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void RegularityParams::validate() const {
    if (!(badness_constant > 0.0)) {
        throw std::invalid_argument("badness_constant must be > 0");
    }
    if (!(critical_constant > 0.0)) {
        throw std::invalid_argument("critical_constant must be > 0");
    }
    if (alpha < 0.0) {
        throw std::invalid_argument("alpha must be >= 0");
    }
}

double critical_threshold(int level, const RegularityParams& params) {
    return params.critical_constant * std::exp2(-0.5 * level * (5.0 - 4.0 * params.alpha));
}

std::vector<SupercriticalCube> supercritical_cubes(const CoefficientField& u,
                                                   const RegularityParams& params) {
    params.validate();
    std::vector<SupercriticalCube> result;
    const LatticeConfig& config = u.config();
    for (int j = 0; j <= config.max_level; ++j) {
        const double threshold = critical_threshold(j, params);
        const auto& lvl = u.level(j);
        for (std::size_t i = 0; i < lvl.size(); ++i) {
            const double mag = std::abs(lvl[i]);
            if (mag > threshold) {  // strictly supercritical; the boundary itself is controlled
                result.push_back({cube_from_index(j, i, config), mag / threshold});
            }
        }
    }
    std::sort(result.begin(), result.end(), [](const SupercriticalCube& a, const SupercriticalCube& b) {
        if (a.excess_ratio != b.excess_ratio) return a.excess_ratio > b.excess_ratio;
        return a.id < b.id;
    });
    return result;
}

std::uint64_t BadCubeReport::total_bad() const {
    std::uint64_t n = 0;
    for (const auto& lvl : levels) n += lvl.count;
    return n;
}

BadCubeReport bad_cubes(const Trajectory& traj, const RegularityParams& params) {
    params.validate();
    if (traj.sq_integrals.size() != static_cast<std::size_t>(traj.config.max_level) + 1) {
        throw missing_diagnostics_error("trajectory carries no dissipation integrals");
    }
    for (int j = 0; j <= traj.config.max_level; ++j) {
        if (traj.sq_integrals[static_cast<std::size_t>(j)].size() != traj.config.cubes_at_level(j)) {
            throw missing_diagnostics_error("dissipation integrals do not match the lattice");
        }
    }

    const double alpha = params.alpha;
    const double c = params.badness_constant;

    BadCubeReport report;
    report.params = params;
    report.dim = traj.config.dim;
    report.max_level = traj.config.max_level;
    report.horizon = traj.t_end - traj.t_start;
    report.theoretical_dimension =
        std::clamp(5.0 - 4.0 * alpha, 0.0, static_cast<double>(traj.config.dim));

    CompensatedSum budget;
    for (int j = 0; j <= traj.config.max_level; ++j) {
        BadCubeLevel lvl;
        lvl.level = j;
        lvl.paper_bound = c * std::exp2(j * (5.0 - 4.0 * alpha));
        lvl.raw_integral = traj.level_sq_integral(j);
        lvl.level_budget = std::exp2(2.0 * alpha * j) * lvl.raw_integral;
        budget.add(lvl.level_budget);

        const double weight = std::exp2(2.0 * j * alpha);
        const double rhs = c * std::exp2(-static_cast<double>(j) * (5.0 - 4.0 * alpha));
        const auto& integrals = traj.sq_integrals[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < integrals.size(); ++i) {
            if (weight * std::sqrt(integrals[i]) >= rhs) {
                lvl.cubes.push_back(cube_from_index(j, i, traj.config));
            }
        }
        lvl.count = lvl.cubes.size();

        // Per-level budget identity: summing the squared criterion over the
        // bad cubes cannot exceed summing it over all cubes.
        const double lhs_sum = static_cast<double>(lvl.count) * rhs * rhs;
        const double rhs_sum = weight * weight * lvl.raw_integral;
        if (lhs_sum > rhs_sum * (1.0 + 1e-9) + 1e-300) {
            throw std::logic_error("bad-cube count violates the per-level budget identity");
        }

        report.levels.push_back(std::move(lvl));
    }
    report.energy_budget = budget.value();

    if (report.total_bad() == 0) {
        report.dimension_estimate = 0.0;
    } else {
        CubeFamilySequence seq;
        seq.first_level = 0;
        for (const auto& lvl : report.levels) seq.families.push_back(lvl.cubes);
        try {
            report.dimension_estimate = limsup_dimension_estimate(seq);
        } catch (const estimate_error&) {
            report.dimension_estimate = std::nullopt;
        }
    }
    return report;
}

BoundCheckResult badcount_bound_check(const BadCubeReport& report, double energy_budget) {
    const double alpha = report.params.alpha;
    const double c = report.params.badness_constant;

    BoundCheckResult result;
    result.all_pass = true;
    for (const auto& lvl : report.levels) {
        LevelMargin m;
        m.level = lvl.level;
        m.count = lvl.count;
        m.bound = (energy_budget / (c * c)) * std::exp2(lvl.level * (5.0 - 4.0 * alpha));
        m.margin = (lvl.count == 0) ? std::numeric_limits<double>::infinity()
                                    : m.bound / static_cast<double>(lvl.count);
        m.pass = static_cast<double>(lvl.count) <= m.bound * (1.0 + 1e-12);
        result.all_pass = result.all_pass && m.pass;
        result.levels.push_back(m);
    }
    return result;
}

double singular_dimension_estimate(const BadCubeReport& report) {
    if (report.total_bad() == 0) return 0.0;
    CubeFamilySequence seq;
    seq.first_level = 0;
    for (const auto& lvl : report.levels) seq.families.push_back(lvl.cubes);
    return limsup_dimension_estimate(seq);
}

void write_badcube_report(const BadCubeReport& report, const BoundCheckResult& check,
                          std::ostream& out) {
    out << "# bad-cube report\n";
    out << "alpha = " << format_double(report.params.alpha) << '\n';
    out << "badness_constant = " << format_double(report.params.badness_constant) << '\n';
    out << "critical_constant = " << format_double(report.params.critical_constant) << '\n';
    out << "horizon = " << format_double(report.horizon) << '\n';
    out << "energy_budget = " << format_double(report.energy_budget) << '\n';
    out << "total_bad = " << report.total_bad() << '\n';
    if (report.dimension_estimate.has_value()) {
        out << "dimension_estimate = " << format_double(*report.dimension_estimate) << '\n';
    } else {
        out << "dimension_estimate = undefined\n";
    }
    out << "theoretical_dimension = " << format_double(report.theoretical_dimension) << '\n';
    out << "# level count paper_bound level_budget budget_bound margin pass\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& lvl = report.levels[i];
        const auto& m = check.levels[i];
        out << lvl.level << ' ' << lvl.count << ' ' << format_double(lvl.paper_bound) << ' '
            << format_double(lvl.level_budget) << ' ' << format_double(m.bound) << ' '
            << format_double(m.margin) << ' ' << (m.pass ? "yes" : "no") << '\n';
    }
}

}  // namespace dyadic
