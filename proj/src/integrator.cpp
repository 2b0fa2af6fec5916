#include "dyadic/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyadic/numerics.hpp"

namespace dyadic {

namespace {

struct StepResult {
    CoefficientField u;    // 3rd-order solution
    CoefficientField est;  // difference against the embedded 2nd-order solution
    CoefficientField n_end;  // nonlinear RHS at the new state (FSAL)
};

// exp(-lambda_j * theta * dt) for each level.
std::vector<double> decay_factors(const LatticeConfig& config, const ModelParams& params,
                                  double theta_dt) {
    std::vector<double> factors(static_cast<std::size_t>(config.max_level) + 1, 1.0);
    if (!params.dissipation_enabled) return factors;
    for (int j = 0; j <= config.max_level; ++j) {
        factors[static_cast<std::size_t>(j)] = std::exp(-dissipation_eigenvalue(j, params) * theta_dt);
    }
    return factors;
}

void scale_per_level(CoefficientField& u, const std::vector<double>& factors) {
    for (int j = 0; j <= u.max_level(); ++j) {
        const double f = factors[static_cast<std::size_t>(j)];
        for (double& x : u.level(j)) x *= f;
    }
}

void add_scaled_per_level(CoefficientField& dst, const CoefficientField& src, double a,
                          const std::vector<double>& factors) {
    for (int j = 0; j <= dst.max_level(); ++j) {
        const double f = a * factors[static_cast<std::size_t>(j)];
        const auto& s = src.level(j);
        auto& d = dst.level(j);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += f * s[i];
    }
}

// Integrating-factor Bogacki-Shampine 3(2). `n_start` must be the nonlinear
// RHS at u (FSAL companion). Stage exponents are all non-positive, so no
// overflow for any stiffness.
StepResult bs3_step(const CoefficientField& u, const CoefficientField& n_start, double dt,
                    const ModelParams& params, const CascadeTable& table) {
    const LatticeConfig& config = u.config();
    const auto e14 = decay_factors(config, params, 0.25 * dt);
    const auto e12 = decay_factors(config, params, 0.50 * dt);
    const auto e34 = decay_factors(config, params, 0.75 * dt);
    const auto e1 = decay_factors(config, params, dt);

    // U2 = E(1/2) (u + dt/2 N1)
    CoefficientField u2 = u;
    u2.add_scaled(n_start, 0.5 * dt);
    scale_per_level(u2, e12);
    const CoefficientField n2 = nonlinear_rhs(u2, params, table);

    // U3 = E(3/4) u + dt 3/4 E(1/4) N2
    CoefficientField u3 = u;
    scale_per_level(u3, e34);
    add_scaled_per_level(u3, n2, 0.75 * dt, e14);
    const CoefficientField n3 = nonlinear_rhs(u3, params, table);

    // u_{n+1} = E(1) u + dt [ 2/9 E(1) N1 + 1/3 E(1/2) N2 + 4/9 E(1/4) N3 ]
    StepResult result{CoefficientField(config), CoefficientField(config), CoefficientField(config)};
    result.u = u;
    scale_per_level(result.u, e1);
    add_scaled_per_level(result.u, n_start, dt * (2.0 / 9.0), e1);
    add_scaled_per_level(result.u, n2, dt * (1.0 / 3.0), e12);
    add_scaled_per_level(result.u, n3, dt * (4.0 / 9.0), e14);

    result.n_end = nonlinear_rhs(result.u, params, table);

    // est = dt [ -5/72 E(1) N1 + 1/12 E(1/2) N2 + 1/9 E(1/4) N3 - 1/8 N4 ]
    add_scaled_per_level(result.est, n_start, dt * (-5.0 / 72.0), e1);
    add_scaled_per_level(result.est, n2, dt * (1.0 / 12.0), e12);
    add_scaled_per_level(result.est, n3, dt * (1.0 / 9.0), e14);
    result.est.add_scaled(result.n_end, dt * (-1.0 / 8.0));
    return result;
}

// RMS of est against the mixed tolerance.
double error_norm(const CoefficientField& est, const CoefficientField& u_old,
                  const CoefficientField& u_new, const IntegrationSpan& span) {
    CompensatedSum sum;
    std::uint64_t n = 0;
    for (int j = 0; j <= est.max_level(); ++j) {
        const auto& e = est.level(j);
        const auto& a = u_old.level(j);
        const auto& b = u_new.level(j);
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double scale = span.abs_tol + span.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double r = e[i] / scale;
            sum.add(r * r);
            ++n;
        }
    }
    return std::sqrt(sum.value() / static_cast<double>(n));
}

double dissipation_rate(const CoefficientField& u, const ModelParams& params) {
    CompensatedSum sum;
    for (int j = 0; j <= u.max_level(); ++j) {
        const double rate = dissipation_eigenvalue(j, params);
        for (double x : u.level(j)) sum.add(rate * x * x);
    }
    return 2.0 * sum.value();
}

DiagnosticsRow make_row(double t, const CoefficientField& u, const ModelParams& params,
                        double sobolev_beta) {
    DiagnosticsRow row;
    row.t = t;
    row.energy = energy(u);
    row.sobolev = sobolev_norm(u, sobolev_beta);
    row.sup_proxy = sup_norm_proxy(u);
    row.dissipation_rate = dissipation_rate(u, params);
    row.level_energy = level_spectrum(u);
    return row;
}

}  // namespace

void IntegrationSpan::validate() const {
    if (!(t_end >= t_start)) {
        throw std::invalid_argument("span t_end must be >= t_start");
    }
    if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max)) {
        throw std::invalid_argument("span requires 0 < dt_min <= dt_init <= dt_max");
    }
    if (!(safety > 0.0) || safety > 1.0) {
        throw std::invalid_argument("span safety must be in (0, 1]");
    }
    if (!(rel_tol >= 0.0) || !(abs_tol >= 0.0) || (rel_tol == 0.0 && abs_tol == 0.0)) {
        throw std::invalid_argument("span tolerances must be non-negative and not both zero");
    }
}

double Trajectory::level_sq_integral(int level) const {
    CompensatedSum sum;
    for (double x : sq_integrals[static_cast<std::size_t>(level)]) sum.add(x);
    return sum.value();
}

double Trajectory::dissipation_integral(const CubeId& cube) const {
    if (!in_lattice(cube, config)) {
        throw std::invalid_argument("cube " + to_string(cube, config.dim) + " outside lattice");
    }
    const double rate = dissipation_eigenvalue(cube.level, params);
    return rate * sq_integrals[static_cast<std::size_t>(cube.level)][flat_index(cube, config)];
}

double Trajectory::dissipation_total() const {
    CompensatedSum sum;
    for (int j = 0; j <= config.max_level; ++j) {
        const double rate = dissipation_eigenvalue(j, params);
        for (double x : sq_integrals[static_cast<std::size_t>(j)]) sum.add(rate * x);
    }
    return sum.value();
}

CoefficientField etd_step(const CoefficientField& u, double dt, const ModelParams& params,
                          const CascadeTable& table) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("etd_step requires dt > 0");
    }
    params.validate();
    const CoefficientField n0 = nonlinear_rhs(u, params, table);
    StepResult result = bs3_step(u, n0, dt, params, table);
    if (!result.u.all_finite()) {
        throw instability_error("etd_step produced a non-finite state (dt = " + std::to_string(dt) + ")");
    }
    return std::move(result.u);
}

Trajectory integrate(const CoefficientField& u0, const IntegrationSpan& span,
                     const ModelParams& params, const CascadeTable& table,
                     const IntegrateOptions& options) {
    span.validate();
    params.validate();
    if (u0.config() != table.config) {
        throw std::invalid_argument("lattice mismatch between initial field and cascade table");
    }
    if (!u0.all_finite()) {
        throw std::invalid_argument("initial field contains non-finite coefficients");
    }

    Trajectory traj;
    traj.config = u0.config();
    traj.params = params;
    traj.t_start = span.t_start;
    traj.t_end = span.t_start;
    traj.sobolev_beta = options.sobolev_beta;
    traj.sq_integrals.resize(static_cast<std::size_t>(traj.config.max_level) + 1);
    for (int j = 0; j <= traj.config.max_level; ++j) {
        traj.sq_integrals[static_cast<std::size_t>(j)].assign(traj.config.cubes_at_level(j), 0.0);
    }

    CoefficientField u = u0;
    double t = span.t_start;
    traj.snapshots.emplace_back(t, u);
    traj.diagnostics.push_back(make_row(t, u, params, options.sobolev_beta));
    traj.max_energy = traj.diagnostics.back().energy;

    if (span.t_end == span.t_start) {
        return traj;
    }

    const double max_kappa = table.max_kappa();
    CoefficientField n_cur = nonlinear_rhs(u, params, table);
    double sup_proxy = traj.diagnostics.back().sup_proxy;
    double dt = std::clamp(span.dt_init, span.dt_min, span.dt_max);
    double prev_err = 1.0;
    int consecutive_rejects = 0;
    const double t_tiny = 1e-14 * std::max(1.0, std::abs(span.t_end));

    while (t < span.t_end - t_tiny) {
        // Nonlinear CFL guard on the explicit stages.
        double dt_try = dt;
        const double cfl_denom = params.coupling_scale * max_kappa * sup_proxy;
        if (cfl_denom > 0.0) {
            dt_try = std::min(dt_try, span.safety / cfl_denom);
        }
        dt_try = std::max(dt_try, span.dt_min);
        const bool clipped_to_end = dt_try >= span.t_end - t;
        if (clipped_to_end) dt_try = span.t_end - t;

        StepResult result = bs3_step(u, n_cur, dt_try, params, table);

        const bool finite = result.u.all_finite() && result.est.all_finite();
        double err = 0.0;
        if (finite) {
            err = error_norm(result.est, u, result.u, span);
        }

        if (!finite || err > 1.0) {
            ++traj.step_log.rejected;
            ++consecutive_rejects;
            const double factor =
                finite ? std::clamp(span.safety * std::pow(err, -1.0 / 3.0), 0.1, 0.7) : 0.25;
            const double dt_next = dt_try * factor;
            if (dt_next < span.dt_min || consecutive_rejects > 100) {
                std::ostringstream msg;
                msg << "step controller hit the dt_min floor at t = " << t << " (dt = " << dt_try
                    << ", error = " << err << ", accepted = " << traj.step_log.accepted
                    << ", rejected = " << traj.step_log.rejected << ")";
                throw stiffness_error(msg.str());
            }
            dt = dt_next;
            continue;
        }

        // Accept: trapezoid accumulation of int u_Q^2 dt on this step.
        consecutive_rejects = 0;
        for (int j = 0; j <= traj.config.max_level; ++j) {
            const auto& a = u.level(j);
            const auto& b = result.u.level(j);
            auto& acc = traj.sq_integrals[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < acc.size(); ++i) {
                acc[i] += 0.5 * dt_try * (a[i] * a[i] + b[i] * b[i]);
            }
        }

        t = clipped_to_end ? span.t_end : t + dt_try;
        u = std::move(result.u);
        n_cur = std::move(result.n_end);
        ++traj.step_log.accepted;
        traj.t_end = t;

        traj.diagnostics.push_back(make_row(t, u, params, options.sobolev_beta));
        const DiagnosticsRow& row = traj.diagnostics.back();
        sup_proxy = row.sup_proxy;
        traj.max_energy = std::max(traj.max_energy, row.energy);

        const bool at_end = t >= span.t_end - t_tiny;
        if (at_end || traj.step_log.accepted % options.snapshot_cadence == 0) {
            traj.snapshots.emplace_back(t, u);
        }

        if (sup_proxy > options.blowup_ceiling) {
            traj.blow_up_flagged = true;
            traj.blow_up_time = t;
            if (traj.snapshots.back().first != t) {
                traj.snapshots.emplace_back(t, u);
            }
            break;
        }

        const double grow = (err == 0.0)
                                ? 5.0
                                : std::clamp(span.safety * std::pow(err, -0.7 / 3.0) *
                                                 std::pow(prev_err, 0.4 / 3.0),
                                             0.2, 5.0);
        prev_err = std::max(err, 1e-10);
        dt = std::clamp(dt_try * grow, span.dt_min, span.dt_max);
    }

    return traj;
}

CoefficientField linear_exact_solution(const CoefficientField& u0, double t,
                                       const ModelParams& params) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("linear_exact_solution requires t >= 0");
    }
    CoefficientField u = u0;
    for (int j = 0; j <= u.max_level(); ++j) {
        const double factor = std::exp(-dissipation_eigenvalue(j, params) * t);
        for (double& x : u.level(j)) x *= factor;
    }
    return u;
}

}  // namespace dyadic
