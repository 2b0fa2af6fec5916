#include "doctest.h"

#include <cmath>
#include <vector>

#include "dyadic/dynamics.hpp"
#include "dyadic/integrator.hpp"
#include "dyadic/lattice.hpp"
#include "test_support.hpp"

using namespace dyadic;
using test_support::random_field;

namespace {

double max_abs_diff(const CoefficientField& a, const CoefficientField& b) {
    double best = 0.0;
    for (int j = 0; j <= a.max_level(); ++j) {
        for (std::size_t i = 0; i < a.level(j).size(); ++i) {
            best = std::max(best, std::abs(a.level(j)[i] - b.level(j)[i]));
        }
    }
    return best;
}

CoefficientField fixed_step_integrate(CoefficientField u, double t_end, int steps,
                                      const ModelParams& params, const CascadeTable& table) {
    const double dt = t_end / steps;
    for (int i = 0; i < steps; ++i) {
        u = etd_step(u, dt, params, table);
    }
    return u;
}

}  // namespace

TEST_CASE("span validation") {
    IntegrationSpan span;
    span.t_end = -1.0;
    CHECK_THROWS_AS(span.validate(), std::invalid_argument);
    span.t_end = 1.0;
    span.dt_min = 1e-3;
    span.dt_init = 1e-4;
    CHECK_THROWS_AS(span.validate(), std::invalid_argument);
}

TEST_CASE("etd_step keeps zero fields at zero") {
    const LatticeConfig config{1, 3};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.2;
    const CoefficientField zero(config);
    for (double dt : {1e-6, 1e-3, 0.5}) {
        CHECK(energy(etd_step(zero, dt, params, table)) == 0.0);
    }
}

TEST_CASE("etd_step is exact on a dissipation-only cube") {
    const LatticeConfig config{1, 4};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.1;

    CoefficientField u(config);
    const CubeId cube{3, {5, 0, 0}};
    const double a = 0.8;
    u.at(cube) = a;

    const double rate = std::exp2(2 * 1.1 * 3);
    for (double dt : {1e-4, 1e-2, 1.0}) {
        const CoefficientField stepped = etd_step(u, dt, params, table);
        const double expected = a * std::exp(-rate * dt);
        const double ulps = std::abs(stepped.at(cube) - expected) / std::ldexp(1.0, std::ilogb(expected) - 52);
        CHECK(ulps <= 4.0);

        CoefficientField residual = stepped;
        residual.at(cube) = 0.0;
        CHECK(energy(residual) == 0.0);
    }
}

TEST_CASE("measured convergence order is at least two") {
    const LatticeConfig config{1, 3};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.dissipation_enabled = false;

    const CoefficientField u0 = random_field(config, 42, 0.5);
    const double t_end = 0.25;

    const CoefficientField reference = fixed_step_integrate(u0, t_end, 4096, params, table);
    std::vector<double> errors;
    for (int steps : {16, 32, 64}) {
        errors.push_back(max_abs_diff(fixed_step_integrate(u0, t_end, steps, params, table), reference));
    }
    const double p21 = std::log2(errors[0] / errors[1]);
    const double p32 = std::log2(errors[1] / errors[2]);
    CHECK(p21 >= 2.0);
    CHECK(p32 >= 2.0);
    // the pair is third order; make sure we actually see it
    CHECK(p21 >= 2.7);
}

TEST_CASE("etd_step flags non-finite results") {
    const LatticeConfig config{1, 3};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.dissipation_enabled = false;

    CoefficientField u(config);
    u.at(CubeId{0, {0, 0, 0}}) = 1e200;
    u.at(CubeId{1, {0, 0, 0}}) = 1e200;
    CHECK_THROWS_AS(etd_step(u, 1.0, params, table), instability_error);
}

TEST_CASE("zero-length span returns the initial state only") {
    const LatticeConfig config{1, 3};
    const CascadeTable table = enumerate_cascades(config);
    const CoefficientField u0 = random_field(config, 3);
    IntegrationSpan span;
    span.t_start = 2.0;
    span.t_end = 2.0;
    ModelParams params;

    const Trajectory traj = integrate(u0, span, params, table);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].first == 2.0);
    CHECK(traj.snapshots[0].second == u0);
    CHECK(traj.step_log.accepted == 0);
    CHECK(!traj.blow_up_flagged);
}

TEST_CASE("integrate reproduces the exact linear solution") {
    const LatticeConfig config{1, 4};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.25;
    params.coupling_scale = 1e-30;  // effectively linear-only dynamics

    CoefficientField u0(config);
    u0.at(CubeId{4, {9, 0, 0}}) = 1.0;
    u0.at(CubeId{2, {1, 0, 0}}) = -0.5;

    IntegrationSpan span;
    span.t_end = 0.01;
    span.dt_init = 1e-5;
    span.dt_max = 1e-2;

    const Trajectory traj = integrate(u0, span, params, table);
    const CoefficientField expected = linear_exact_solution(u0, span.t_end, params);
    const CoefficientField& got = traj.snapshots.back().second;
    for (const CubeId& cube : {CubeId{4, {9, 0, 0}}, CubeId{2, {1, 0, 0}}}) {
        CHECK(std::abs(got.at(cube) - expected.at(cube)) <= 1e-10 * std::abs(expected.at(cube)));
    }
}

TEST_CASE("inviscid energy drift stays within tolerance") {
    const LatticeConfig config{1, 4};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.dissipation_enabled = false;

    const CoefficientField u0 = random_field(config, 7, 0.1);
    IntegrationSpan span;
    span.t_end = 0.1;

    const Trajectory traj = integrate(u0, span, params, table);
    const double e0 = traj.diagnostics.front().energy;
    const double e1 = traj.diagnostics.back().energy;
    CHECK(std::abs(e1 - e0) / e0 <= 1e-6);
}

TEST_CASE("dissipative runs satisfy the dissipation identity") {
    const LatticeConfig config{1, 5};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.1;

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        CoefficientField u0 = random_field(config, seed, 0.5);
        // smooth decay profile
        for (int j = 0; j <= config.max_level; ++j) {
            const double f = std::exp2(-1.5 * j);
            for (double& x : u0.level(j)) x *= f;
        }

        IntegrationSpan span;
        span.t_end = 0.05;
        span.dt_max = 2e-4;  // keeps the trapezoid error of the integrals well under the check

        const Trajectory traj = integrate(u0, span, params, table);
        const double e0 = traj.diagnostics.front().energy;
        const double e1 = traj.diagnostics.back().energy;
        const double dissipated = 2.0 * traj.dissipation_total();
        CHECK(std::abs((e0 - e1) - dissipated) <= 1e-3 * (e0 - e1));
    }
}

TEST_CASE("energy is non-increasing along dissipative trajectories") {
    const LatticeConfig config{1, 4};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.0;

    const CoefficientField u0 = random_field(config, 17, 0.3);
    IntegrationSpan span;
    span.t_end = 0.2;

    const Trajectory traj = integrate(u0, span, params, table);
    for (std::size_t i = 1; i < traj.diagnostics.size(); ++i) {
        const double dt = traj.diagnostics[i].t - traj.diagnostics[i - 1].t;
        CHECK(traj.diagnostics[i].energy <=
              traj.diagnostics[i - 1].energy + 10.0 * std::pow(dt, 3) + 1e-15);
        CHECK(dt > 0.0);
    }
}

TEST_CASE("trapezoid integrals track the exact linear integral") {
    const LatticeConfig config{1, 2};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.0;

    CoefficientField u0(config);
    const CubeId cube{1, {1, 0, 0}};
    u0.at(cube) = 1.0;  // single cube: exactly linear dynamics, rate 4

    IntegrationSpan span;
    span.t_end = 0.5;
    span.dt_max = 2e-4;

    const Trajectory traj = integrate(u0, span, params, table);
    const double rate = 4.0;
    const double exact = (1.0 - std::exp(-2.0 * rate * span.t_end)) / (2.0 * rate);
    const double got = traj.sq_integrals[1][1];
    CHECK(std::abs(got - exact) <= 1e-6 * exact);

    for (const auto& lvl : traj.sq_integrals) {
        for (double x : lvl) CHECK(x >= 0.0);
    }
}

TEST_CASE("snapshot cadence and monotone snapshot times") {
    const LatticeConfig config{1, 3};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.0;

    const CoefficientField u0 = random_field(config, 23, 0.2);
    IntegrationSpan span;
    span.t_end = 0.05;
    IntegrateOptions options;
    options.snapshot_cadence = 5;

    const Trajectory traj = integrate(u0, span, params, table, options);
    REQUIRE(traj.snapshots.size() >= 2);
    CHECK(traj.snapshots.front().first == 0.0);
    CHECK(traj.snapshots.back().first == span.t_end);
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        CHECK(traj.snapshots[i].first > traj.snapshots[i - 1].first);
    }
    CHECK(traj.snapshots.size() <= 2 + traj.step_log.accepted / options.snapshot_cadence + 1);
}

TEST_CASE("blow-up ceiling flags and stops the run") {
    const LatticeConfig config{1, 3};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.dissipation_enabled = false;

    const CoefficientField u0 = random_field(config, 5, 1.0);
    IntegrationSpan span;
    span.t_end = 1.0;
    IntegrateOptions options;
    options.blowup_ceiling = 1e-3;  // below the initial sup proxy

    const Trajectory traj = integrate(u0, span, params, table, options);
    CHECK(traj.blow_up_flagged);
    CHECK(traj.blow_up_time > 0.0);
    CHECK(traj.t_end < span.t_end);
    CHECK(traj.snapshots.back().first == traj.blow_up_time);
}

TEST_CASE("dt_min floor raises a stiffness error") {
    const LatticeConfig config{1, 4};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.dissipation_enabled = false;

    const CoefficientField u0 = random_field(config, 9, 1.0);
    IntegrationSpan span;
    span.t_end = 1.0;
    span.dt_init = 0.5;
    span.dt_min = 0.5;
    span.dt_max = 0.5;  // no room to adapt
    span.rel_tol = 1e-14;
    span.abs_tol = 1e-16;

    CHECK_THROWS_AS(integrate(u0, span, params, table), stiffness_error);
}

TEST_CASE("integration is deterministic") {
    const LatticeConfig config{2, 3};
    const CascadeTable table = enumerate_cascades(config);
    ModelParams params;
    params.alpha = 1.05;

    const CoefficientField u0 = random_field(config, 77, 0.4);
    IntegrationSpan span;
    span.t_end = 0.02;

    const Trajectory a = integrate(u0, span, params, table);
    const Trajectory b = integrate(u0, span, params, table);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(a.snapshots[i].first == b.snapshots[i].first);
        CHECK(a.snapshots[i].second == b.snapshots[i].second);
    }
    CHECK(a.sq_integrals == b.sq_integrals);
}

TEST_CASE("linear exact solution examples") {
    const LatticeConfig config{1, 2};
    ModelParams params;
    params.alpha = 1.0;

    CoefficientField u0(config);
    u0.at(CubeId{1, {0, 0, 0}}) = 1.0;

    CHECK(linear_exact_solution(u0, 0.0, params) == u0);

    const double t = std::log(2.0) / 4.0;
    const CoefficientField half = linear_exact_solution(u0, t, params);
    CHECK(half.at(CubeId{1, {0, 0, 0}}) == doctest::Approx(0.5).epsilon(1e-14));

    double prev = energy(u0);
    for (double s : {0.01, 0.05, 0.25, 1.0}) {
        const double e = energy(linear_exact_solution(u0, s, params));
        CHECK(e < prev);
        prev = e;
    }

    CHECK_THROWS_AS(linear_exact_solution(u0, -1.0, params), std::invalid_argument);
}
