#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dyadic/experiment.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/regularity.hpp"

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void print_run_summary(const dyadic::RunArtifacts& artifacts) {
    std::cout << "status: " << dyadic::to_string(artifacts.status) << '\n';
    std::cout << "output: " << artifacts.dir.string() << '\n';
    if (artifacts.status == dyadic::RunStatus::stiffness_failure) {
        std::cout << "error: " << artifacts.error_message << '\n';
        return;
    }
    const auto& traj = artifacts.trajectory;
    std::cout << "steps: " << traj.step_log.accepted << " accepted, " << traj.step_log.rejected
              << " rejected\n";
    if (!traj.diagnostics.empty()) {
        std::cout << "energy: " << traj.diagnostics.front().energy << " -> "
                  << traj.diagnostics.back().energy << '\n';
    }
    std::cout << "bad cubes: " << artifacts.report.total_bad()
              << " (bound check: " << (artifacts.bound_check.all_pass ? "pass" : "FAIL") << ")\n";
}

int command_run(const std::string& config_path, const std::string& output_override,
                bool seed_given, std::uint64_t seed_override, const std::string& preset) {
    dyadic::ExperimentConfig config = dyadic::parse_config(read_text_file(config_path));
    if (!output_override.empty()) config.output.dir = output_override;
    if (seed_given) config.init.seed = seed_override;

    if (preset == "alpha-sweep") {
        const auto runs = dyadic::run_alpha_sweep(config);
        int worst = 0;
        for (const auto& r : runs) {
            std::cout << "alpha = " << r.config.model.alpha << '\n';
            print_run_summary(r);
            worst = std::max(worst, dyadic::exit_code(r.status));
        }
        return worst;
    }
    if (preset == "dispersion") {
        const auto artifacts = dyadic::run_dispersion(config);
        print_run_summary(artifacts);
        return dyadic::exit_code(artifacts.status);
    }

    const auto artifacts = dyadic::run_experiment(config);
    print_run_summary(artifacts);
    return dyadic::exit_code(artifacts.status);
}

int command_analyze(const std::string& trajectory_path, double badness_constant,
                    double critical_constant, int fit_min, int fit_max) {
    const dyadic::Trajectory traj = dyadic::read_trajectory(trajectory_path);

    dyadic::RegularityParams params;
    params.alpha = traj.params.alpha;
    params.badness_constant = badness_constant;
    params.critical_constant = critical_constant;

    dyadic::BadCubeReport report = dyadic::bad_cubes(traj, params);
    if (fit_min != 0 || fit_max >= 0) {
        const int hi = fit_max < 0 ? traj.config.max_level : fit_max;
        dyadic::CubeFamilySequence seq;
        seq.first_level = fit_min;
        std::uint64_t total = 0;
        for (int j = fit_min; j <= hi; ++j) {
            seq.families.push_back(report.levels[static_cast<std::size_t>(j)].cubes);
            total += seq.families.back().size();
        }
        if (total == 0) {
            report.dimension_estimate = 0.0;
        } else {
            try {
                report.dimension_estimate = dyadic::limsup_dimension_estimate(seq);
            } catch (const dyadic::estimate_error&) {
                report.dimension_estimate = std::nullopt;
            }
        }
    }
    const dyadic::BoundCheckResult check = dyadic::badcount_bound_check(report, report.energy_budget);
    dyadic::write_badcube_report(report, check, std::cout);
    return check.all_pass ? 0 : 2;
}

int command_cascades(int dim, int max_level) {
    dyadic::LatticeConfig config{dim, max_level};
    config.validate();
    const dyadic::CascadeTable table = dyadic::enumerate_cascades(config);
    dyadic::dump_cascades(table, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic cascade model simulator and analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::uint64_t seed_override = 0;
    std::string preset;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("--config", config_path, "experiment config path")->required();
    run->add_option("--output", output_override, "override output.dir");
    auto* seed_opt = run->add_option("--seed", seed_override, "override init.seed");
    run->add_option("--preset", preset, "preset: alpha-sweep or dispersion")
        ->check(CLI::IsMember({"alpha-sweep", "dispersion"}));

    std::string trajectory_path;
    double badness_constant = 1.0;
    double critical_constant = 1.0;
    int fit_min = 0;
    int fit_max = -1;
    auto* analyze = app.add_subcommand("analyze", "re-run regularity analysis on a stored trajectory");
    analyze->add_option("--trajectory", trajectory_path, "trajectory file path")->required();
    analyze->add_option("--badness-constant", badness_constant, "badness constant C");
    analyze->add_option("--critical-constant", critical_constant, "critical threshold constant");
    analyze->add_option("--fit-min-level", fit_min, "first level of the dimension fit");
    analyze->add_option("--fit-max-level", fit_max, "last level of the dimension fit (-1: max)");

    int dim = 3;
    int max_level = 2;
    auto* cascades = app.add_subcommand("cascades", "dump the cascade table");
    cascades->add_option("--d", dim, "spatial dimension (1-3)")->required();
    cascades->add_option("--max-level", max_level, "maximum lattice level")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            return command_run(config_path, output_override, seed_opt->count() > 0, seed_override, preset);
        }
        if (analyze->parsed()) {
            return command_analyze(trajectory_path, badness_constant, critical_constant, fit_min, fit_max);
        }
        if (cascades->parsed()) {
            return command_cascades(dim, max_level);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
