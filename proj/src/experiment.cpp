#include "dyadic/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dyadic/numerics.hpp"

namespace dyadic {

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t hash_cube(std::uint64_t seed, const CubeId& cube) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(cube.level));
    for (int k = 0; k < 3; ++k) {
        h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(cube.coords[k])));
    }
    return h;
}

void write_file(RunArtifacts& artifacts, const std::string& name, const std::string& content) {
    const std::filesystem::path path = artifacts.dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
    artifacts.files.push_back({name, content_checksum(content)});
}

std::string render_trajectory(const Trajectory& traj) {
    std::ostringstream out;
    out << "# dyadic trajectory v1\n";
    out << "dim = " << traj.config.dim << '\n';
    out << "max_level = " << traj.config.max_level << '\n';
    out << "alpha = " << format_double(traj.params.alpha) << '\n';
    out << "dissipation = " << (traj.params.dissipation_enabled ? "true" : "false") << '\n';
    out << "convention = "
        << (traj.params.convention == Convention::conservative ? "conservative" : "paper-literal") << '\n';
    out << "coupling_scale = " << format_double(traj.params.coupling_scale) << '\n';
    out << "t_start = " << format_double(traj.t_start) << '\n';
    out << "t_end = " << format_double(traj.t_end) << '\n';
    out << "sobolev_beta = " << format_double(traj.sobolev_beta) << '\n';
    out << "blow_up = " << (traj.blow_up_flagged ? "true" : "false") << '\n';
    out << "blow_up_time = " << format_double(traj.blow_up_time) << '\n';
    out << "max_energy = " << format_double(traj.max_energy) << '\n';
    out << "accepted = " << traj.step_log.accepted << '\n';
    out << "rejected = " << traj.step_log.rejected << '\n';
    out << "snapshot_count = " << traj.snapshots.size() << '\n';
    for (const auto& [t, field] : traj.snapshots) {
        out << "snapshot " << format_double(t) << '\n';
        for (int j = 0; j <= traj.config.max_level; ++j) {
            const auto& lvl = field.level(j);
            for (std::size_t i = 0; i < lvl.size(); ++i) {
                if (i > 0) out << ' ';
                out << format_double(lvl[i]);
            }
            out << '\n';
        }
    }
    out << "integrals\n";
    for (int j = 0; j <= traj.config.max_level; ++j) {
        const auto& lvl = traj.sq_integrals[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < lvl.size(); ++i) {
            if (i > 0) out << ' ';
            out << format_double(lvl[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::string render_diagnostics_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,energy,dissipation_rate,sup_proxy\n";
    for (const auto& row : traj.diagnostics) {
        out << format_double(row.t) << ',' << format_double(row.energy) << ','
            << format_double(row.dissipation_rate) << ',' << format_double(row.sup_proxy) << '\n';
    }
    return out.str();
}

std::string render_spectrum_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,level,energy\n";
    for (const auto& [t, field] : traj.snapshots) {
        const std::vector<double> spectrum = level_spectrum(field);
        for (std::size_t j = 0; j < spectrum.size(); ++j) {
            out << format_double(t) << ',' << j << ',' << format_double(spectrum[j]) << '\n';
        }
    }
    return out.str();
}

std::string render_badcubes_csv(const BadCubeReport& report, const BoundCheckResult& check) {
    std::ostringstream out;
    out << "level,bad_count,bound\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        out << report.levels[i].level << ',' << report.levels[i].count << ','
            << format_double(check.levels[i].bound) << '\n';
    }
    return out.str();
}

RegularityParams regularity_params(const ExperimentConfig& config) {
    RegularityParams params;
    params.alpha = config.model.alpha;
    params.badness_constant = config.analysis.badness_constant;
    params.critical_constant = config.analysis.critical_constant;
    return params;
}

// Dimension fit restricted to the configured level window.
void apply_fit_window(BadCubeReport& report, const ExperimentConfig& config) {
    const int fit_min = config.analysis.fit_min_level;
    const int fit_max =
        config.analysis.fit_max_level < 0 ? config.lattice.max_level : config.analysis.fit_max_level;
    if (fit_min == 0 && fit_max == config.lattice.max_level) return;

    CubeFamilySequence seq;
    seq.first_level = fit_min;
    std::uint64_t total = 0;
    for (int j = fit_min; j <= fit_max; ++j) {
        seq.families.push_back(report.levels[static_cast<std::size_t>(j)].cubes);
        total += seq.families.back().size();
    }
    if (total == 0) {
        report.dimension_estimate = 0.0;
        return;
    }
    try {
        report.dimension_estimate = limsup_dimension_estimate(seq);
    } catch (const estimate_error&) {
        report.dimension_estimate = std::nullopt;
    }
}

void write_manifest(RunArtifacts& artifacts) {
    std::ostringstream out;
    out << "# dyadic run manifest v1\n";
    out << "version = " << kVersion << '\n';
    out << "config_hash = " << content_checksum(serialize_config(artifacts.config)) << '\n';
    out << "status = " << to_string(artifacts.status) << '\n';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", artifacts.wall_seconds);
    out << "wall_time_seconds = " << buf << '\n';
    for (const auto& entry : artifacts.files) {
        out << "file " << entry.name << ' ' << entry.checksum << '\n';
    }
    const std::filesystem::path path = artifacts.dir / "manifest.txt";
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    const std::string content = out.str();
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// Everything except the manifest, which the caller appends once its own
// extra files are in place.
RunArtifacts run_on_field(const ExperimentConfig& config, const CoefficientField& u0) {
    const auto wall_start = std::chrono::steady_clock::now();

    RunArtifacts artifacts;
    artifacts.config = config;
    artifacts.dir = config.output.dir;
    std::filesystem::create_directories(artifacts.dir);

    write_file(artifacts, "config.txt", serialize_config(config));

    const CascadeTable table = enumerate_cascades(config.lattice);
    IntegrateOptions options;
    options.snapshot_cadence = config.output.snapshot_cadence;
    options.blowup_ceiling = config.output.blowup_ceiling;
    options.sobolev_beta = config.analysis.sobolev_beta;

    try {
        artifacts.trajectory = integrate(u0, config.span, config.model, table, options);
        artifacts.status =
            artifacts.trajectory.blow_up_flagged ? RunStatus::blow_up : RunStatus::completed;
    } catch (const stiffness_error& e) {
        artifacts.status = RunStatus::stiffness_failure;
        artifacts.error_message = e.what();
        write_file(artifacts, "error.txt", std::string(e.what()) + "\n");
        artifacts.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        return artifacts;
    }

    artifacts.report = bad_cubes(artifacts.trajectory, regularity_params(config));
    apply_fit_window(artifacts.report, config);
    artifacts.bound_check = badcount_bound_check(artifacts.report, artifacts.report.energy_budget);

    write_file(artifacts, "trajectory.txt", render_trajectory(artifacts.trajectory));
    {
        std::ostringstream out;
        write_badcube_report(artifacts.report, artifacts.bound_check, out);
        write_file(artifacts, "badcubes.txt", out.str());
    }
    emit_plot_data(artifacts);

    artifacts.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return artifacts;
}

}  // namespace

int exit_code(RunStatus status) {
    switch (status) {
        case RunStatus::completed: return 0;
        case RunStatus::blow_up: return 2;
        case RunStatus::stiffness_failure: return 3;
    }
    return 1;
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::completed: return "completed";
        case RunStatus::blow_up: return "blow-up-flagged";
        case RunStatus::stiffness_failure: return "stiffness-failure";
    }
    return "unknown";
}

CoefficientField make_initial_field(const ExperimentConfig& config) {
    config.validate();
    CoefficientField u(config.lattice);
    if (config.init.kind == InitKind::single_cube) {
        u.at(config.init.cube) = config.init.amplitude;
        return u;
    }
    for (int j = 0; j <= config.lattice.max_level; ++j) {
        const double scale = config.init.amplitude * std::exp2(-config.init.smoothness * j);
        auto& lvl = u.level(j);
        for (std::size_t i = 0; i < lvl.size(); ++i) {
            const CubeId cube = cube_from_index(j, i, config.lattice);
            lvl[i] = scale * unit_symmetric(hash_cube(config.init.seed, cube));
        }
    }
    return u;
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
    config.validate();
    RunArtifacts artifacts = run_on_field(config, make_initial_field(config));
    write_manifest(artifacts);
    return artifacts;
}

void emit_plot_data(RunArtifacts& artifacts) {
    write_file(artifacts, "diagnostics.csv", render_diagnostics_csv(artifacts.trajectory));
    write_file(artifacts, "spectrum.csv", render_spectrum_csv(artifacts.trajectory));
    write_file(artifacts, "badcubes.csv", render_badcubes_csv(artifacts.report, artifacts.bound_check));
}

std::vector<RunArtifacts> run_alpha_sweep(const ExperimentConfig& base) {
    base.validate();
    static constexpr double kAlphas[] = {1.05, 1.1, 1.2, 1.3};

    std::vector<RunArtifacts> runs;
    std::ostringstream summary;
    summary << "alpha,t,energy,sup_proxy,sobolev_norm\n";
    for (double alpha : kAlphas) {
        ExperimentConfig config = base;
        config.model.alpha = alpha;
        char label[32];
        std::snprintf(label, sizeof(label), "alpha_%g", alpha);
        config.output.dir = (std::filesystem::path(base.output.dir) / label).string();
        runs.push_back(run_experiment(config));
        for (const auto& row : runs.back().trajectory.diagnostics) {
            summary << format_double(alpha) << ',' << format_double(row.t) << ','
                    << format_double(row.energy) << ',' << format_double(row.sup_proxy) << ','
                    << format_double(row.sobolev) << '\n';
        }
    }

    std::filesystem::create_directories(base.output.dir);
    const std::filesystem::path path = std::filesystem::path(base.output.dir) / "sweep_summary.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    const std::string content = summary.str();
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    return runs;
}

RunArtifacts run_dispersion(const ExperimentConfig& base) {
    base.validate();
    if (base.lattice.max_level < 2) {
        throw config_error("key `lattice.max_level`: dispersion preset needs max_level >= 2");
    }

    // Root and its first child excited: the smallest configuration in which
    // the grandchild generation receives energy through the cascade.
    CoefficientField u0(base.lattice);
    const CubeId root{0, {0, 0, 0}};
    const CubeId child{1, {0, 0, 0}};
    u0.at(root) = base.init.amplitude;
    u0.at(child) = base.init.amplitude;

    RunArtifacts artifacts = run_on_field(base, u0);
    if (artifacts.status == RunStatus::stiffness_failure) {
        write_manifest(artifacts);
        return artifacts;
    }

    const std::vector<CubeId> receivers = children(child, base.lattice);
    std::ostringstream out;
    out << "t";
    for (std::size_t g = 0; g < receivers.size(); ++g) out << ",share_" << g;
    out << ",receiver_energy\n";
    for (const auto& [t, field] : artifacts.trajectory.snapshots) {
        CompensatedSum total;
        std::vector<double> energies;
        energies.reserve(receivers.size());
        for (const CubeId& g : receivers) {
            const double e = field.at(g) * field.at(g);
            energies.push_back(e);
            total.add(e);
        }
        const double sum = total.value();
        out << format_double(t);
        for (double e : energies) {
            out << ',' << format_double(sum > 0.0 ? e / sum : 0.0);
        }
        out << ',' << format_double(sum) << '\n';
    }
    write_file(artifacts, "dispersion.csv", out.str());
    write_manifest(artifacts);
    return artifacts;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    const std::string content = render_trajectory(traj);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

namespace {

class TrajectoryReader {
public:
    explicit TrajectoryReader(const std::filesystem::path& path) : in_(path), path_(path.string()) {
        if (!in_) {
            throw std::runtime_error("cannot open trajectory file: " + path_);
        }
    }

    std::string next_line() {
        std::string line;
        while (std::getline(in_, line)) {
            if (!line.empty() && line[0] == '#') continue;
            return line;
        }
        throw std::runtime_error("unexpected end of trajectory file: " + path_);
    }

    std::string expect_key(const std::string& key) {
        const std::string line = next_line();
        const std::string prefix = key + " = ";
        if (line.rfind(prefix, 0) != 0) {
            throw std::runtime_error("trajectory file " + path_ + ": expected `" + key + " = ...`, got `" +
                                     line + "`");
        }
        return line.substr(prefix.size());
    }

    std::vector<double> read_row(std::size_t expected) {
        std::istringstream row(next_line());
        std::vector<double> values;
        values.reserve(expected);
        double x = 0.0;
        while (row >> x) values.push_back(x);
        if (values.size() != expected) {
            throw std::runtime_error("trajectory file " + path_ + ": expected " + std::to_string(expected) +
                                     " values per row, got " + std::to_string(values.size()));
        }
        return values;
    }

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace

Trajectory read_trajectory(const std::filesystem::path& path) {
    TrajectoryReader reader(path);
    Trajectory traj;

    traj.config.dim = std::stoi(reader.expect_key("dim"));
    traj.config.max_level = std::stoi(reader.expect_key("max_level"));
    traj.config.validate();
    traj.params.alpha = std::stod(reader.expect_key("alpha"));
    traj.params.dissipation_enabled = reader.expect_key("dissipation") == "true";
    traj.params.convention = reader.expect_key("convention") == "paper-literal"
                                 ? Convention::paper_literal
                                 : Convention::conservative;
    traj.params.coupling_scale = std::stod(reader.expect_key("coupling_scale"));
    traj.t_start = std::stod(reader.expect_key("t_start"));
    traj.t_end = std::stod(reader.expect_key("t_end"));
    traj.sobolev_beta = std::stod(reader.expect_key("sobolev_beta"));
    traj.blow_up_flagged = reader.expect_key("blow_up") == "true";
    traj.blow_up_time = std::stod(reader.expect_key("blow_up_time"));
    traj.max_energy = std::stod(reader.expect_key("max_energy"));
    traj.step_log.accepted = std::stoull(reader.expect_key("accepted"));
    traj.step_log.rejected = std::stoull(reader.expect_key("rejected"));
    const std::size_t snapshot_count = std::stoull(reader.expect_key("snapshot_count"));

    for (std::size_t s = 0; s < snapshot_count; ++s) {
        const std::string line = reader.next_line();
        if (line.rfind("snapshot ", 0) != 0) {
            throw std::runtime_error("trajectory file " + path.string() + ": expected snapshot header");
        }
        const double t = std::stod(line.substr(9));
        CoefficientField field(traj.config);
        for (int j = 0; j <= traj.config.max_level; ++j) {
            field.level(j) = reader.read_row(traj.config.cubes_at_level(j));
        }
        traj.snapshots.emplace_back(t, std::move(field));
    }

    if (reader.next_line() != "integrals") {
        throw std::runtime_error("trajectory file " + path.string() + ": expected integrals section");
    }
    traj.sq_integrals.resize(static_cast<std::size_t>(traj.config.max_level) + 1);
    for (int j = 0; j <= traj.config.max_level; ++j) {
        traj.sq_integrals[static_cast<std::size_t>(j)] = reader.read_row(traj.config.cubes_at_level(j));
    }
    return traj;
}

}  // namespace dyadic
