#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/dynamics.hpp"
#include "dyadic/field.hpp"
#include "dyadic/integrator.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/regularity.hpp"

namespace dyadic {

inline constexpr const char* kVersion = "0.1.0";

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitKind {
    single_cube,
    smooth_random,
};

struct InitialConditionSpec {
    InitKind kind = InitKind::smooth_random;
    double amplitude = 1.0;
    double smoothness = 2.0;  // s in u_Q(0) = A 2^{-s j} xi_Q
    std::uint64_t seed = 0;
    CubeId cube;  // target for single-cube mode, defaults to the root
};

struct AnalysisSpec {
    double badness_constant = 1.0;
    double critical_constant = 1.0;
    int fit_min_level = 0;
    int fit_max_level = -1;  // -1: use the lattice max level
    double sobolev_beta = 1.0;
};

struct OutputSpec {
    std::string dir = "out";
    std::uint64_t snapshot_cadence = 10;
    double blowup_ceiling = 1e8;
};

struct ExperimentConfig {
    LatticeConfig lattice;
    ModelParams model;
    IntegrationSpan span;
    InitialConditionSpec init;
    AnalysisSpec analysis;
    OutputSpec output;

    void validate() const;  // throws config_error naming the offending key
};

/// Parses the documented key-value format (one `section.key = value` per
/// line, `#` comments). Unknown keys are rejected; missing required keys and
/// out-of-range values raise config_error with the key path.
ExperimentConfig parse_config(const std::string& text);

/// Canonical text form; parse(serialize(parse(x))) == parse(x).
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64 over bytes, as a 16-digit hex string.
std::string content_checksum(const std::string& bytes);

/// Deterministic initial data. smooth-random draws xi_Q uniform in [-1,1]
/// from a counter-based stream keyed by (seed, cube), so the field does not
/// depend on traversal order or lattice depth.
CoefficientField make_initial_field(const ExperimentConfig& config);

enum class RunStatus {
    completed,
    blow_up,
    stiffness_failure,
};

int exit_code(RunStatus status);  // 0 / 2 / 3
const char* to_string(RunStatus status);

struct ManifestEntry {
    std::string name;
    std::string checksum;
};

struct RunArtifacts {
    std::filesystem::path dir;
    ExperimentConfig config;
    RunStatus status = RunStatus::completed;
    std::string error_message;
    Trajectory trajectory;
    BadCubeReport report;
    BoundCheckResult bound_check;
    std::vector<ManifestEntry> files;
    double wall_seconds = 0.0;
};

/// Integrates, analyzes, and persists one run under config.output.dir:
/// config.txt, trajectory.txt, diagnostics.csv, spectrum.csv, badcubes.txt,
/// badcubes.csv, manifest.txt. Never throws for blow-up or stiffness; those
/// come back in the status.
RunArtifacts run_experiment(const ExperimentConfig& config);

/// Plain columnar plot files (diagnostics.csv, spectrum.csv, badcubes.csv)
/// into artifacts.dir; appends manifest entries for what it wrote.
void emit_plot_data(RunArtifacts& artifacts);

/// Comparison preset over alpha in {1.05, 1.1, 1.2, 1.3}: one run each under
/// a per-alpha subdirectory plus a combined sweep_summary.csv.
std::vector<RunArtifacts> run_alpha_sweep(const ExperimentConfig& base);

/// Two-cube seed (root plus its first child); tracks how the energy arriving
/// at the grandchild generation splits between the 2^d receivers over time.
/// Writes dispersion.csv. Requires max_level >= 2.
RunArtifacts run_dispersion(const ExperimentConfig& base);

/// Text persistence for trajectories (exact double round-trip). Diagnostics
/// series are not stored; snapshots, integrals, and metadata are.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace dyadic
