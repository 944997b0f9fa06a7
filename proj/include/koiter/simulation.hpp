#pragma once

// Single-path driver: builds the problem from a Config, advances it, records
// diagnostics and snapshots, and writes the run's artifacts.

#include "koiter/config.hpp"
#include "koiter/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace koiter {

/// Everything a path needs, resolved once and shared read-only by workers.
struct Problem {
    Config config;
    SpectralGrid grid;
    NoiseModel noise;
    ScalarField forcing; ///< g.n + g on the flat torus
    ShellState initial;  ///< for the SDE, eta_dot is the prescribed drift
    std::optional<ShellStepper> stepper;
    std::uint64_t n_steps = 0;
    std::vector<std::uint64_t> snapshot_steps;
};

/// Validates the config and resolves every field. Throws InputError subclasses.
Problem make_problem(const Config& config);

struct DiagnosticRow {
    double t = 0.0;
    double e_kin = 0.0;
    double e_mem = 0.0;
    double e_flex = 0.0;
    double e_total = 0.0; ///< e_kin + e_mem + e_flex - load
    double eta_min = 0.0;
    double eta_max = 0.0;
    double eta_l2 = 0.0;
    double etadot_l2 = 0.0;
    double grad_inf = 0.0;
    bool small_displacement_violated = false;
};
inline constexpr const char* diagnostics_header = "t,E_kin,E_mem,E_flex,E_total,eta_min,eta_max,eta_l2,etadot_l2,grad_inf";
std::string format_row(const DiagnosticRow& row);
DiagnosticRow diagnose(const Problem& p, const ShellState& s);

struct Snapshot {
    std::uint64_t step = 0;
    ShellState state;
};

struct PathObserver {
    std::function<void(const DiagnosticRow&)> on_diagnostic;
    std::function<void(const Snapshot&)> on_snapshot;
};

struct PathResult {
    std::uint64_t path = 0;
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticRow> diagnostics;
    ShellState final_state;
    std::vector<std::string> warnings;
};

/// Advances one noise path to t_end. Diagnostics are taken at step 0, every
/// diag_every steps and at the last step.
PathResult run_path(const Problem& p, std::uint64_t path, const PathObserver* observer = nullptr);

struct RunArtifacts {
    std::vector<std::filesystem::path> files; ///< relative to the output directory
    PathResult result;
};

/// simulate: runs path 0 and writes config.txt, diagnostics.csv (flushed row by
/// row), eta_NNN.ksh (and eta_dot_NNN.ksh for the shell) per snapshot, and
/// manifest.json. Warnings go to `log` when given. On a stepper error the
/// partial outputs and a manifest marked "failed" are written, then the error
/// is rethrown.
RunArtifacts run_simulation(const Config& config, const std::filesystem::path& output_dir, std::ostream* log = nullptr);

/// Writes manifest.json listing each file with its size and FNV-1a hash.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const Config& config,
                    const std::vector<std::filesystem::path>& files, const std::string& status);

} // namespace koiter
