#pragma once

// Run configuration in a flat key = value format.
//
//   # comment
//   preset = figure3            (optional; applied before the other keys)
//   equation = sde | shell
//   chart = flat
//   output_dir = out
//   master_seed = 0
//   grid.n1, grid.n2            powers of two, >= 8
//   grid.ly1, grid.ly2          periods (numbers may be written as 4pi, 0.5*pi, ...)
//   grid.origin1, grid.origin2  coordinates of node (0, 0)
//   params.eps0 params.rho_s params.lambda_e params.mu_e params.nu_e
//   params.alpha params.beta params.g_vec params.g_scal params.disp_bound_L
//   noise.fields                noise registry spec, e.g. figure3 or none
//   time.dt, time.t_end         t_end must be a whole number of steps
//   time.snapshots              comma list of times in [0, t_end], increasing
//   time.diag_every             diagnostics cadence in steps
//   initial.eta, initial.eta_dot   scalar field specs; for the SDE eta_dot is
//                                  the prescribed drift
//   ensemble.n_paths, ensemble.workers
//   ensemble.thresholds         comma list of buckling thresholds on |eta|_inf
//
// Unknown or repeated keys are rejected with the line number.

#include "koiter/elasticity.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace koiter {

enum class Equation { Sde, Shell };

struct GridConfig {
    std::size_t n1 = 64;
    std::size_t n2 = 64;
    double ly1 = 6.283185307179586;
    double ly2 = 6.283185307179586;
    double origin1 = 0.0;
    double origin2 = 0.0;
    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct TimeConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    std::vector<double> snapshots;
    std::size_t diag_every = 10;
    friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

struct InitialConfig {
    std::string eta = "random:1,4,0.01";
    std::string eta_dot = "zero";
    friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct EnsembleConfig {
    std::size_t n_paths = 16;
    std::size_t workers = 1;
    std::vector<double> thresholds{0.5, 1.0};
    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

struct Config {
    Equation equation = Equation::Shell;
    std::string chart = "flat";
    GridConfig grid;
    ShellParams params;
    std::string noise = "none";
    TimeConfig time;
    InitialConfig initial;
    EnsembleConfig ensemble;
    std::string output_dir = "out";
    std::uint64_t master_seed = 0;

    /// Number of steps to t_end, and the step index of each snapshot.
    std::uint64_t n_steps() const;
    std::vector<std::uint64_t> snapshot_steps() const;

    friend bool operator==(const Config&, const Config&) = default;
};

/// Throws ParseError (with line) for syntax errors and unknown keys, and
/// ValidationError for violated constraints.
Config parse_config(const std::string& text);
Config figure3_preset();
/// Throws ValidationError naming the first violated constraint.
void validate(const Config& c);
/// Every key, one per line, in a form parse_config reads back identically.
std::string serialize_config(const Config& c);
/// FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const Config& c);
std::vector<std::string> config_keys();

const char* to_string(Equation e) noexcept;

} // namespace koiter
