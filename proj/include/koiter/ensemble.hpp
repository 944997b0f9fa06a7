#pragma once

// Monte Carlo over noise paths. Paths run on worker threads but are reduced
// one at a time in path-index order, so the statistics depend only on
// (config, master_seed, path range) and never on scheduling.

#include "koiter/config.hpp"
#include "koiter/field.hpp"
#include "koiter/simulation.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace koiter {

inline constexpr std::array<double, 5> quantile_levels{0.05, 0.25, 0.50, 0.75, 0.95};

struct PathSummary {
    std::uint64_t path = 0;
    double max_abs_eta = 0.0; ///< sup of |eta|_inf over every recorded state
    DiagnosticRow final;
    std::vector<double> snapshot_energy; ///< E_total at each snapshot
};

/// Streaming mean and centred second moment of one snapshot field.
struct FieldMoments {
    double t = 0.0;
    ScalarField mean;
    ScalarField m2;
    ScalarField variance(std::uint64_t n) const; ///< m2 / (n - 1), zero for n < 2
};

struct EnsembleStats {
    std::uint64_t first_path = 0;
    std::uint64_t n_paths = 0;
    std::vector<FieldMoments> snapshots;
    std::vector<double> thresholds;
    std::vector<std::uint64_t> exceedance_counts;
    std::vector<PathSummary> per_path;

    /// Type-7 quantiles of E_total at snapshot k over the paths so far.
    std::array<double, 5> energy_quantiles(std::size_t k) const;
    friend bool operator==(const EnsembleStats&, const EnsembleStats&);
};

struct EnsembleOptions {
    std::size_t workers = 1;
    std::uint64_t first_path = 0;
    /// Continue the accumulation of a previous run whose paths end at first_path.
    const EnsembleStats* resume = nullptr;
    /// Called on the reducing thread after each path is merged.
    std::function<void(const PathSummary&)> on_path;
};

/// Runs paths [first_path, first_path + n_paths). Throws PathError carrying
/// the lowest failing path index.
EnsembleStats run_ensemble(const Config& config, std::uint64_t n_paths, const EnsembleOptions& options = {});
EnsembleStats run_ensemble(const Problem& problem, std::uint64_t n_paths, const EnsembleOptions& options = {});

struct Interval {
    double p_hat = 0.0;
    double low = 0.0;
    double high = 0.0;
};
/// Wilson score interval for count successes out of n.
Interval wilson_interval(std::uint64_t count, std::uint64_t n, double z = 1.959963984540054);
/// Fraction of paths whose max |eta|_inf exceeds the threshold, with a 95% Wilson interval.
Interval exceedance_probability(const EnsembleStats& stats, double threshold);

struct GrowthFit {
    double lambda = 0.0;
    double r2 = 0.0;
    std::size_t samples = 0;
};
/// Least-squares slope of log |eta|_2 against t over samples with t in [t0, t1].
/// Throws DegenerateWindow for fewer than 10 samples or non-positive or
/// non-finite norms in the window.
GrowthFit estimate_growth_rate(const std::vector<std::pair<double, double>>& series, double t0, double t1);

/// Type-7 (linear interpolation) sample quantile; p in [0, 1].
double quantile(std::vector<double> values, double p);

/// Writes ensemble_summary.csv (one row per path), ensemble_report.json,
/// mean_NNN.ksh and var_NNN.ksh per snapshot, and manifest.json. Returns the
/// files written, relative to dir.
std::vector<std::filesystem::path> write_ensemble_outputs(const EnsembleStats& stats, const Config& config,
                                                          const std::filesystem::path& dir);

} // namespace koiter
