#pragma once

// Time integration on the flat periodic torus.
//
// Kinematic SDE:   d eta = eta_dot dt + 1/2 sum_i advect(sigma_i, eta) o dW_i
// Shell SPDE:      eps0 rho_s d eta_dot = -(nu_e eta + alpha Lap^2 eta - beta Lap eta - f) dt
//                                        + eps0 rho_s sum_i transport(sigma_i, eta_dot) o dW_i
// with f = g.n + g. The shell step is Strang split: a stochastic half step
// with the first half of the increments, the exact modal flow over dt, and a
// stochastic half step with the second half.

#include "koiter/elasticity.hpp"
#include "koiter/field.hpp"
#include "koiter/spectral.hpp"
#include "koiter/stochastic.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace koiter {

enum class ModeKind { Oscillatory, Neutral, Unstable };
const char* to_string(ModeKind kind) noexcept;

struct ModeClassification {
    Vec2 k = Vec2::Zero();
    double symbol = 0.0; ///< nu_e + beta |k|^2 + alpha |k|^4
    ModeKind kind = ModeKind::Neutral;
    double rate = 0.0; ///< omega if oscillatory, lambda if unstable, 0 if neutral
};

/// |symbol| <= 1e-14 counts as neutral.
ModeClassification dispersion(const ShellParams& params, const Vec2& k);

/// Exact flow over dt of (eta_k, eta_dot_k) under eta_k'' = -(symbol / (eps0 rho_s)) eta_k.
Eigen::Matrix2d linear_propagator(const ShellParams& params, const Vec2& k, double dt);

struct ShellState {
    ScalarField eta;
    ScalarField eta_dot;
    double t = 0.0;
};

/// Heun on the frozen-increment flow d eta/ds = B eta amplifies a mode whose
/// per-step phase is theta by sqrt(1 + theta^4/4). A step whose largest phase
/// (over the filtered band) exceeds transport_theta_max is applied as n equal
/// Heun substeps of the same increment, n = ceil(theta / transport_theta_max).
inline constexpr double transport_theta_max = 0.25;
int transport_substeps(double theta) noexcept;

/// One Heun step of the kinematic SDE with the given increments (one per
/// noise field). eta_dot_source may be empty, meaning zero drift.
ScalarField step_kinematic_sde(const ScalarField& eta, const ScalarField& eta_dot_source, const NoiseModel& model,
                               const std::vector<double>& dw, double dt, const SpectralGrid& grid);
/// Same with the increments of (model seed, path, step).
ScalarField step_kinematic_sde(const ScalarField& eta, const ScalarField& eta_dot_source, const NoiseModel& model,
                               std::uint64_t path, std::uint64_t step, double dt, const SpectralGrid& grid);

/// Strang-split stepper for the shell SPDE with the per-mode propagators
/// cached for a fixed (params, grid, dt).
class ShellStepper {
public:
    /// `forcing` is f = g.n + g on the grid (empty for zero).
    ShellStepper(const ShellParams& params, const SpectralGrid& grid, double dt, ScalarField forcing = {});

    double dt() const noexcept { return dt_; }
    const SpectralGrid& grid() const noexcept { return grid_; }
    /// Largest lambda dt over the unstable modes of the grid (0 if none).
    double max_growth_per_step() const noexcept { return max_growth_; }
    /// Set when max_growth_per_step() > 0.5; the step remains usable.
    bool stability_warning() const noexcept { return max_growth_ > 0.5; }
    std::string stability_message() const;

    ShellState step(const ShellState& s, const NoiseModel& model, const IncrementBlock& inc) const;
    ShellState step(const ShellState& s, const NoiseModel& model, std::uint64_t path, std::uint64_t step) const;

    /// Stage (a) or (c) alone: Heun on (eta, eta_dot) with the given half
    /// increments, substepped as in step_kinematic_sde.
    void stochastic_substep(ShellState& s, const NoiseModel& model, const std::vector<double>& dw) const;
    /// Stage (b) alone: exact modal flow over dt.
    void deterministic_substep(ShellState& s) const;

private:
    ShellParams params_;
    SpectralGrid grid_;
    double dt_;
    ScalarField forcing_;
    std::vector<Eigen::Matrix2d> propagators_; // one per half-spectrum mode
    double max_growth_ = 0.0;
    double band_radius_ = 0.0;
};

/// Convenience single step; builds a stepper each call.
ShellState step_shell_spde(const ShellState& s, const ShellParams& params, const NoiseModel& model, std::uint64_t path,
                           std::uint64_t step, double dt, const SpectralGrid& grid, const ScalarField& forcing = {});

/// Per-mode quadratic invariant eps0 rho_s |eta_dot_k|^2 + symbol |eta_k|^2 of
/// every half-spectrum mode (unnormalized transform coefficients).
std::vector<double> modal_invariants(const ShellState& s, const ShellParams& params, const SpectralGrid& grid);

} // namespace koiter
