#pragma once

// Shell elasticity tensor and the Koiter energy functionals.
//
// Integrals use the rectangle rule on the periodic grid against
// dy_n = w dy; derivatives of eta are taken spectrally.

#include "koiter/field.hpp"
#include "koiter/geometry.hpp"
#include "koiter/spectral.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace koiter {

struct ShellParams {
    double eps0 = 1.0;     ///< half thickness
    double rho_s = 1.0;    ///< mass density per unit area
    double lambda_e = 1.0; ///< Lame constants
    double mu_e = 1.0;
    double nu_e = 1.0;  ///< simplified membrane stiffness, any sign
    double alpha = 1.0; ///< bending coefficient, > 0
    double beta = 1.0;  ///< membrane stress coefficient, any sign
    std::string g_vec = "zero";  ///< interior force, 3-vector field spec
    std::string g_scal = "zero"; ///< surface force, scalar field spec
    double disp_bound_L = 1.0;   ///< small-displacement bound on |grad eta|_inf

    /// Throws ValidationError naming the first violated constraint.
    void validate() const;
    double mass() const noexcept { return eps0 * rho_s; }
    friend bool operator==(const ShellParams&, const ShellParams&) = default;
};

/// Load fields sampled on a grid.
struct Load {
    std::array<ScalarField, 3> g_vec;
    ScalarField g_scal;
};
Load resolve_load(const ShellParams& params, const SpectralGrid& grid);
/// g.n + g at every node.
ScalarField normal_forcing(const Chart& chart, const Load& load, const SpectralGrid& grid);
/// Same on the flat torus (n = e3).
ScalarField normal_forcing(const Load& load);

/// Contravariant components C^ijkl, indices in {0, 1}.
struct ElasticityTensor {
    std::array<double, 16> c{};

    double operator()(int i, int j, int k, int l) const noexcept { return c[static_cast<std::size_t>(8 * i + 4 * j + 2 * k + l)]; }
    /// C^ijkl a_kl b_ij
    double contract(const SymTensor2& a, const SymTensor2& b) const noexcept;
};

ElasticityTensor elasticity_tensor(const Frame& frame, const ShellParams& params);

struct EnergyBreakdown {
    double k_m = 0.0;
    double k_f = 0.0;
    double load = 0.0;
    double kinetic = 0.0;
    double total = 0.0; ///< k_m + k_f - load
    double grad_inf = 0.0;
    bool small_displacement_violated = false;
};

/// Per-node reference geometry and elasticity tensor, reused across energy
/// evaluations on the same (chart, grid, params).
class SurfaceSampling {
public:
    SurfaceSampling(const Chart& chart, const SpectralGrid& grid, const ShellParams& params);

    const SurfacePoint& point(std::size_t k) const { return points_[k]; }
    const ElasticityTensor& tensor(std::size_t k) const { return tensors_[k]; }
    const ScalarField& weight() const noexcept { return weight_; }
    const ScalarField& forcing() const noexcept { return forcing_; }

private:
    std::vector<SurfacePoint> points_;
    std::vector<ElasticityTensor> tensors_;
    ScalarField weight_;
    ScalarField forcing_;
};

EnergyBreakdown nonlinear_energy(const SurfaceSampling& s, const ScalarField& eta, const ScalarField& eta_dot,
                                 const ShellParams& params, const SpectralGrid& grid);
EnergyBreakdown nonlinear_energy(const Chart& chart, const ScalarField& eta, const ScalarField& eta_dot,
                                 const ShellParams& params, const SpectralGrid& grid);
EnergyBreakdown linear_energy(const SurfaceSampling& s, const ScalarField& eta, const ScalarField& eta_dot,
                              const ShellParams& params, const SpectralGrid& grid);
EnergyBreakdown linear_energy(const Chart& chart, const ScalarField& eta, const ScalarField& eta_dot,
                              const ShellParams& params, const SpectralGrid& grid);

/// Flat-torus model (w = 1): k_m = nu/2 int eta^2, k_f = 1/2 int (alpha (Lap eta)^2 + beta |grad eta|^2).
/// `forcing` is g.n + g; pass an empty field for no load.
EnergyBreakdown simplified_energy(const ScalarField& eta, const ScalarField& eta_dot, const ShellParams& params,
                                  const SpectralGrid& grid, const ScalarField& forcing = {});
/// nu eta + alpha Lap^2 eta - beta Lap eta.
ScalarField simplified_force(const ScalarField& eta, const ShellParams& params, const SpectralGrid& grid);

enum class Functional { Km, Kf, KmLin, KfLin, KmS, KfS, Load };

/// Central difference in the direction with Richardson extrapolation over
/// tau in {1e-4, 5e-5}. Throws NonFiniteEnergy.
double gateaux_derivative(Functional f, const SurfaceSampling& s, const ScalarField& eta, const ScalarField& direction,
                          const ShellParams& params, const SpectralGrid& grid);
double gateaux_derivative(Functional f, const Chart& chart, const ScalarField& eta, const ScalarField& direction,
                          const ShellParams& params, const SpectralGrid& grid);

/// Evaluates one functional (used by the Gateaux oracle).
double evaluate_functional(Functional f, const SurfaceSampling& s, const ScalarField& eta, const ShellParams& params,
                           const SpectralGrid& grid);

/// Smallest Rayleigh quotient K_m^lin(eta) / int eta^2 dy_n over random smooth
/// fields: an upper estimate of the membrane coercivity constant. Reported only.
double estimate_membrane_coercivity(const Chart& chart, const ShellParams& params, const SpectralGrid& grid,
                                    int samples, std::uint64_t seed);

} // namespace koiter
