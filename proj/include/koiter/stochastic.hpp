#pragma once

// Transport noise: prescribed vector fields sigma_i, reproducible Brownian
// increments, the transport operators, and a characteristics oracle.
//
// Operators are assembled in skew form so that the discrete transport
// operator is exactly skew-adjoint in the grid inner product:
//   L0 v        = 1/2 (sigma . D v + D . (sigma v))
//   transport   = P L0 P                       ~ sigma . grad v + 1/2 v div sigma
//   advect      = P (L0 - 1/2 div sigma) P     ~ sigma . grad v
// with D the spectral derivative and P the 2/3-rule filter. Both are linear in
// sigma, so a step's noise is applied once through sigma_eff = sum dw_i sigma_i.

#include "koiter/field.hpp"
#include "koiter/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace koiter {

/// One prescribed noise field with its spectral divergence.
struct NoiseField {
    std::string id;
    VectorField sigma;
    ScalarField div;
};

class NoiseModel {
public:
    NoiseModel() = default;
    NoiseModel(std::string spec, std::vector<NoiseField> fields, std::uint64_t master_seed);

    const std::string& spec() const noexcept { return spec_; }
    std::size_t n_fields() const noexcept { return fields_.size(); }
    const NoiseField& field(std::size_t i) const { return fields_[i]; }
    std::uint64_t master_seed() const noexcept { return master_seed_; }

private:
    std::string spec_ = "none";
    std::vector<NoiseField> fields_;
    std::uint64_t master_seed_ = 0;
};

/// Registry ids, joined by ';' for several fields:
///   none | figure3 | divfree:k1 | const:cx,cy | grid:<path x>,<path y>
/// figure3 expands to sigma_1 = 2 (sin y1, -cos y2), sigma_2 = 2 (-cos y1, sin y2).
/// Throws BadFieldSpec for unknown ids, non-periodic or non-finite fields.
NoiseModel make_noise_model(const std::string& spec, const SpectralGrid& grid, std::uint64_t master_seed);
/// Syntax check only.
void check_noise_spec(const std::string& spec);

/// Increments of one step. dw_first and dw_second are independent halves
/// (variance dt/2 each); dw = dw_first + dw_second has variance dt.
struct IncrementBlock {
    std::uint64_t path = 0;
    std::uint64_t step = 0;
    std::vector<double> dw_first;
    std::vector<double> dw_second;
    std::vector<double> dw;
};

/// Pure function of (master_seed, path, step, field index, dt).
IncrementBlock sample_increments(const NoiseModel& model, std::uint64_t path, std::uint64_t step, double dt);

/// sum_i c_i sigma_i and its divergence.
struct EffectiveField {
    VectorField sigma;
    ScalarField div;
};
EffectiveField combine(const NoiseModel& model, const std::vector<double>& coeff, const SpectralGrid& grid);

ScalarField transport_operator(const VectorField& sigma, const ScalarField& v, const SpectralGrid& grid);
/// Needs the divergence of sigma; the short form computes it spectrally.
ScalarField advect(const VectorField& sigma, const ScalarField& div_sigma, const ScalarField& v, const SpectralGrid& grid);
ScalarField advect(const VectorField& sigma, const ScalarField& v, const SpectralGrid& grid);

/// Periodic tensor-product cubic Lagrange interpolation; `pos` is measured in
/// grid cells from node (0, 0).
double interpolate_cubic(const ScalarField& f, double pos1, double pos2);

/// Pure-transport solution eta0 o Phi evaluated at every node, where Phi
/// composes the per-step flows of dX = 1/2 sigma_eff(X) ds in reverse step
/// order. Each flow uses `substeps` Heun steps; sigma and eta0 are interpolated
/// with periodic cubics.
ScalarField characteristics_oracle(const ScalarField& eta0, const NoiseModel& model, std::uint64_t path, double dt,
                                   std::uint64_t n_steps, const SpectralGrid& grid, int substeps = 4);
/// Same with explicit per-step increments dw[step][field].
ScalarField characteristics_oracle(const ScalarField& eta0, const NoiseModel& model,
                                   const std::vector<std::vector<double>>& dw, const SpectralGrid& grid,
                                   int substeps = 4);

} // namespace koiter
