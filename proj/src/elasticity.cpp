#include "koiter/elasticity.hpp"

#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace koiter {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

struct Jets {
    VectorField grad;
    Hessian hess;
};

Jets jets_of(const ScalarField& eta, const SpectralGrid& grid)
{
    return {gradient(eta, grid), hessian(eta, grid)};
}

DisplacementJet jet_at(const ScalarField& eta, const Jets& j, std::size_t k)
{
    DisplacementJet d;
    d.eta = eta[k];
    d.grad_eta = Vec2(j.grad.x[k], j.grad.y[k]);
    d.hess_eta = {j.hess.d11[k], j.hess.d12[k], j.hess.d22[k]};
    return d;
}

double grad_sup(const Jets& j)
{
    double m = 0.0;
    for (std::size_t k = 0; k < j.grad.x.size(); ++k)
        m = std::max(m, std::hypot(j.grad.x[k], j.grad.y[k]));
    return m;
}

double weighted_sum(const ScalarField& f, const ScalarField& w, const SpectralGrid& grid)
{
    return node_dot(f, w) * grid.cell_area();
}

void finish(EnergyBreakdown& e, const ShellParams& params)
{
    e.total = e.k_m + e.k_f - e.load;
    e.small_displacement_violated = e.grad_inf > params.disp_bound_L;
}

enum class Tensors { Nonlinear, Linear };

EnergyBreakdown koiter_energy(Tensors kind, const SurfaceSampling& s, const ScalarField& eta, const ScalarField& eta_dot,
                              const ShellParams& params, const SpectralGrid& grid)
{
    if (!grid.matches(eta) || !grid.matches(eta_dot)) throw ValidationError("energy fields do not match the grid");
    const Jets j = jets_of(eta, grid);
    const double e0 = params.eps0;
    ScalarField membrane = grid.zeros();
    ScalarField flexural = grid.zeros();
    for (std::size_t k = 0; k < eta.size(); ++k) {
        const SurfacePoint& p = s.point(k);
        const ElasticityTensor& C = s.tensor(k);
        const DisplacementJet jet = jet_at(eta, j, k);
        const NormalDisplacementDerivatives d = normal_displacement_derivatives(p, jet);
        SymTensor2 G, R;
        if (kind == Tensors::Nonlinear) {
            G = change_of_metric(p, jet);
            R = modified_change_of_curvature(p, d);
        } else {
            G = linearized_change_of_metric(p, jet.eta);
            R = linearized_change_of_curvature(p, d);
        }
        membrane[k] = 0.5 * e0 * C.contract(G, G);
        flexural[k] = (e0 * e0 * e0 / 6.0) * C.contract(R, R);
    }
    EnergyBreakdown e;
    const ScalarField& w = s.weight();
    e.k_m = weighted_sum(membrane, w, grid);
    e.k_f = weighted_sum(flexural, w, grid);
    ScalarField fe = s.forcing();
    for (std::size_t k = 0; k < fe.size(); ++k) fe[k] *= eta[k];
    e.load = weighted_sum(fe, w, grid);
    ScalarField kin = eta_dot;
    for (auto& v : kin.values()) v *= v;
    e.kinetic = 0.5 * params.mass() * weighted_sum(kin, w, grid);
    e.grad_inf = grad_sup(j);
    finish(e, params);
    if (!std::isfinite(e.total) || !std::isfinite(e.kinetic)) throw NonFiniteEnergy("energy evaluation is not finite");
    return e;
}

} // namespace

void ShellParams::validate() const
{
    require(eps0 > 0.0, "eps0 must be > 0");
    require(rho_s > 0.0, "rho_s must be > 0");
    require(alpha > 0.0, "alpha must be > 0");
    require(mu_e > 0.0, "Lame constraint violated: mu_e must be > 0");
    require(3.0 * lambda_e + 2.0 * mu_e > 0.0, "Lame constraint violated: 3*lambda_e + 2*mu_e must be > 0");
    require(std::isfinite(nu_e) && std::isfinite(beta), "nu_e and beta must be finite");
    require(disp_bound_L > 0.0, "disp_bound_L must be > 0");
    try {
        check_vector3_spec(g_vec);
        check_scalar_spec(g_scal);
    } catch (const BadFieldSpec& e) {
        throw ValidationError(std::string("load field: ") + e.what());
    }
}

Load resolve_load(const ShellParams& params, const SpectralGrid& grid)
{
    return {make_vector3_field(params.g_vec, grid), make_scalar_field(params.g_scal, grid)};
}

ScalarField normal_forcing(const Chart& chart, const Load& load, const SpectralGrid& grid)
{
    ScalarField f = load.g_scal;
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2(); ++j) {
            const Vec3 n = evaluate_frame(chart, grid.node(i, j)).n;
            f(i, j) += load.g_vec[0](i, j) * n[0] + load.g_vec[1](i, j) * n[1] + load.g_vec[2](i, j) * n[2];
        }
    return f;
}

ScalarField normal_forcing(const Load& load) { return load.g_scal + load.g_vec[2]; }

double ElasticityTensor::contract(const SymTensor2& a, const SymTensor2& b) const noexcept
{
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) s += (*this)(i, j, k, l) * a(k, l) * b(i, j);
    return s;
}

ElasticityTensor elasticity_tensor(const Frame& f, const ShellParams& p)
{
    const std::array<Vec3, 2> ts{f.t1_star, f.t2_star};
    double a[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a[i][j] = ts[static_cast<std::size_t>(i)].dot(ts[static_cast<std::size_t>(j)]);
    const double lam = 4.0 * p.lambda_e * p.mu_e / (p.lambda_e + 2.0 * p.mu_e);
    ElasticityTensor C;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    C.c[static_cast<std::size_t>(8 * i + 4 * j + 2 * k + l)] =
                        lam * a[i][j] * a[k][l] + 2.0 * p.mu_e * (a[i][k] * a[j][l] + a[i][l] * a[j][k]);
    return C;
}

SurfaceSampling::SurfaceSampling(const Chart& chart, const SpectralGrid& grid, const ShellParams& params)
    : weight_(grid.zeros())
{
    points_.reserve(grid.size());
    tensors_.reserve(grid.size());
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2(); ++j) {
            points_.push_back(evaluate_point(chart, grid.node(i, j)));
            tensors_.push_back(elasticity_tensor(points_.back().frame, params));
            weight_(i, j) = points_.back().frame.w;
        }
    forcing_ = normal_forcing(chart, resolve_load(params, grid), grid);
}

EnergyBreakdown nonlinear_energy(const SurfaceSampling& s, const ScalarField& eta, const ScalarField& eta_dot,
                                 const ShellParams& params, const SpectralGrid& grid)
{
    return koiter_energy(Tensors::Nonlinear, s, eta, eta_dot, params, grid);
}

EnergyBreakdown nonlinear_energy(const Chart& chart, const ScalarField& eta, const ScalarField& eta_dot,
                                 const ShellParams& params, const SpectralGrid& grid)
{
    return nonlinear_energy(SurfaceSampling(chart, grid, params), eta, eta_dot, params, grid);
}

EnergyBreakdown linear_energy(const SurfaceSampling& s, const ScalarField& eta, const ScalarField& eta_dot,
                              const ShellParams& params, const SpectralGrid& grid)
{
    return koiter_energy(Tensors::Linear, s, eta, eta_dot, params, grid);
}

EnergyBreakdown linear_energy(const Chart& chart, const ScalarField& eta, const ScalarField& eta_dot,
                              const ShellParams& params, const SpectralGrid& grid)
{
    return linear_energy(SurfaceSampling(chart, grid, params), eta, eta_dot, params, grid);
}

EnergyBreakdown simplified_energy(const ScalarField& eta, const ScalarField& eta_dot, const ShellParams& params,
                                  const SpectralGrid& grid, const ScalarField& forcing)
{
    if (!grid.matches(eta) || !grid.matches(eta_dot)) throw ValidationError("energy fields do not match the grid");
    EnergyBreakdown e;
    const double da = grid.cell_area();
    e.k_m = 0.5 * params.nu_e * node_dot(eta, eta) * da;
    // On the torus int |hess eta|^2 = int (Lap eta)^2; the Laplacian form pairs
    // exactly with the biharmonic in simplified_force.
    const ScalarField lap = laplacian(eta, grid);
    const VectorField g = gradient(eta, grid);
    e.k_f = 0.5 * (params.alpha * node_dot(lap, lap) + params.beta * (node_dot(g.x, g.x) + node_dot(g.y, g.y))) * da;
    if (!forcing.empty()) e.load = node_dot(forcing, eta) * da;
    e.kinetic = 0.5 * params.mass() * node_dot(eta_dot, eta_dot) * da;
    for (std::size_t k = 0; k < g.x.size(); ++k) e.grad_inf = std::max(e.grad_inf, std::hypot(g.x[k], g.y[k]));
    finish(e, params);
    return e;
}

ScalarField simplified_force(const ScalarField& eta, const ShellParams& params, const SpectralGrid& grid)
{
    const Spectrum s = grid.forward(eta);
    Spectrum out = s;
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2c(); ++j) {
            const double k2 = grid.k1(i) * grid.k1(i) + grid.k2(j) * grid.k2(j);
            out(i, j) = s(i, j) * (params.nu_e + params.beta * k2 + params.alpha * k2 * k2);
        }
    return grid.inverse(std::move(out));
}

double evaluate_functional(Functional f, const SurfaceSampling& s, const ScalarField& eta, const ShellParams& params,
                           const SpectralGrid& grid)
{
    const ScalarField still = grid.zeros();
    switch (f) {
    case Functional::Km: return nonlinear_energy(s, eta, still, params, grid).k_m;
    case Functional::Kf: return nonlinear_energy(s, eta, still, params, grid).k_f;
    case Functional::KmLin: return linear_energy(s, eta, still, params, grid).k_m;
    case Functional::KfLin: return linear_energy(s, eta, still, params, grid).k_f;
    case Functional::KmS: return simplified_energy(eta, still, params, grid).k_m;
    case Functional::KfS: return simplified_energy(eta, still, params, grid).k_f;
    case Functional::Load: {
        ScalarField fe = s.forcing();
        for (std::size_t k = 0; k < fe.size(); ++k) fe[k] *= eta[k];
        return weighted_sum(fe, s.weight(), grid);
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double gateaux_derivative(Functional f, const SurfaceSampling& s, const ScalarField& eta, const ScalarField& direction,
                          const ShellParams& params, const SpectralGrid& grid)
{
    auto quotient = [&](double tau) {
        ScalarField plus = eta;
        plus.axpy(tau, direction);
        ScalarField minus = eta;
        minus.axpy(-tau, direction);
        const double fp = evaluate_functional(f, s, plus, params, grid);
        const double fm = evaluate_functional(f, s, minus, params, grid);
        if (!std::isfinite(fp) || !std::isfinite(fm)) throw NonFiniteEnergy("functional is not finite along the direction");
        return (fp - fm) / (2.0 * tau);
    };
    const double coarse = quotient(1e-4);
    const double fine = quotient(5e-5);
    const double value = (4.0 * fine - coarse) / 3.0;
    if (!std::isfinite(value)) throw NonFiniteEnergy("Gateaux derivative is not finite");
    return value;
}

double gateaux_derivative(Functional f, const Chart& chart, const ScalarField& eta, const ScalarField& direction,
                          const ShellParams& params, const SpectralGrid& grid)
{
    return gateaux_derivative(f, SurfaceSampling(chart, grid, params), eta, direction, params, grid);
}

double estimate_membrane_coercivity(const Chart& chart, const ShellParams& params, const SpectralGrid& grid, int samples,
                                    std::uint64_t seed)
{
    const SurfaceSampling s(chart, grid, params);
    const ScalarField still = grid.zeros();
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
        std::ostringstream spec;
        spec << "random:" << (mix64(seed + static_cast<std::uint64_t>(n)) >> 1) << ",4";
        const ScalarField eta = make_scalar_field(spec.str(), grid);
        ScalarField sq = eta;
        for (auto& v : sq.values()) v *= v;
        const double norm2 = weighted_sum(sq, s.weight(), grid);
        if (norm2 <= 0.0) continue;
        best = std::min(best, linear_energy(s, eta, still, params, grid).k_m / norm2);
    }
    return best;
}

} // namespace koiter
