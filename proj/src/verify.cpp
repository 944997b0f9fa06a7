#include "koiter/verify.hpp"

#include "koiter/elasticity.hpp"
#include "koiter/ensemble.hpp"
#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/geometry.hpp"
#include "koiter/solver.hpp"
#include "koiter/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace koiter {

namespace {

constexpr double pi = std::numbers::pi;

CheckResult check(const std::string& suite, const std::string& name, double error, double tol)
{
    return {suite, name, error, tol, error <= tol};
}

ShellParams params_with(double nu, double alpha, double beta)
{
    ShellParams p;
    p.nu_e = nu;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

void gateaux_suite(std::vector<CheckResult>& out)
{
    const SpectralGrid g(32, 32, Extents{2 * pi, 2 * pi});
    ShellParams p = params_with(1.3, 0.7, 0.4);
    const SurfaceSampling s(flat_chart(), g, p);
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
        const ScalarField eta = make_scalar_field("random:" + std::to_string(100 + n) + ",5", g);
        const ScalarField dir = make_scalar_field("random:" + std::to_string(500 + n) + ",5", g);
        const double d = gateaux_derivative(Functional::KmS, s, eta, dir, p, g) +
                         gateaux_derivative(Functional::KfS, s, eta, dir, p, g);
        const double exact = g.inner(simplified_force(eta, p, g), dir);
        worst = std::max(worst, std::abs(d - exact) / std::abs(exact));
    }
    out.push_back(check("gateaux", "K_m,s + K_f,s vs nu eta + alpha Lap^2 eta - beta Lap eta", worst, 1e-6));

    p.g_vec = "const:0.3,-0.2,0.5";
    p.g_scal = "cosmode:1,2,1.5";
    const SurfaceSampling loaded(flat_chart(), g, p);
    const ScalarField base = make_scalar_field("random:1,4,0.01", g);
    const ScalarField dir = make_scalar_field("random:9,4", g);
    const double exact = g.inner(loaded.forcing(), dir);
    const double d = gateaux_derivative(Functional::Load, loaded, base, dir, p, g);
    out.push_back(check("gateaux", "load vs int (g.n + g) dir", std::abs(d - exact) / (1.0 + std::abs(exact)), 1e-12));
}

void characteristics_suite(std::vector<CheckResult>& out)
{
    const SpectralGrid g(128, 128, Extents{4 * pi, 4 * pi}, Vec2(-2 * pi, -2 * pi));
    const NoiseModel m = make_noise_model("figure3", g, 42);
    const ScalarField eta0 = make_scalar_field("gaussian:pi,pi", g);
    const double dt = 1e-3;
    const std::uint64_t steps = 100;
    ScalarField eta = eta0;
    for (std::uint64_t k = 0; k < steps; ++k) eta = step_kinematic_sde(eta, {}, m, 0, k, dt, g);
    const ScalarField ref = characteristics_oracle(eta0, m, 0, dt, steps, g);
    out.push_back(check("characteristics", "figure3 transport vs characteristics, 128^2, 100 steps",
                        max_abs(eta - ref) / max_abs(ref), 1e-2));

    const NoiseModel c = make_noise_model("const:1.5,0", g, 42);
    ScalarField e = eta0;
    for (std::uint64_t k = 0; k < steps; ++k) e = step_kinematic_sde(e, {}, c, 0, k, dt, g);
    const ScalarField cref = characteristics_oracle(eta0, c, 0, dt, steps, g);
    out.push_back(check("characteristics", "constant-sigma translation", max_abs(e - cref) / max_abs(cref), 1e-2));
}

void skew_suite(std::vector<CheckResult>& out)
{
    const SpectralGrid g(64, 64, Extents{2 * pi, 2 * pi});
    const NoiseModel m = make_noise_model("figure3;divfree:k1;const:0.7,-1.3", g, 0);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const ScalarField u = make_scalar_field("random:" + std::to_string(100 + s) + ",30", g);
        const ScalarField v = make_scalar_field("random:" + std::to_string(200 + s) + ",30", g);
        const double scale = g.l2_norm(u) * g.l2_norm(v);
        for (std::size_t i = 0; i < m.n_fields(); ++i) {
            const VectorField& sigma = m.field(i).sigma;
            const double t = g.inner(u, transport_operator(sigma, v, g)) + g.inner(transport_operator(sigma, u, g), v);
            worst = std::max(worst, std::abs(t) / scale);
        }
    }
    out.push_back(check("skew_adjointness", "<u, Lv> + <Lu, v>, L = sigma.grad + 1/2 div sigma", worst, 1e-10));
}

void dispersion_suite(std::vector<CheckResult>& out)
{
    const SpectralGrid g(32, 32, Extents{2 * pi, 2 * pi});
    const NoiseModel none = make_noise_model("none", g, 0);
    {
        const ShellParams p = params_with(1, 1, 1);
        const ShellStepper st(p, g, 0.01);
        ShellState s{make_scalar_field("sinmode:1,0", g), g.zeros(), 0.0};
        for (std::uint64_t k = 0; k < 100; ++k) s = st.step(s, none, 0, k);
        const double w = std::sqrt(3.0);
        const ScalarField exact = g.sample([&](const Vec2& y) { return std::cos(w) * std::sin(y[0]); });
        out.push_back(check("dispersion", "oscillatory mode vs cos(omega t)", max_abs(s.eta - exact), 1e-6));
        out.push_back(check("dispersion", "omega(k=(1,0)) vs sqrt(3)", std::abs(dispersion(p, Vec2(1, 0)).rate - w), 1e-12));
    }
    {
        const ShellParams p = params_with(0, 1, -2);
        const ShellStepper st(p, g, 0.01);
        ShellState s{make_scalar_field("sinmode:1,0,1e-3", g), make_scalar_field("sinmode:1,0,1e-3", g), 0.0};
        std::vector<std::pair<double, double>> series{{0.0, g.l2_norm(s.eta)}};
        for (std::uint64_t k = 0; k < 400; ++k) {
            s = st.step(s, none, 0, k);
            series.emplace_back(s.t, g.l2_norm(s.eta));
        }
        const GrowthFit f = estimate_growth_rate(series, 0.0, 4.0);
        out.push_back(check("dispersion", "unstable growth rate vs 1", std::abs(f.lambda - 1.0), 1e-3));
    }
}

} // namespace

std::vector<std::string> verify_suite_names()
{
    return {"gateaux", "characteristics", "skew_adjointness", "dispersion"};
}

std::vector<CheckResult> run_verify_suites(const std::vector<std::string>& suites)
{
    const auto names = verify_suite_names();
    for (const auto& s : suites)
        if (std::find(names.begin(), names.end(), s) == names.end()) throw ValidationError("unknown verify suite '" + s + "'");
    auto wanted = [&](const std::string& s) {
        return suites.empty() || std::find(suites.begin(), suites.end(), s) != suites.end();
    };
    std::vector<CheckResult> out;
    if (wanted("gateaux")) gateaux_suite(out);
    if (wanted("characteristics")) characteristics_suite(out);
    if (wanted("skew_adjointness")) skew_suite(out);
    if (wanted("dispersion")) dispersion_suite(out);
    return out;
}

} // namespace koiter
