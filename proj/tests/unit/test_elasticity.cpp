#include <doctest.h>

#include "koiter/elasticity.hpp"
#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace koiter;

namespace {

constexpr double pi = std::numbers::pi;
const Extents two_pi{2 * pi, 2 * pi};

ShellParams unit_params()
{
    ShellParams p;
    p.eps0 = p.rho_s = p.lambda_e = p.mu_e = p.nu_e = p.alpha = 1.0;
    p.beta = 0.0;
    return p;
}

// Shifted by half a cell so no node lands on a sphere pole.
SpectralGrid offset_grid(std::size_t n)
{
    const double h = 2 * pi / static_cast<double>(n);
    return SpectralGrid(n, n, two_pi, Vec2(0.5 * h, 0.5 * h));
}

ScalarField sin_y1(const SpectralGrid& g)
{
    return g.sample([](const Vec2& y) { return std::sin(y[0]); });
}

} // namespace

TEST_CASE("elasticity tensor on the flat chart")
{
    const ElasticityTensor C = elasticity_tensor(evaluate_frame(flat_chart(), Vec2(0.3, 0.1)), unit_params());
    CHECK(C(0, 0, 0, 0) == doctest::Approx(16.0 / 3.0).epsilon(1e-15));
    CHECK(C(0, 0, 1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(C(0, 1, 0, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(C(0, 1, 0, 1) == C(1, 0, 0, 1));
    CHECK(C(0, 1, 0, 1) == C(0, 1, 1, 0));
    CHECK(C(0, 1, 0, 1) == C(1, 0, 1, 0));
}

TEST_CASE("elasticity tensor symmetries and positivity")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2 * pi), m(-1.0, 1.0);
    ShellParams p = unit_params();
    p.lambda_e = -0.5; // still admissible: 3 lambda + 2 mu = 0.5
    p.validate();
    const Chart c = random_torus_chart(33);
    double worst = 1e300;
    for (int s = 0; s < 10000; ++s) {
        const Frame f = evaluate_frame(c, Vec2(u(rng), u(rng)));
        const ElasticityTensor C = elasticity_tensor(f, p);
        if (s < 200)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k)
                        for (int l = 0; l < 2; ++l) {
                            CHECK(std::abs(C(i, j, k, l) - C(j, i, k, l)) <= 1e-12);
                            CHECK(std::abs(C(i, j, k, l) - C(i, j, l, k)) <= 1e-12);
                            CHECK(std::abs(C(i, j, k, l) - C(k, l, i, j)) <= 1e-12);
                        }
        const SymTensor2 M{m(rng), m(rng), m(rng)};
        const double q = C.contract(M, M) / (M.frobenius() * M.frobenius());
        worst = std::min(worst, q);
    }
    CHECK(worst > 0.0);
}

TEST_CASE("parameter validation")
{
    ShellParams p;
    CHECK_NOTHROW(p.validate());
    p.mu_e = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("Lame"), ValidationError);
    p = ShellParams{};
    p.lambda_e = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("3*lambda_e + 2*mu_e"), ValidationError);
    p = ShellParams{};
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ShellParams{};
    p.eps0 = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ShellParams{};
    p.g_scal = "nonsense";
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ShellParams{};
    p.nu_e = -3.0;
    p.beta = -2.0;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("nonlinear and linear energies: closed forms on the flat chart")
{
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = unit_params();
    const ScalarField eta = sin_y1(g);
    const ScalarField zero = g.zeros();
    // Symbolic values: K_m = pi^2, K_f = K_f^lin = 16 pi^2 / 9.
    const EnergyBreakdown nl = nonlinear_energy(flat_chart(), eta, zero, p, g);
    CHECK(nl.k_m == doctest::Approx(pi * pi).epsilon(1e-12));
    CHECK(nl.k_f == doctest::Approx(16 * pi * pi / 9).epsilon(1e-12));
    CHECK(nl.load == 0.0);
    CHECK(nl.kinetic == 0.0);
    CHECK(nl.total == doctest::Approx(nl.k_m + nl.k_f).epsilon(1e-12));

    const EnergyBreakdown lin = linear_energy(flat_chart(), eta, zero, p, g);
    CHECK(lin.k_m == 0.0);
    CHECK(lin.k_f == doctest::Approx(16 * pi * pi / 9).epsilon(1e-12));

    const EnergyBreakdown none = nonlinear_energy(flat_chart(), zero, zero, p, g);
    CHECK(none.k_m == 0.0);
    CHECK(none.k_f == 0.0);
    CHECK(none.total == 0.0);
    CHECK(linear_energy(flat_chart(), zero, zero, p, g).total == 0.0);

    ShellParams q = p;
    q.rho_s = 3.0;
    q.eps0 = 0.5;
    const EnergyBreakdown kin = nonlinear_energy(flat_chart(), zero, ScalarField(32, 32, 2.0), q, g);
    CHECK(kin.kinetic == doctest::Approx(0.5 * 0.5 * 3.0 * 4.0 * 4 * pi * pi).epsilon(1e-13));
}

TEST_CASE("small displacement flag")
{
    const SpectralGrid g(32, 32, two_pi);
    ShellParams p = unit_params();
    p.disp_bound_L = 0.5;
    const ScalarField eta = sin_y1(g);
    const EnergyBreakdown e = nonlinear_energy(flat_chart(), eta, g.zeros(), p, g);
    CHECK(e.grad_inf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.small_displacement_violated);
    CHECK(std::isfinite(e.total));
    p.disp_bound_L = 2.0;
    CHECK_FALSE(nonlinear_energy(flat_chart(), eta, g.zeros(), p, g).small_displacement_violated);
}

TEST_CASE("simplified energy closed forms")
{
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = unit_params();
    const ScalarField eta = sin_y1(g);
    const EnergyBreakdown e = simplified_energy(eta, g.zeros(), p, g);
    CHECK(e.k_m == doctest::Approx(pi * pi).epsilon(1e-13));
    CHECK(e.k_f == doctest::Approx(pi * pi).epsilon(1e-13));

    ShellParams q = p;
    q.nu_e = 2.5;
    q.beta = 4.0;
    const EnergyBreakdown c = simplified_energy(ScalarField(32, 32, 0.7), g.zeros(), q, g);
    CHECK(c.k_f == 0.0);
    CHECK(c.k_m == doctest::Approx(0.5 * 2.5 * 0.49 * 4 * pi * pi).epsilon(1e-13));

    const ScalarField f(32, 32, 2.0);
    const EnergyBreakdown l = simplified_energy(ScalarField(32, 32, 0.5), g.zeros(), p, g, f);
    CHECK(l.load == doctest::Approx(4 * pi * pi).epsilon(1e-13));
    CHECK(l.total == doctest::Approx(l.k_m + l.k_f - l.load).epsilon(1e-13));
}

TEST_CASE("simplified force")
{
    // Coarse grid: roundoff in the top modes is amplified by |k|^4.
    const SpectralGrid g(16, 16, two_pi);
    ShellParams p = unit_params();
    p.alpha = 2.0;
    p.beta = 3.0;
    const ScalarField eta = sin_y1(g);
    CHECK(max_abs(simplified_force(eta, p, g) - 6.0 * eta) <= 1e-12);
    CHECK(max_abs(simplified_force(g.zeros(), p, g)) == 0.0);

    const ScalarField mode = make_scalar_field("cosmode:2,3", g);
    const double k2 = 13.0;
    CHECK(max_abs(simplified_force(mode, p, g) - (1.0 + 3.0 * k2 + 2.0 * k2 * k2) * mode) <= 1e-10);
}

TEST_CASE("simplified energies scale quadratically")
{
    const SpectralGrid g(32, 32, two_pi);
    ShellParams p = unit_params();
    p.beta = -0.7;
    const ScalarField eta = make_scalar_field("random:5,5", g);
    const double tau = 0.37;
    const EnergyBreakdown a = simplified_energy(eta, g.zeros(), p, g);
    const EnergyBreakdown b = simplified_energy(tau * eta, g.zeros(), p, g);
    CHECK(b.k_m == doctest::Approx(tau * tau * a.k_m).epsilon(1e-12));
    CHECK(b.k_f == doctest::Approx(tau * tau * a.k_f).epsilon(1e-12));
}

TEST_CASE("Gateaux derivatives of the simplified functionals")
{
    const SpectralGrid g(32, 32, two_pi);
    ShellParams p = unit_params();
    p.nu_e = 1.3;
    p.alpha = 0.8;
    p.beta = -0.6;
    const SurfaceSampling s(flat_chart(), g, p);
    for (int n = 0; n < 20; ++n) {
        const ScalarField eta = make_scalar_field("random:" + std::to_string(100 + n) + ",5", g);
        const ScalarField dir = make_scalar_field("random:" + std::to_string(500 + n) + ",5", g);
        const double km = gateaux_derivative(Functional::KmS, s, eta, dir, p, g);
        const double km_exact = p.nu_e * g.inner(eta, dir);
        CHECK(std::abs(km - km_exact) <= 1e-8 * std::abs(km_exact));

        ScalarField bend = biharmonic(eta, g);
        bend *= p.alpha;
        bend.axpy(-p.beta, laplacian(eta, g));
        const double kf = gateaux_derivative(Functional::KfS, s, eta, dir, p, g);
        const double kf_exact = g.inner(bend, dir);
        CHECK(std::abs(kf - kf_exact) <= 1e-6 * std::abs(kf_exact));

        const double total = km + kf;
        const double force = g.inner(simplified_force(eta, p, g), dir);
        CHECK(std::abs(total - force) <= 1e-6 * (1.0 + std::abs(force)));
    }
}

TEST_CASE("load functional is linear")
{
    const SpectralGrid g = offset_grid(32);
    ShellParams p = unit_params();
    p.g_vec = "const:0.3,-0.2,0.5";
    p.g_scal = "const:1.5";
    for (const Chart& c : {flat_chart(), sphere_chart(2.0), random_torus_chart(2)}) {
        const SurfaceSampling s(c, g, p);
        const ScalarField dir = make_scalar_field("random:9,4", g);
        ScalarField expect_density = s.forcing();
        const double exact = [&] {
            double acc = 0.0;
            for (std::size_t k = 0; k < dir.size(); ++k) acc += expect_density[k] * dir[k] * s.weight()[k];
            return acc * g.cell_area();
        }();
        // Small base points: the difference quotient loses eps*|l(eta)|/tau to
        // cancellation, so O(1) base points are checked against that bound.
        const ScalarField small_a = make_scalar_field("random:1,4,0.01", g);
        const ScalarField small_b = make_scalar_field("random:2,4,0.01", g);
        const double a = gateaux_derivative(Functional::Load, s, small_a, dir, p, g);
        const double b = gateaux_derivative(Functional::Load, s, small_b, dir, p, g);
        CHECK(std::abs(a - exact) <= 1e-12 * (1.0 + std::abs(exact)));
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(exact)));

        const ScalarField big = make_scalar_field("random:3,4", g);
        const double d = gateaux_derivative(Functional::Load, s, big, dir, p, g);
        const double scale = std::abs(evaluate_functional(Functional::Load, s, big, p, g)) + std::abs(exact);
        CHECK(std::abs(d - exact) <= 8 * 2.3e-16 * scale / 5e-5);
    }
}

TEST_CASE("normal forcing uses the chart normal")
{
    const SpectralGrid g = offset_grid(16);
    ShellParams p = unit_params();
    p.g_vec = "const:0,0,2";
    p.g_scal = "const:1";
    const ScalarField f = normal_forcing(flat_chart(), resolve_load(p, g), g);
    CHECK(max_abs(f - ScalarField(16, 16, 3.0)) == 0.0);
    CHECK(max_abs(normal_forcing(resolve_load(p, g)) - ScalarField(16, 16, 3.0)) == 0.0);
}

TEST_CASE("membrane linearization error is cubic on the sphere")
{
    // The chart covers the sphere twice with opposite normals on y1 > pi, so a
    // field that is odd under y1 -> y1 + pi keeps the cubic term from
    // cancelling between the two sheets.
    const SpectralGrid g = offset_grid(32);
    const ShellParams p = unit_params();
    const SurfaceSampling s(sphere_chart(2.0), g, p);
    const ScalarField zero = g.zeros();
    for (int seed = 1; seed <= 4; ++seed) {
        ScalarField eta = make_scalar_field("sinmode:1,0", g);
        eta.axpy(0.3, make_scalar_field("random:" + std::to_string(seed) + ",3", g));
        double prev = 0.0;
        for (double tau : {1e-2, 5e-3, 2.5e-3}) {
            const ScalarField e = tau * eta;
            const double err = std::abs(nonlinear_energy(s, e, zero, p, g).k_m - linear_energy(s, e, zero, p, g).k_m);
            if (prev > 0.0) {
                CHECK(prev / err >= 7.0);
                CHECK(prev / err <= 9.0);
            }
            prev = err;
        }
    }
}

TEST_CASE("membrane linearization error on the flat chart")
{
    // K_m^lin vanishes identically here and K_m is quartic in tau.
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = unit_params();
    const SurfaceSampling s(flat_chart(), g, p);
    const ScalarField eta = make_scalar_field("random:77,3", g);
    double prev = 0.0;
    for (double tau : {1e-2, 5e-3, 2.5e-3}) {
        const ScalarField e = tau * eta;
        const double err = std::abs(nonlinear_energy(s, e, g.zeros(), p, g).k_m - linear_energy(s, e, g.zeros(), p, g).k_m);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(16.0).epsilon(1e-6));
        prev = err;
    }
}

TEST_CASE("coercivity estimate")
{
    const SpectralGrid g = offset_grid(16);
    const ShellParams p = unit_params();
    CHECK(estimate_membrane_coercivity(flat_chart(), p, g, 4, 1) == 0.0);
    const double c = estimate_membrane_coercivity(sphere_chart(2.0), p, g, 4, 1);
    CHECK(c > 0.0);
    CHECK(std::isfinite(c));
}
