#include <doctest.h>

#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/rng.hpp"
#include "koiter/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace koiter;

namespace {
constexpr double pi = std::numbers::pi;
const Extents two_pi{2 * pi, 2 * pi};

double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

ShellParams params_with(double nu, double alpha, double beta)
{
    ShellParams p;
    p.nu_e = nu;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

ShellState state_of(const SpectralGrid& g, const std::string& eta, const std::string& eta_dot)
{
    return {make_scalar_field(eta, g), make_scalar_field(eta_dot, g), 0.0};
}

double uniform(std::uint64_t seed, std::uint64_t i)
{
    return static_cast<double>(mix64(seed * 7919 + i) >> 11) * 0x1.0p-53;
}
} // namespace

TEST_CASE("dispersion examples")
{
    const ModeClassification a = dispersion(params_with(1, 1, 1), Vec2(1, 0));
    CHECK(a.symbol == 3.0);
    CHECK(a.kind == ModeKind::Oscillatory);
    CHECK(a.rate == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

    const ModeClassification b = dispersion(params_with(0, 1, -2), Vec2(1, 0));
    CHECK(b.symbol == -1.0);
    CHECK(b.kind == ModeKind::Unstable);
    CHECK(b.rate == 1.0);

    const ModeClassification c = dispersion(params_with(0, 1, 1), Vec2(0, 0));
    CHECK(c.kind == ModeKind::Neutral);
    CHECK(c.rate == 0.0);
    CHECK(std::string(to_string(c.kind)) == "neutral");

    ShellParams heavy = params_with(1, 1, 1);
    heavy.eps0 = 0.5;
    heavy.rho_s = 8.0;
    CHECK(dispersion(heavy, Vec2(0, 1)).rate == doctest::Approx(std::sqrt(3.0 / 4.0)).epsilon(1e-15));
}

TEST_CASE("linear propagator examples")
{
    const Eigen::Matrix2d n = linear_propagator(params_with(0, 1, 1), Vec2(0, 0), 0.3);
    CHECK(n(0, 0) == 1.0);
    CHECK(n(0, 1) == 0.3);
    CHECK(n(1, 0) == 0.0);
    CHECK(n(1, 1) == 1.0);

    const Eigen::Matrix2d h = linear_propagator(params_with(1, 1, 1), Vec2(1, 0), pi / std::sqrt(3.0));
    CHECK((h + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-15);

    const Eigen::Matrix2d u = linear_propagator(params_with(0, 1, -2), Vec2(1, 0), 0.5);
    CHECK(u(0, 0) == doctest::Approx(std::cosh(0.5)).epsilon(1e-15));
    CHECK(u(1, 0) == doctest::Approx(std::sinh(0.5)).epsilon(1e-15));

    CHECK_THROWS_AS(linear_propagator(params_with(1, 1, 1), Vec2(1, 0), 0.0), ValidationError);
}

TEST_CASE("propagator determinant is one")
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const ShellParams p = params_with(4.0 * uniform(1, i) - 2.0, 0.05 + uniform(2, i), 4.0 * uniform(3, i) - 2.0);
        const Vec2 k(6.0 * uniform(4, i) - 3.0, 6.0 * uniform(5, i) - 3.0);
        const double dt = 1e-3 + 0.5 * uniform(6, i);
        const Eigen::Matrix2d m = linear_propagator(p, k, dt);
        worst = std::max(worst, std::abs(m.determinant() - 1.0));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("propagator composes")
{
    for (const ShellParams& p : {params_with(1, 1, 1), params_with(0, 1, -2), params_with(0, 1, 0)}) {
        const Vec2 k(1, 0);
        const Eigen::Matrix2d a = linear_propagator(p, k, 0.2) * linear_propagator(p, k, 0.3);
        CHECK((a - linear_propagator(p, k, 0.5)).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("transport substep count")
{
    CHECK(transport_substeps(0.0) == 1);
    CHECK(transport_substeps(transport_theta_max) == 1);
    CHECK(transport_substeps(1.01 * transport_theta_max) == 2);
    CHECK(transport_substeps(10.0 * transport_theta_max) == 10);
    CHECK(transport_substeps(std::numeric_limits<double>::quiet_NaN()) == 1);
}

TEST_CASE("kinematic SDE step examples")
{
    const SpectralGrid g(32, 32, two_pi);
    const ScalarField eta = make_scalar_field("random:4,4", g);
    const NoiseModel fig = make_noise_model("figure3", g, 3);
    CHECK(step_kinematic_sde(eta, {}, fig, {0.0, 0.0}, 0.01, g) == eta);

    const NoiseModel none = make_noise_model("none", g, 3);
    const ScalarField f(32, 32, 0.75);
    const ScalarField out = step_kinematic_sde(eta, f, none, 0, 0, 0.02, g);
    CHECK(max_diff(out, eta + 0.02 * f) == 0.0);

    CHECK_THROWS_AS(step_kinematic_sde(eta, {}, fig, {0.1}, 0.01, g), ValidationError);
    CHECK_THROWS_AS(step_kinematic_sde(eta, {}, fig, 0, 0, -1.0, g), ValidationError);
    ScalarField bad = eta;
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(step_kinematic_sde(bad, {}, fig, 0, 0, 0.01, g), NonFiniteState);

    // seeded and explicit forms agree
    const IncrementBlock inc = sample_increments(fig, 5, 9, 1e-3);
    CHECK(step_kinematic_sde(eta, {}, fig, 5, 9, 1e-3, g) == step_kinematic_sde(eta, {}, fig, inc.dw, 1e-3, g));
}

TEST_CASE("kinematic SDE with constant sigma translates")
{
    const SpectralGrid g(32, 32, two_pi);
    const NoiseModel c = make_noise_model("const:1,0", g, 3);
    const ScalarField eta = g.sample([](const Vec2& y) { return std::sin(y[0]); });
    const double dw = 0.01;
    const ScalarField out = step_kinematic_sde(eta, {}, c, {dw}, 1e-4, g);
    // exact: sin(y1 + dw/2); Heun matches to third order in dw/2
    const ScalarField exact = g.sample([&](const Vec2& y) { return std::sin(y[0] + 0.5 * dw); });
    CHECK(max_diff(out, exact) <= std::pow(0.5 * dw, 3) / 6.0 * 1.01);
}

TEST_CASE("L2 conservation of divergence-free transport")
{
    const SpectralGrid g(32, 32, two_pi);
    const NoiseModel df = make_noise_model("divfree:k1", g, 17);
    ScalarField eta = make_scalar_field("random:8,2", g);
    const double n0 = g.l2_norm(eta);
    for (std::uint64_t s = 0; s < 1000; ++s) eta = step_kinematic_sde(eta, {}, df, 0, s, 1e-4, g);
    CHECK(std::abs(g.l2_norm(eta) - n0) / n0 <= 1e-6);
    CHECK(max_diff(eta, make_scalar_field("random:8,2", g)) > 1e-3);
}

TEST_CASE("momentum noise substep preserves the kinetic norm")
{
    const SpectralGrid g(64, 64, two_pi);
    const NoiseModel fig = make_noise_model("figure3", g, 23);
    const ShellStepper st(params_with(1, 1, 1), g, 1e-5);
    for (std::uint64_t s = 0; s < 5; ++s) {
        ShellState state{g.zeros(), make_scalar_field("random:" + std::to_string(30 + s) + ",3", g), 0.0};
        const double n0 = g.l2_norm(state.eta_dot);
        const IncrementBlock inc = sample_increments(fig, 0, s, st.dt());
        const ShellState before = state;
        st.stochastic_substep(state, fig, inc.dw_first);
        CHECK(std::abs(g.l2_norm(state.eta_dot) - n0) / n0 <= 1e-8);
        CHECK(max_diff(state.eta_dot, before.eta_dot) > 0.0);
        CHECK(max_abs(state.eta) == 0.0);
    }
}

TEST_CASE("shell step: oscillatory single mode")
{
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = params_with(1, 1, 1);
    const NoiseModel none = make_noise_model("none", g, 0);
    const ShellStepper st(p, g, 0.01);
    ShellState s = state_of(g, "sinmode:1,0", "zero");
    for (std::uint64_t k = 0; k < 100; ++k) s = st.step(s, none, 0, k);
    const double w = std::sqrt(3.0);
    const ScalarField exact = g.sample([&](const Vec2& y) { return std::cos(w * 1.0) * std::sin(y[0]); });
    CHECK(max_diff(s.eta, exact) <= 1e-10);
    CHECK(s.t == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(st.stability_warning());
}

TEST_CASE("shell step: unstable growth rate")
{
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = params_with(0, 1, -2);
    const NoiseModel none = make_noise_model("none", g, 0);
    const ShellStepper st(p, g, 0.01);
    // eta_dot = lambda eta picks the growing branch only
    ShellState s = state_of(g, "sinmode:1,0,1e-3", "sinmode:1,0,1e-3");
    double l1 = 0.0, l5 = 0.0;
    for (std::uint64_t k = 0; k < 500; ++k) {
        s = st.step(s, none, 0, k);
        if (k + 1 == 100) l1 = std::log(g.l2_norm(s.eta));
        if (k + 1 == 500) l5 = std::log(g.l2_norm(s.eta));
    }
    CHECK(std::abs((l5 - l1) / 4.0 - 1.0) <= 1e-6);
}

TEST_CASE("shell step: constant load equilibrium")
{
    const SpectralGrid g(16, 16, two_pi);
    const ShellParams p = params_with(2, 1, 1);
    const NoiseModel none = make_noise_model("none", g, 0);
    // zero mode frequency sqrt(2); one period in 1000 steps
    const double period = 2 * pi / std::sqrt(2.0);
    const ShellStepper st(p, g, period / 1000, ScalarField(16, 16, 0.6));
    ShellState s{g.zeros(), g.zeros(), 0.0};
    double mean = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        mean += s.eta[0];
        s = st.step(s, none, 0, k);
    }
    // the half-step kicks shift the sampled mean by O((omega dt)^2)
    CHECK(mean / 1000 == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(max_abs(s.eta) <= 1e-9);
}

TEST_CASE("shell step: modal invariants in every regime")
{
    const SpectralGrid g(32, 32, two_pi);
    const NoiseModel none = make_noise_model("none", g, 0);
    for (const ShellParams& p : {params_with(1, 1, 1), params_with(-1, 1, 1), params_with(1, 0.05, -1)}) {
        const ShellStepper st(p, g, 1e-3);
        ShellState s = state_of(g, "random:1,6", "random:2,6");
        const std::vector<double> i0 = modal_invariants(s, p, g);
        for (std::uint64_t k = 0; k < 1000; ++k) s = st.step(s, none, 0, k);
        const std::vector<double> i1 = modal_invariants(s, p, g);
        double scale = 0.0, worst = 0.0;
        for (double v : i0) scale = std::max(scale, std::abs(v));
        for (std::size_t m = 0; m < i0.size(); ++m) worst = std::max(worst, std::abs(i1[m] - i0[m]));
        CHECK(worst <= 1e-10 * scale);
    }
}

TEST_CASE("shell step is linear on frozen increments")
{
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = params_with(0.5, 1, -0.5);
    const NoiseModel fig = make_noise_model("figure3", g, 8);
    const ScalarField f1 = make_scalar_field("random:5,3", g);
    const ScalarField f2 = make_scalar_field("cosmode:1,2", g);
    const double a = 0.7, b = -1.3;
    const ShellState s1 = state_of(g, "random:6,5", "random:7,5");
    const ShellState s2 = state_of(g, "random:8,5", "random:9,5");
    const ShellState mix{a * s1.eta + b * s2.eta, a * s1.eta_dot + b * s2.eta_dot, 0.0};
    const IncrementBlock inc = sample_increments(fig, 2, 0, 1e-3);
    const ShellState r1 = ShellStepper(p, g, 1e-3, f1).step(s1, fig, inc);
    const ShellState r2 = ShellStepper(p, g, 1e-3, f2).step(s2, fig, inc);
    const ShellState rm = ShellStepper(p, g, 1e-3, a * f1 + b * f2).step(mix, fig, inc);
    CHECK(max_diff(rm.eta, a * r1.eta + b * r2.eta) <= 1e-10);
    CHECK(max_diff(rm.eta_dot, a * r1.eta_dot + b * r2.eta_dot) <= 1e-10);
}

TEST_CASE("shell step: splitting order on frozen increments")
{
    // A fixed piecewise-constant noise path: eight intervals with frozen
    // increments W_k. Refining the stepper inside each interval spreads W_k
    // evenly over the substeps, so the exact solution stays the same.
    const SpectralGrid g(32, 32, two_pi);
    const ShellParams p = params_with(1, 1, 1);
    const NoiseModel fig = make_noise_model("figure3", g, 31);
    const double T = 0.2;
    const int intervals = 8;
    std::vector<std::vector<double>> w;
    for (int k = 0; k < intervals; ++k) w.push_back(sample_increments(fig, 0, static_cast<std::uint64_t>(k), T / intervals).dw);
    const ShellState s0 = state_of(g, "random:12,3", "random:13,3");

    auto solve = [&](int m) {
        const ShellStepper st(p, g, T / (intervals * m));
        ShellState s = s0;
        for (int k = 0; k < intervals; ++k)
            for (int j = 0; j < m; ++j) {
                IncrementBlock inc;
                for (double v : w[static_cast<std::size_t>(k)]) {
                    inc.dw_first.push_back(v / (2.0 * m));
                    inc.dw_second.push_back(v / (2.0 * m));
                }
                s = st.step(s, fig, inc);
            }
        return s;
    };
    const ShellState ref = solve(256);
    std::vector<double> err;
    for (int m : {1, 2, 4, 8}) err.push_back(max_diff(solve(m).eta, ref.eta));
    MESSAGE("splitting errors " << err[0] << " " << err[1] << " " << err[2] << " " << err[3]);
    for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(err[i] / err[i + 1] >= 2.0);
}

TEST_CASE("stability warning")
{
    const SpectralGrid g(16, 16, two_pi);
    CHECK(ShellStepper(params_with(-1e4, 1, 1), g, 0.1).stability_warning());
    CHECK(ShellStepper(params_with(-1e4, 1, 1), g, 0.1).max_growth_per_step() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_FALSE(ShellStepper(params_with(0, 1, -2), g, 0.1).stability_warning());
    CHECK(ShellStepper(params_with(-1e4, 1, 1), g, 0.1).stability_message().find("StabilityWarning") == 0);
}

TEST_CASE("shell step errors")
{
    const SpectralGrid g(16, 16, two_pi);
    const NoiseModel none = make_noise_model("none", g, 0);
    const ShellStepper st(params_with(1, 1, 1), g, 0.01);
    ShellState s = state_of(g, "random:1,2", "zero");
    s.eta_dot[5] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(st.step(s, none, 0, 0), NonFiniteState);
    const SpectralGrid h(32, 16, two_pi);
    CHECK_THROWS_AS(st.step(state_of(h, "zero", "zero"), none, 0, 0), ValidationError);
    CHECK_THROWS_AS(ShellStepper(params_with(1, 1, 1), g, 0.0), ValidationError);
}
