#include "koiter/solver.hpp"

#include "koiter/errors.hpp"

#include <cmath>
#include <sstream>

namespace koiter {

namespace {

void require_finite(const ScalarField& f, const char* what)
{
    if (!all_finite(f)) throw NonFiniteState(std::string(what) + " contains non-finite values");
}

bool all_zero(const std::vector<double>& v)
{
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

// Largest |k| kept by the 2/3-rule filter.
double band_radius(const SpectralGrid& grid)
{
    double r = 0.0;
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2c(); ++j)
            if (in_dealiased_band(grid, i, j)) r = std::max(r, std::hypot(grid.k1(i), grid.k2(j)));
    return r;
}

double sup_norm(const VectorField& v)
{
    double m = 0.0;
    for (std::size_t k = 0; k < v.x.size(); ++k) m = std::max(m, std::hypot(v.x[k], v.y[k]));
    return m;
}

double symbol_of(const ShellParams& p, const Vec2& k)
{
    const double k2 = k.squaredNorm();
    return p.nu_e + p.beta * k2 + p.alpha * k2 * k2;
}

} // namespace

int transport_substeps(double theta) noexcept
{
    if (!(theta > transport_theta_max)) return 1;
    const double n = std::ceil(theta / transport_theta_max);
    return n > 1e6 ? 1000000 : static_cast<int>(n);
}

const char* to_string(ModeKind kind) noexcept
{
    switch (kind) {
    case ModeKind::Oscillatory: return "oscillatory";
    case ModeKind::Neutral: return "neutral";
    case ModeKind::Unstable: return "unstable";
    }
    return "?";
}

ModeClassification dispersion(const ShellParams& params, const Vec2& k)
{
    ModeClassification m;
    m.k = k;
    m.symbol = symbol_of(params, k);
    if (std::abs(m.symbol) <= 1e-14) {
        m.kind = ModeKind::Neutral;
    } else if (m.symbol > 0.0) {
        m.kind = ModeKind::Oscillatory;
        m.rate = std::sqrt(m.symbol / params.mass());
    } else {
        m.kind = ModeKind::Unstable;
        m.rate = std::sqrt(-m.symbol / params.mass());
    }
    return m;
}

Eigen::Matrix2d linear_propagator(const ShellParams& params, const Vec2& k, double dt)
{
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
    const ModeClassification m = dispersion(params, k);
    Eigen::Matrix2d p;
    const double r = m.rate;
    switch (m.kind) {
    case ModeKind::Oscillatory: {
        const double c = std::cos(r * dt), s = std::sin(r * dt);
        p << c, s / r, -r * s, c;
        break;
    }
    case ModeKind::Unstable: {
        const double c = std::cosh(r * dt), s = std::sinh(r * dt);
        p << c, s / r, r * s, c;
        break;
    }
    case ModeKind::Neutral: p << 1.0, dt, 0.0, 1.0; break;
    }
    return p;
}

ScalarField step_kinematic_sde(const ScalarField& eta, const ScalarField& eta_dot_source, const NoiseModel& model,
                               const std::vector<double>& dw, double dt, const SpectralGrid& grid)
{
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
    if (!grid.matches(eta)) throw ValidationError("eta does not match the grid");
    if (!eta_dot_source.empty() && !grid.matches(eta_dot_source)) throw ValidationError("eta_dot does not match the grid");
    if (dw.size() != model.n_fields()) throw ValidationError("increment count does not match the noise model");

    ScalarField base = eta;
    if (!eta_dot_source.empty()) base.axpy(dt, eta_dot_source);
    if (model.n_fields() == 0 || all_zero(dw)) {
        require_finite(base, "eta");
        return base;
    }
    EffectiveField e = combine(model, dw, grid);
    const int n = transport_substeps(0.5 * sup_norm(e.sigma) * band_radius(grid));
    const double h = 1.0 / n;
    e.sigma.x *= h;
    e.sigma.y *= h;
    e.div *= h;
    ScalarField out = eta;
    for (int sub = 0; sub < n; ++sub) {
        ScalarField next = out;
        if (!eta_dot_source.empty()) next.axpy(dt * h, eta_dot_source);
        const ScalarField b0 = advect(e.sigma, e.div, out, grid);
        ScalarField pred = next;
        pred.axpy(0.5, b0);
        const ScalarField b1 = advect(e.sigma, e.div, pred, grid);
        next.axpy(0.25, b0);
        next.axpy(0.25, b1);
        out = std::move(next);
    }
    require_finite(out, "eta");
    return out;
}

ScalarField step_kinematic_sde(const ScalarField& eta, const ScalarField& eta_dot_source, const NoiseModel& model,
                               std::uint64_t path, std::uint64_t step, double dt, const SpectralGrid& grid)
{
    return step_kinematic_sde(eta, eta_dot_source, model, sample_increments(model, path, step, dt).dw, dt, grid);
}

ShellStepper::ShellStepper(const ShellParams& params, const SpectralGrid& grid, double dt, ScalarField forcing)
    : params_(params), grid_(grid), dt_(dt), forcing_(std::move(forcing))
{
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
    if (!forcing_.empty() && !grid.matches(forcing_)) throw ValidationError("forcing does not match the grid");
    band_radius_ = band_radius(grid);
    propagators_.reserve(grid.n1() * grid.n2c());
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2c(); ++j) {
            const Vec2 k(grid.k1(i), grid.k2(j));
            propagators_.push_back(linear_propagator(params, k, dt));
            const ModeClassification m = dispersion(params, k);
            if (m.kind == ModeKind::Unstable) max_growth_ = std::max(max_growth_, m.rate * dt);
        }
}

std::string ShellStepper::stability_message() const
{
    std::ostringstream s;
    s << "StabilityWarning: unstable mode with lambda*dt = " << max_growth_ << " > 0.5";
    return s.str();
}

void ShellStepper::stochastic_substep(ShellState& s, const NoiseModel& model, const std::vector<double>& dw) const
{
    const double kick = 0.5 * dt_ / params_.mass();
    if (model.n_fields() == 0 || all_zero(dw)) {
        if (!forcing_.empty()) s.eta_dot.axpy(kick, forcing_);
        return;
    }
    EffectiveField e = combine(model, dw, grid_);
    const int n = transport_substeps(sup_norm(e.sigma) * band_radius_ + 0.5 * max_abs(e.div));
    const double h = 1.0 / n;
    e.sigma.x *= h;
    e.sigma.y *= h;
    e.div *= h;
    // F(eta, eta_dot) = (1/2 advect eta, transport eta_dot + kick f) per substep
    auto rhs = [&](const ScalarField& eta, const ScalarField& eta_dot) {
        ScalarField a = advect(e.sigma, e.div, eta, grid_);
        a *= 0.5;
        ScalarField b = transport_operator(e.sigma, eta_dot, grid_);
        if (!forcing_.empty()) b.axpy(kick * h, forcing_);
        return std::pair{std::move(a), std::move(b)};
    };
    for (int sub = 0; sub < n; ++sub) {
        const auto [fa, fb] = rhs(s.eta, s.eta_dot);
        const auto [ga, gb] = rhs(s.eta + fa, s.eta_dot + fb);
        s.eta.axpy(0.5, fa);
        s.eta.axpy(0.5, ga);
        s.eta_dot.axpy(0.5, fb);
        s.eta_dot.axpy(0.5, gb);
    }
}

void ShellStepper::deterministic_substep(ShellState& s) const
{
    Spectrum a = grid_.forward(s.eta);
    Spectrum b = grid_.forward(s.eta_dot);
    for (std::size_t m = 0; m < a.c.size(); ++m) {
        const Eigen::Matrix2d& p = propagators_[m];
        const Complex x = a.c[m], v = b.c[m];
        a.c[m] = p(0, 0) * x + p(0, 1) * v;
        b.c[m] = p(1, 0) * x + p(1, 1) * v;
    }
    s.eta = grid_.inverse(std::move(a));
    s.eta_dot = grid_.inverse(std::move(b));
}

ShellState ShellStepper::step(const ShellState& s, const NoiseModel& model, const IncrementBlock& inc) const
{
    if (!grid_.matches(s.eta) || !grid_.matches(s.eta_dot)) throw ValidationError("state does not match the grid");
    if (inc.dw_first.size() != model.n_fields() || inc.dw_second.size() != model.n_fields())
        throw ValidationError("increment count does not match the noise model");
    ShellState out = s;
    stochastic_substep(out, model, inc.dw_first);
    deterministic_substep(out);
    stochastic_substep(out, model, inc.dw_second);
    out.t = s.t + dt_;
    require_finite(out.eta, "eta");
    require_finite(out.eta_dot, "eta_dot");
    return out;
}

ShellState ShellStepper::step(const ShellState& s, const NoiseModel& model, std::uint64_t path, std::uint64_t step) const
{
    return this->step(s, model, sample_increments(model, path, step, dt_));
}

ShellState step_shell_spde(const ShellState& s, const ShellParams& params, const NoiseModel& model, std::uint64_t path,
                           std::uint64_t step, double dt, const SpectralGrid& grid, const ScalarField& forcing)
{
    return ShellStepper(params, grid, dt, forcing).step(s, model, path, step);
}

std::vector<double> modal_invariants(const ShellState& s, const ShellParams& params, const SpectralGrid& grid)
{
    const Spectrum a = grid.forward(s.eta);
    const Spectrum b = grid.forward(s.eta_dot);
    std::vector<double> out;
    out.reserve(a.c.size());
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2c(); ++j) {
            const double sym = symbol_of(params, Vec2(grid.k1(i), grid.k2(j)));
            out.push_back(params.mass() * std::norm(b(i, j)) + sym * std::norm(a(i, j)));
        }
    return out;
}

} // namespace koiter
