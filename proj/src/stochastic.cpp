#include "koiter/stochastic.hpp"

#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/io.hpp"
#include "koiter/rng.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace koiter {

namespace {

using VecFn = std::function<Vec2(const Vec2&)>;

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
    }
    return out;
}

NoiseField sample_analytic(const std::string& id, const VecFn& fn, const SpectralGrid& grid)
{
    NoiseField f{id, {grid.zeros(), grid.zeros()}, {}};
    const Extents ext = grid.extents();
    double defect = 0.0;
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2(); ++j) {
            const Vec2 y = grid.node(i, j);
            const Vec2 v = fn(y);
            if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw BadFieldSpec("noise field '" + id + "' is not finite");
            f.sigma.x(i, j) = v[0];
            f.sigma.y(i, j) = v[1];
            const Vec2 a = fn(y + Vec2(ext.ly1, 0.0));
            const Vec2 b = fn(y + Vec2(0.0, ext.ly2));
            defect = std::max({defect, (a - v).norm() / std::max(1.0, v.norm()), (b - v).norm() / std::max(1.0, v.norm())});
        }
    if (defect > 1e-9) {
        std::ostringstream msg;
        msg << "noise field '" << id << "' is not periodic on the grid (defect " << defect << ")";
        throw BadFieldSpec(msg.str());
    }
    f.div = divergence(f.sigma, grid);
    return f;
}

ScalarField load_component(const std::string& path, const SpectralGrid& grid)
{
    GridDump d;
    try {
        d = read_grid_dump(path);
    } catch (const Error& e) {
        throw BadFieldSpec("cannot load noise component '" + path + "': " + e.what());
    }
    if (!grid.matches(d.field)) throw BadFieldSpec("noise component '" + path + "' does not match the grid");
    if (!all_finite(d.field)) throw BadFieldSpec("noise component '" + path + "' is not finite");
    return d.field;
}

// Appends the fields of one registry entry. With grid == nullptr only the
// syntax is checked.
void expand_entry(const std::string& entry, const SpectralGrid* grid, std::vector<NoiseField>& out)
{
    const auto colon = entry.find(':');
    const std::string kind = entry.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string() : entry.substr(colon + 1);

    if (kind == "none" && colon == std::string::npos) return;
    if (kind == "figure3" && colon == std::string::npos) {
        if (!grid) return;
        out.push_back(sample_analytic(
            "figure3.1", [](const Vec2& y) { return Vec2(2.0 * std::sin(y[0]), -2.0 * std::cos(y[1])); }, *grid));
        out.push_back(sample_analytic(
            "figure3.2", [](const Vec2& y) { return Vec2(-2.0 * std::cos(y[0]), 2.0 * std::sin(y[1])); }, *grid));
        return;
    }
    if (kind == "divfree" && args == "k1") {
        if (!grid) return;
        // stream function psi = cos y1 cos y2, sigma = (d2 psi, -d1 psi)
        out.push_back(sample_analytic(
            "divfree:k1",
            [](const Vec2& y) { return Vec2(-std::cos(y[0]) * std::sin(y[1]), std::sin(y[0]) * std::cos(y[1])); }, *grid));
        return;
    }
    if (kind == "const") {
        const auto parts = split(args, ',');
        if (parts.size() != 2) throw BadFieldSpec("const noise needs 'const:cx,cy'");
        const Vec2 c(parse_real(parts[0]), parse_real(parts[1]));
        if (!grid) return;
        out.push_back(sample_analytic(entry, [c](const Vec2&) { return c; }, *grid));
        return;
    }
    if (kind == "grid") {
        const auto parts = split(args, ',');
        if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
            throw BadFieldSpec("grid noise needs 'grid:<path x>,<path y>'");
        if (!grid) return;
        NoiseField f{entry, {load_component(parts[0], *grid), load_component(parts[1], *grid)}, {}};
        f.div = divergence(f.sigma, *grid);
        out.push_back(std::move(f));
        return;
    }
    throw BadFieldSpec("unknown noise field '" + entry + "'");
}

std::vector<NoiseField> expand(const std::string& spec, const SpectralGrid* grid)
{
    std::vector<NoiseField> fields;
    for (const auto& entry : split(spec, ';')) {
        if (entry.empty()) throw BadFieldSpec("empty entry in noise spec '" + spec + "'");
        expand_entry(entry, grid, fields);
    }
    return fields;
}

// Spectrum of P v, and the filtered field itself.
struct Filtered {
    Spectrum spec;
    ScalarField field;
};

Filtered filtered(const ScalarField& v, const SpectralGrid& grid)
{
    Filtered f{grid.forward(v), {}};
    dealias(f.spec, grid);
    f.field = grid.inverse(f.spec);
    return f;
}

// P [ 1/2 sigma . D(Pv) + c * (div sigma) Pv + 1/2 D . (sigma Pv) ]
ScalarField skew_form(const VectorField& sigma, const ScalarField* div_sigma, double div_coeff, const ScalarField& v,
                      const SpectralGrid& grid)
{
    const Filtered pv = filtered(v, grid);

    const ScalarField g1 = grid.inverse_derivative(pv.spec, 0);
    const ScalarField g2 = grid.inverse_derivative(pv.spec, 1);

    const std::size_t n = v.size();
    ScalarField pointwise = grid.zeros();
    ScalarField f1 = grid.zeros(), f2 = grid.zeros();
    for (std::size_t k = 0; k < n; ++k) {
        const double p = pv.field[k];
        pointwise[k] = 0.5 * (sigma.x[k] * g1[k] + sigma.y[k] * g2[k]);
        if (div_sigma) pointwise[k] += div_coeff * (*div_sigma)[k] * p;
        f1[k] = sigma.x[k] * p;
        f2[k] = sigma.y[k] * p;
    }
    Spectrum out = grid.forward(pointwise);
    const Spectrum s1 = grid.forward(f1);
    const Spectrum s2 = grid.forward(f2);
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2c(); ++j) {
            const double k1 = grid.is_nyquist1(i) ? 0.0 : grid.k1(i);
            const double k2 = grid.is_nyquist2(j) ? 0.0 : grid.k2(j);
            out(i, j) += 0.5 * Complex(0.0, 1.0) * (k1 * s1(i, j) + k2 * s2(i, j));
        }
    dealias(out, grid);
    return grid.inverse(out);
}

inline std::size_t wrap(long i, std::size_t n)
{
    const long m = static_cast<long>(n);
    long r = i % m;
    if (r < 0) r += m;
    return static_cast<std::size_t>(r);
}

struct Stencil {
    std::size_t idx[4];
    double w[4];
};

inline Stencil stencil(double pos, std::size_t n)
{
    const double base = std::floor(pos);
    const double t = pos - base;
    const long b = static_cast<long>(base);
    Stencil s;
    s.w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    s.w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    s.w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    s.w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    for (int k = 0; k < 4; ++k) s.idx[k] = wrap(b - 1 + k, n);
    return s;
}

// Interpolates both components of a vector field with one stencil.
inline Vec2 interpolate_pair(const VectorField& f, double p1, double p2)
{
    const Stencil a = stencil(p1, f.x.n1());
    const Stencil b = stencil(p2, f.x.n2());
    double vx = 0.0, vy = 0.0;
    for (int r = 0; r < 4; ++r) {
        double rx = 0.0, ry = 0.0;
        for (int c = 0; c < 4; ++c) {
            rx += b.w[c] * f.x(a.idx[r], b.idx[c]);
            ry += b.w[c] * f.y(a.idx[r], b.idx[c]);
        }
        vx += a.w[r] * rx;
        vy += a.w[r] * ry;
    }
    return {vx, vy};
}

} // namespace

NoiseModel::NoiseModel(std::string spec, std::vector<NoiseField> fields, std::uint64_t master_seed)
    : spec_(std::move(spec)), fields_(std::move(fields)), master_seed_(master_seed)
{
}

NoiseModel make_noise_model(const std::string& spec, const SpectralGrid& grid, std::uint64_t master_seed)
{
    return NoiseModel(spec, expand(spec, &grid), master_seed);
}

void check_noise_spec(const std::string& spec) { (void)expand(spec, nullptr); }

IncrementBlock sample_increments(const NoiseModel& model, std::uint64_t path, std::uint64_t step, double dt)
{
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
    IncrementBlock b;
    b.path = path;
    b.step = step;
    const std::size_t n = model.n_fields();
    b.dw_first.resize(n);
    b.dw_second.resize(n);
    b.dw.resize(n);
    const std::uint64_t seed = derive_path_seed(model.master_seed(), path);
    const double half = std::sqrt(0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [z1, z2] = standard_normal_pair(seed, step, static_cast<std::uint32_t>(i));
        b.dw_first[i] = half * z1;
        b.dw_second[i] = half * z2;
        b.dw[i] = b.dw_first[i] + b.dw_second[i];
    }
    return b;
}

EffectiveField combine(const NoiseModel& model, const std::vector<double>& coeff, const SpectralGrid& grid)
{
    EffectiveField e{{grid.zeros(), grid.zeros()}, grid.zeros()};
    for (std::size_t i = 0; i < model.n_fields(); ++i) {
        const NoiseField& f = model.field(i);
        e.sigma.x.axpy(coeff[i], f.sigma.x);
        e.sigma.y.axpy(coeff[i], f.sigma.y);
        e.div.axpy(coeff[i], f.div);
    }
    return e;
}

ScalarField transport_operator(const VectorField& sigma, const ScalarField& v, const SpectralGrid& grid)
{
    return skew_form(sigma, nullptr, 0.0, v, grid);
}

ScalarField advect(const VectorField& sigma, const ScalarField& div_sigma, const ScalarField& v, const SpectralGrid& grid)
{
    return skew_form(sigma, &div_sigma, -0.5, v, grid);
}

ScalarField advect(const VectorField& sigma, const ScalarField& v, const SpectralGrid& grid)
{
    return advect(sigma, divergence(sigma, grid), v, grid);
}

double interpolate_cubic(const ScalarField& f, double pos1, double pos2)
{
    const Stencil a = stencil(pos1, f.n1());
    const Stencil b = stencil(pos2, f.n2());
    double v = 0.0;
    for (int r = 0; r < 4; ++r) {
        double row = 0.0;
        for (int c = 0; c < 4; ++c) row += b.w[c] * f(a.idx[r], b.idx[c]);
        v += a.w[r] * row;
    }
    return v;
}

ScalarField characteristics_oracle(const ScalarField& eta0, const NoiseModel& model, std::uint64_t path, double dt,
                                   std::uint64_t n_steps, const SpectralGrid& grid, int substeps)
{
    std::vector<std::vector<double>> dw;
    dw.reserve(n_steps);
    for (std::uint64_t s = 0; s < n_steps; ++s) dw.push_back(sample_increments(model, path, s, dt).dw);
    return characteristics_oracle(eta0, model, dw, grid, substeps);
}

ScalarField characteristics_oracle(const ScalarField& eta0, const NoiseModel& model,
                                   const std::vector<std::vector<double>>& dw, const SpectralGrid& grid, int substeps)
{
    if (!grid.matches(eta0)) throw ValidationError("eta0 does not match the grid");
    if (substeps < 1) throw ValidationError("substeps must be >= 1");
    const std::size_t n = grid.size();
    // positions in cell units, stored as node index plus displacement so that
    // a zero flow reproduces eta0 exactly
    std::vector<double> d1(n, 0.0), d2(n, 0.0);
    if (model.n_fields() > 0) {
        const double inv1 = 1.0 / grid.dy1();
        const double inv2 = 1.0 / grid.dy2();
        const double h = 1.0 / substeps;
        for (std::size_t s = dw.size(); s-- > 0;) {
            bool any = false;
            for (double v : dw[s]) any = any || v != 0.0;
            if (!any) continue;
            const EffectiveField e = combine(model, dw[s], grid);
            // velocity 1/2 sigma_eff in cell units
            VectorField vel{e.sigma.x, e.sigma.y};
            vel.x *= 0.5 * inv1;
            vel.y *= 0.5 * inv2;
            for (std::size_t i = 0; i < grid.n1(); ++i)
                for (std::size_t j = 0; j < grid.n2(); ++j) {
                    const std::size_t k = i * grid.n2() + j;
                    double x1 = d1[k], x2 = d2[k];
                    for (int sub = 0; sub < substeps; ++sub) {
                        const Vec2 a = interpolate_pair(vel, static_cast<double>(i) + x1, static_cast<double>(j) + x2);
                        const Vec2 b = interpolate_pair(vel, static_cast<double>(i) + x1 + h * a[0],
                                                        static_cast<double>(j) + x2 + h * a[1]);
                        x1 += 0.5 * h * (a[0] + b[0]);
                        x2 += 0.5 * h * (a[1] + b[1]);
                    }
                    d1[k] = x1;
                    d2[k] = x2;
                }
        }
    }
    ScalarField out = grid.zeros();
    for (std::size_t i = 0; i < grid.n1(); ++i)
        for (std::size_t j = 0; j < grid.n2(); ++j) {
            const std::size_t k = i * grid.n2() + j;
            out[k] = (d1[k] == 0.0 && d2[k] == 0.0)
                         ? eta0[k]
                         : interpolate_cubic(eta0, static_cast<double>(i) + d1[k], static_cast<double>(j) + d2[k]);
        }
    return out;
}

} // namespace koiter
