#include "koiter/spectral.hpp"

#include "koiter/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace koiter {

namespace {

// The FFTW planner is not thread-safe; execution through the new-array
// interface is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Per-thread SIMD-aligned transform buffers. Every transform runs through
// them, so the aligned plans always see the alignment they were made for and
// results do not depend on where the caller's data lives.
struct Scratch {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    std::size_t n_real = 0;
    std::size_t n_spec = 0;

    ~Scratch()
    {
        fftw_free(real);
        fftw_free(spec);
    }

    void reserve(std::size_t nr, std::size_t nc)
    {
        if (nr > n_real) {
            fftw_free(real);
            real = fftw_alloc_real(nr);
            n_real = nr;
        }
        if (nc > n_spec) {
            fftw_free(spec);
            spec = fftw_alloc_complex(nc);
            n_spec = nc;
        }
    }
};

Scratch& scratch(std::size_t nr, std::size_t nc)
{
    thread_local Scratch s;
    s.reserve(nr, nc);
    return s;
}

} // namespace

struct SpectralGrid::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    Plans(std::size_t n1, std::size_t n2)
    {
        const int a = static_cast<int>(n1);
        const int b = static_cast<int>(n2);
        // FFTW_ESTIMATE picks the algorithm without timing runs, so the plan
        // (and the rounding) is the same in every process.
        const unsigned flags = FFTW_ESTIMATE;
        double* real = fftw_alloc_real(n1 * n2);
        fftw_complex* spec = fftw_alloc_complex(n1 * (n2 / 2 + 1));
        std::lock_guard lock(planner_mutex());
        r2c = fftw_plan_dft_r2c_2d(a, b, real, spec, flags);
        c2r = fftw_plan_dft_c2r_2d(a, b, spec, real, flags);
        fftw_free(real);
        fftw_free(spec);
    }

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }

    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

SpectralGrid::SpectralGrid(std::size_t n1, std::size_t n2, Extents extents, Vec2 origin)
    : n1_(n1), n2_(n2), extents_(extents), origin_(std::move(origin))
{
    if (n1 < 8 || n2 < 8 || !is_power_of_two(n1) || !is_power_of_two(n2))
        throw BadGridSize("grid sizes must be powers of two and >= 8, got "
                          + std::to_string(n1) + "x" + std::to_string(n2));
    if (!(extents.ly1 > 0.0) || !(extents.ly2 > 0.0) || !std::isfinite(extents.ly1)
        || !std::isfinite(extents.ly2))
        throw BadGridSize("grid extents must be positive and finite");
    plans_ = std::make_shared<const Plans>(n1, n2);
}

Vec2 SpectralGrid::node(std::size_t i, std::size_t j) const
{
    return {origin_.x() + static_cast<double>(i) * dy1(), origin_.y() + static_cast<double>(j) * dy2()};
}

long SpectralGrid::mode1(std::size_t i) const noexcept
{
    const long m = static_cast<long>(i);
    return i <= n1_ / 2 ? m : m - static_cast<long>(n1_);
}

double SpectralGrid::k1(std::size_t i) const noexcept
{
    return 2.0 * std::numbers::pi * static_cast<double>(mode1(i)) / extents_.ly1;
}

double SpectralGrid::k2(std::size_t j) const noexcept
{
    return 2.0 * std::numbers::pi * static_cast<double>(j) / extents_.ly2;
}

Vec2 SpectralGrid::wavevector(long m1, long m2) const
{
    return {2.0 * std::numbers::pi * static_cast<double>(m1) / extents_.ly1,
            2.0 * std::numbers::pi * static_cast<double>(m2) / extents_.ly2};
}

Spectrum SpectralGrid::zero_spectrum() const
{
    return Spectrum{n1_, n2c(), std::vector<Complex>(n1_ * n2c())};
}

ScalarField SpectralGrid::sample(const std::function<double(const Vec2&)>& f) const
{
    ScalarField out(n1_, n2_);
    for (std::size_t i = 0; i < n1_; ++i)
        for (std::size_t j = 0; j < n2_; ++j) out(i, j) = f(node(i, j));
    return out;
}

Spectrum SpectralGrid::forward(const ScalarField& v) const
{
    const std::size_t nc = n1_ * n2c();
    Scratch& b = scratch(v.size(), nc);
    std::copy(v.data(), v.data() + v.size(), b.real);
    fftw_execute_dft_r2c(plans_->r2c, b.real, b.spec);
    const auto* c = reinterpret_cast<const Complex*>(b.spec);
    return Spectrum{n1_, n2c(), std::vector<Complex>(c, c + nc)};
}

namespace {

// c2r of the scratch spectrum, scaled by 1/(n1 n2).
ScalarField finish_inverse(fftw_plan plan, Scratch& b, std::size_t n1, std::size_t n2)
{
    fftw_execute_dft_c2r(plan, b.spec, b.real);
    const double scale = 1.0 / static_cast<double>(n1 * n2);
    std::vector<double> out(b.real, b.real + n1 * n2);
    for (double& x : out) x *= scale;
    return ScalarField(n1, n2, std::move(out));
}

} // namespace

ScalarField SpectralGrid::inverse(const Spectrum& s) const
{
    Scratch& b = scratch(n1_ * n2_, s.c.size());
    std::memcpy(static_cast<void*>(b.spec), s.c.data(), s.c.size() * sizeof(fftw_complex));
    return finish_inverse(plans_->c2r, b, n1_, n2_);
}

ScalarField SpectralGrid::inverse_derivative(const Spectrum& s, int axis) const
{
    Scratch& b = scratch(n1_ * n2_, s.c.size());
    auto* out = reinterpret_cast<Complex*>(b.spec);
    const std::size_t nc = n2c();
    for (std::size_t i = 0; i < n1_; ++i) {
        const double k1v = is_nyquist1(i) ? 0.0 : k1(i);
        for (std::size_t j = 0; j < nc; ++j) {
            const double k = axis == 0 ? k1v : (is_nyquist2(j) ? 0.0 : k2(j));
            const Complex v = s.c[i * nc + j];
            out[i * nc + j] = Complex(-k * v.imag(), k * v.real());
        }
    }
    return finish_inverse(plans_->c2r, b, n1_, n2_);
}

double SpectralGrid::integrate(const ScalarField& f) const
{
    double total = 0.0;
    for (std::size_t i = 0; i < n1_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n2_; ++j) row += f(i, j);
        total += row;
    }
    return total * cell_area();
}

double SpectralGrid::inner(const ScalarField& u, const ScalarField& v) const
{
    return node_dot(u, v) * cell_area();
}

double SpectralGrid::l2_norm(const ScalarField& f) const { return std::sqrt(inner(f, f)); }

bool in_dealiased_band(const SpectralGrid& grid, std::size_t i, std::size_t j) noexcept
{
    const auto m1 = static_cast<std::size_t>(std::labs(grid.mode1(i)));
    return 3 * m1 < grid.n1() && 3 * j < grid.n2();
}

void dealias(Spectrum& s, const SpectralGrid& grid)
{
    for (std::size_t i = 0; i < s.n1; ++i)
        for (std::size_t j = 0; j < s.n2c; ++j)
            if (!in_dealiased_band(grid, i, j)) s(i, j) = 0.0;
}

namespace {

// Multiply a spectrum by i*k along one axis; Nyquist entries become zero.
Spectrum derivative_spectrum(const Spectrum& in, const SpectralGrid& grid, int axis)
{
    Spectrum out = in;
    const Complex I(0.0, 1.0);
    for (std::size_t i = 0; i < in.n1; ++i) {
        for (std::size_t j = 0; j < in.n2c; ++j) {
            const bool nyq = axis == 0 ? grid.is_nyquist1(i) : grid.is_nyquist2(j);
            const double k = axis == 0 ? grid.k1(i) : grid.k2(j);
            out(i, j) = nyq ? Complex(0.0) : I * k * in(i, j);
        }
    }
    return out;
}

} // namespace

VectorField gradient(const ScalarField& v, const SpectralGrid& grid)
{
    const Spectrum s = grid.forward(v);
    return {grid.inverse(derivative_spectrum(s, grid, 0)), grid.inverse(derivative_spectrum(s, grid, 1))};
}

ScalarField divergence(const VectorField& u, const SpectralGrid& grid)
{
    Spectrum a = derivative_spectrum(grid.forward(u.x), grid, 0);
    const Spectrum b = derivative_spectrum(grid.forward(u.y), grid, 1);
    for (std::size_t k = 0; k < a.c.size(); ++k) a.c[k] += b.c[k];
    return grid.inverse(std::move(a));
}

ScalarField laplacian(const ScalarField& v, const SpectralGrid& grid)
{
    Spectrum s = grid.forward(v);
    for (std::size_t i = 0; i < s.n1; ++i)
        for (std::size_t j = 0; j < s.n2c; ++j) {
            const double kk = grid.k1(i) * grid.k1(i) + grid.k2(j) * grid.k2(j);
            s(i, j) *= -kk;
        }
    return grid.inverse(std::move(s));
}

ScalarField biharmonic(const ScalarField& v, const SpectralGrid& grid)
{
    Spectrum s = grid.forward(v);
    for (std::size_t i = 0; i < s.n1; ++i)
        for (std::size_t j = 0; j < s.n2c; ++j) {
            const double kk = grid.k1(i) * grid.k1(i) + grid.k2(j) * grid.k2(j);
            s(i, j) *= kk * kk;
        }
    return grid.inverse(std::move(s));
}

Hessian hessian(const ScalarField& v, const SpectralGrid& grid)
{
    const Spectrum s = grid.forward(v);
    Spectrum s11 = s;
    Spectrum s22 = s;
    for (std::size_t i = 0; i < s.n1; ++i)
        for (std::size_t j = 0; j < s.n2c; ++j) {
            s11(i, j) *= -grid.k1(i) * grid.k1(i);
            s22(i, j) *= -grid.k2(j) * grid.k2(j);
        }
    Spectrum s12 = derivative_spectrum(derivative_spectrum(s, grid, 0), grid, 1);
    return {grid.inverse(std::move(s11)), grid.inverse(std::move(s12)), grid.inverse(std::move(s22))};
}

} // namespace koiter
