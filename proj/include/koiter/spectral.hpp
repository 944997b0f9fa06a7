#pragma once

// Fourier pseudospectral machinery on the periodic rectangle.
//
// Real-to-complex 2D transforms (FFTW) with the half spectrum stored
// row-major: n1 rows by n2/2 + 1 columns. forward() is unnormalized,
// inverse() divides by n1*n2 so inverse(forward(v)) == v.

#include "koiter/field.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace koiter {

using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

struct Extents {
    double ly1 = 0.0;
    double ly2 = 0.0;
};

/// Half-spectrum coefficients of a real field.
struct Spectrum {
    std::size_t n1 = 0;
    std::size_t n2c = 0;
    std::vector<Complex> c;

    Complex& operator()(std::size_t i, std::size_t j) { return c[i * n2c + j]; }
    Complex operator()(std::size_t i, std::size_t j) const { return c[i * n2c + j]; }
};

class SpectralGrid {
public:
    /// n1, n2 must be powers of two and at least 8; throws BadGridSize otherwise.
    /// Nodes sit at origin + (i*ly1/n1, j*ly2/n2).
    SpectralGrid(std::size_t n1, std::size_t n2, Extents extents, Vec2 origin = Vec2::Zero());

    std::size_t n1() const noexcept { return n1_; }
    std::size_t n2() const noexcept { return n2_; }
    std::size_t n2c() const noexcept { return n2_ / 2 + 1; }
    std::size_t size() const noexcept { return n1_ * n2_; }
    const Extents& extents() const noexcept { return extents_; }
    const Vec2& origin() const noexcept { return origin_; }
    double dy1() const noexcept { return extents_.ly1 / static_cast<double>(n1_); }
    double dy2() const noexcept { return extents_.ly2 / static_cast<double>(n2_); }
    double cell_area() const noexcept { return dy1() * dy2(); }
    double area() const noexcept { return extents_.ly1 * extents_.ly2; }

    Vec2 node(std::size_t i, std::size_t j) const;

    /// Signed mode index along y1 for spectral row i (in (-n1/2, n1/2]).
    long mode1(std::size_t i) const noexcept;
    /// Mode index along y2 for half-spectrum column j (0..n2/2).
    long mode2(std::size_t j) const noexcept { return static_cast<long>(j); }
    double k1(std::size_t i) const noexcept;
    double k2(std::size_t j) const noexcept;
    bool is_nyquist1(std::size_t i) const noexcept { return i == n1_ / 2; }
    bool is_nyquist2(std::size_t j) const noexcept { return j == n2_ / 2; }
    /// Wavevector of mode (m1, m2): 2*pi*(m1/ly1, m2/ly2).
    Vec2 wavevector(long m1, long m2) const;

    ScalarField zeros() const { return ScalarField(n1_, n2_); }
    Spectrum zero_spectrum() const;
    ScalarField sample(const std::function<double(const Vec2&)>& f) const;

    Spectrum forward(const ScalarField& v) const;
    ScalarField inverse(const Spectrum& s) const;
    /// inverse(i k_axis s) with the Nyquist entry of that axis zeroed.
    ScalarField inverse_derivative(const Spectrum& s, int axis) const;

    /// Rectangle-rule integral (spectrally accurate for smooth periodic integrands).
    double integrate(const ScalarField& f) const;
    double inner(const ScalarField& u, const ScalarField& v) const;
    double l2_norm(const ScalarField& f) const;

    bool matches(const ScalarField& f) const noexcept { return f.n1() == n1_ && f.n2() == n2_; }

private:
    struct Plans;

    std::size_t n1_;
    std::size_t n2_;
    Extents extents_;
    Vec2 origin_;
    std::shared_ptr<const Plans> plans_;
};

// Differential operators by exact Fourier symbols. Nyquist modes of odd
// derivatives are zeroed.

struct Hessian {
    ScalarField d11;
    ScalarField d12;
    ScalarField d22;
};

VectorField gradient(const ScalarField& v, const SpectralGrid& grid);
ScalarField divergence(const VectorField& u, const SpectralGrid& grid);
ScalarField laplacian(const ScalarField& v, const SpectralGrid& grid);
ScalarField biharmonic(const ScalarField& v, const SpectralGrid& grid);
Hessian hessian(const ScalarField& v, const SpectralGrid& grid);

/// Zero every mode outside the 2/3-rule band (|m| > n/3 in either direction).
void dealias(Spectrum& s, const SpectralGrid& grid);
bool in_dealiased_band(const SpectralGrid& grid, std::size_t i, std::size_t j) noexcept;

} // namespace koiter
