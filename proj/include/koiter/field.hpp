#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace koiter {

/// Scalar samples on a uniform periodic n1 x n2 grid.
/// Storage is row-major with the y2 index varying fastest.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(std::size_t n1, std::size_t n2, double value = 0.0)
        : n1_(n1), n2_(n2), data_(n1 * n2, value) {}
    /// Takes ownership of row-major values; data.size() must be n1 * n2.
    ScalarField(std::size_t n1, std::size_t n2, std::vector<double> data);

    std::size_t n1() const noexcept { return n1_; }
    std::size_t n2() const noexcept { return n2_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * n2_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n2_ + j]; }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool same_shape(const ScalarField& o) const noexcept { return n1_ == o.n1_ && n2_ == o.n2_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    /// this += a * x
    ScalarField& axpy(double a, const ScalarField& x);

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
    std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Two-component vector field on the grid (surface coordinates y1, y2).
struct VectorField {
    ScalarField x;
    ScalarField y;
};

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
double max_abs(const ScalarField& f);
bool all_finite(const ScalarField& f);
/// Plain node sum of u*v (no cell weight).
double node_dot(const ScalarField& u, const ScalarField& v);

} // namespace koiter
