#include "koiter/field.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace koiter {

ScalarField::ScalarField(std::size_t n1, std::size_t n2, std::vector<double> data)
    : n1_(n1), n2_(n2), data_(std::move(data))
{
    if (data_.size() != n1 * n2) throw std::invalid_argument("ScalarField: data size does not match the shape");
}

ScalarField& ScalarField::operator+=(const ScalarField& o)
{
    assert(same_shape(o));
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o)
{
    assert(same_shape(o));
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s)
{
    for (auto& v : data_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x)
{
    assert(same_shape(x));
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += a * x.data_[k];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double min_value(const ScalarField& f)
{
    auto v = f.values();
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

double max_value(const ScalarField& f)
{
    auto v = f.values();
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double max_abs(const ScalarField& f)
{
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const ScalarField& f)
{
    return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

double node_dot(const ScalarField& u, const ScalarField& v)
{
    assert(u.same_shape(v));
    // Row partial sums first, then rows in order: the reduction order is fixed.
    double total = 0.0;
    for (std::size_t i = 0; i < u.n1(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < u.n2(); ++j) row += u(i, j) * v(i, j);
        total += row;
    }
    return total;
}

} // namespace koiter
