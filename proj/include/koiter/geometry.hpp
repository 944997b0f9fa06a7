#pragma once

// Reference and deformed mid-surface geometry.
//
// A Chart is an analytic parametrisation phi(y1, y2) of the mid-surface over
// a periodic rectangle together with its partial derivatives. From it we
// build the covariant/contravariant frame, the metric A and curvature B, and
// for a normal displacement eta*n the nonlinear and linearised change of
// metric G and modified change of curvature R#.
//
// Orientation: n = (d1 phi x d2 phi) / |d1 phi x d2 phi|. For the built-in
// sphere this is the outward normal (B = -A/R on the sphere).

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace koiter {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Linear-independence threshold for |d1 phi x d2 phi|.
inline constexpr double kDegenerateWeight = 1e-10;

/// Symmetric 2x2 surface tensor; a21 is a12.
struct SymTensor2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    double operator()(int i, int j) const noexcept
    {
        if (i == j) return i == 0 ? a11 : a22;
        return a12;
    }
    Eigen::Matrix2d full() const
    {
        Eigen::Matrix2d m;
        m << a11, a12, a12, a22;
        return m;
    }
    double frobenius() const noexcept;

    SymTensor2& operator+=(const SymTensor2& o) noexcept
    {
        a11 += o.a11;
        a12 += o.a12;
        a22 += o.a22;
        return *this;
    }
    SymTensor2& operator-=(const SymTensor2& o) noexcept
    {
        a11 -= o.a11;
        a12 -= o.a12;
        a22 -= o.a22;
        return *this;
    }
    SymTensor2& operator*=(double s) noexcept
    {
        a11 *= s;
        a12 *= s;
        a22 *= s;
        return *this;
    }
    friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) noexcept { return a += b; }
    friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) noexcept { return a -= b; }
    friend SymTensor2 operator*(double s, SymTensor2 a) noexcept { return a *= s; }
    friend bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

/// Value, gradient and Hessian of the normal displacement at one point.
struct DisplacementJet {
    double eta = 0.0;
    Vec2 grad_eta = Vec2::Zero();
    SymTensor2 hess_eta;
};

struct Frame {
    Vec3 t1;
    Vec3 t2;
    Vec3 n;
    double w = 0.0; ///< area weight |t1 x t2|
    Vec3 t1_star;
    Vec3 t2_star;
};

/// Second partials of phi, ordered (11, 12, 22).
using SecondPartials = std::array<Vec3, 3>;
/// Third partials of phi, ordered (111, 112, 122, 222).
using ThirdPartials = std::array<Vec3, 4>;

class Chart {
public:
    using PointMap = std::function<Vec3(const Vec2&)>;
    using FirstMap = std::function<std::array<Vec3, 2>(const Vec2&)>;
    using SecondMap = std::function<SecondPartials(const Vec2&)>;
    using ThirdMap = std::function<ThirdPartials(const Vec2&)>;

    Chart(std::string name, Vec2 periods, PointMap phi, FirstMap d_phi, SecondMap d2_phi,
          ThirdMap d3_phi = {});

    const std::string& name() const noexcept { return name_; }
    const Vec2& periods() const noexcept { return periods_; }
    bool has_third_derivatives() const noexcept { return static_cast<bool>(d3_phi_); }

    /// Reduce y into [0, period) per component.
    Vec2 reduce(const Vec2& y) const;

    Vec3 phi(const Vec2& y) const { return phi_(y); }
    std::array<Vec3, 2> d_phi(const Vec2& y) const { return d_phi_(y); }
    SecondPartials d2_phi(const Vec2& y) const { return d2_phi_(y); }
    /// Empty when the chart carries no third-order data.
    std::optional<ThirdPartials> d3_phi(const Vec2& y) const;

private:
    std::string name_;
    Vec2 periods_;
    PointMap phi_;
    FirstMap d_phi_;
    SecondMap d2_phi_;
    ThirdMap d3_phi_;
};

// Built-in charts. All have periods (2*pi, 2*pi).
Chart flat_chart();
/// phi = R (sin y1 cos y2, sin y1 sin y2, cos y1); degenerate at y1 = 0, pi.
Chart sphere_chart(double radius);
/// phi = (R cos y1, R sin y1, y2).
Chart cylinder_chart(double radius);
/// Torus of revolution with tube radius r < R, optionally mapped by x -> L x + b.
Chart torus_chart(double major, double minor, const Eigen::Matrix3d& linear = Eigen::Matrix3d::Identity(),
                  const Vec3& shift = Vec3::Zero());
/// Torus with radii and an invertible affine map drawn from `seed`.
Chart random_torus_chart(unsigned long long seed);
/// Graph phi = (y1, y2, h(y1, y2)) for a registered height id ("wave", "ripple").
Chart graph_chart(const std::string& height_id);

/// Registry lookup: "flat", "sphere:R", "cylinder:R", "torus:R,r", "graph:<id>".
/// Throws BadFieldSpec for unknown ids.
Chart make_chart(const std::string& id);
std::vector<std::string> registered_chart_ids();

/// Everything about the reference surface needed at one point.
struct SurfacePoint {
    Frame frame;
    SecondPartials d2;
    std::array<Vec3, 2> dn;  ///< d_i n
    std::array<Vec3, 3> d2n; ///< d_ij n, ordered (11, 12, 22)
    SymTensor2 metric;
    SymTensor2 curvature;
};

/// Throws DegenerateChart when w < kDegenerateWeight.
Frame evaluate_frame(const Chart& chart, const Vec2& y);
/// Frame, second partials, normal derivatives and both fundamental forms.
/// d_i n is analytic from second partials; d_ij n is analytic when the chart has
/// third partials, else a 4th-order central difference of d_i n with h = period/4096.
SurfacePoint evaluate_point(const Chart& chart, const Vec2& y);

struct FundamentalForms {
    SymTensor2 A;
    SymTensor2 B;
};
FundamentalForms fundamental_forms(const Chart& chart, const Vec2& y);

/// First and second derivatives of the displacement vector eta*n.
struct NormalDisplacementDerivatives {
    std::array<Vec3, 2> first;  ///< d_i (eta n)
    std::array<Vec3, 3> second; ///< d_ij (eta n), ordered (11, 12, 22)
};
NormalDisplacementDerivatives normal_displacement_derivatives(const SurfacePoint& p, const DisplacementJet& jet);

SymTensor2 change_of_metric(const SurfacePoint& p, const DisplacementJet& jet);
SymTensor2 change_of_metric(const Chart& chart, const Vec2& y, const DisplacementJet& jet);

/// R# from the expansion B_eta = b_eta + n.t., divided by w, minus B.
SymTensor2 modified_change_of_curvature(const SurfacePoint& p, const NormalDisplacementDerivatives& d);
SymTensor2 modified_change_of_curvature(const Chart& chart, const Vec2& y, const DisplacementJet& jet,
                                        const std::array<Vec3, 3>& hess_of_eta_n);
SymTensor2 modified_change_of_curvature(const Chart& chart, const Vec2& y, const DisplacementJet& jet);
/// Same tensor evaluated directly as (n_eta . d_ij phi_eta)/w - B; used to
/// cross-check the expansion.
SymTensor2 modified_change_of_curvature_direct(const SurfacePoint& p, const NormalDisplacementDerivatives& d);

/// (eta / w) times the triple-product matrix d1 phi . (d_ij phi x d2 phi).
SymTensor2 linearized_change_of_metric(const SurfacePoint& p, double eta);
SymTensor2 linearized_change_of_metric(const Chart& chart, const Vec2& y, double eta);

SymTensor2 linearized_change_of_curvature(const SurfacePoint& p, const NormalDisplacementDerivatives& d);
SymTensor2 linearized_change_of_curvature(const Chart& chart, const Vec2& y, const DisplacementJet& jet);

struct ValidationReport {
    bool ok = false;
    double min_weight = 0.0;
    double max_derivative_defect = 0.0;
    double periodicity_defect = 0.0;
    std::vector<std::string> failures;
};

/// Probes a probe_resolution^2 grid: non-degeneracy, consistency of supplied
/// derivatives with 4th-order differences, and periodicity of the partials
/// (phi itself may shift by a constant lattice vector across a period).
ValidationReport validate_chart(const Chart& chart, int probe_resolution);

} // namespace koiter
