#include "koiter/geometry.hpp"

#include "koiter/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace koiter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double parse_positive(const std::string& text, const std::string& id)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw BadFieldSpec("bad numeric parameter in chart id '" + id + "'");
    }
}

// 4th-order central difference of a vector-valued map along `axis`.
template <class F>
Vec3 central_difference(const F& f, const Vec2& y, int axis, double h)
{
    Vec2 e = Vec2::Zero();
    e[axis] = h;
    return (-f(Vec2(y + 2.0 * e)) + 8.0 * f(Vec2(y + e)) - 8.0 * f(Vec2(y - e)) + f(Vec2(y - 2.0 * e)))
           / (12.0 * h);
}

// d_i n from d_i c, c = t1 x t2.
std::array<Vec3, 2> normal_first_derivatives(const Frame& f, const SecondPartials& d2)
{
    // d_i t1 = phi_{1i}, d_i t2 = phi_{2i}
    const Vec3 dc1 = d2[0].cross(f.t2) + f.t1.cross(d2[1]);
    const Vec3 dc2 = d2[1].cross(f.t2) + f.t1.cross(d2[2]);
    const Vec3 dn1 = (dc1 - f.n * f.n.dot(dc1)) / f.w;
    const Vec3 dn2 = (dc2 - f.n * f.n.dot(dc2)) / f.w;
    return {dn1, dn2};
}

std::array<Vec3, 3> normal_second_derivatives(const Frame& f, const SecondPartials& d2, const ThirdPartials& d3,
                                              const std::array<Vec3, 2>& dn)
{
    // phi_{1i}: (11, 12); phi_{2i}: (12, 22)
    const std::array<Vec3, 2> dt1{d2[0], d2[1]};
    const std::array<Vec3, 2> dt2{d2[1], d2[2]};
    const std::array<Vec3, 2> dc{dt1[0].cross(f.t2) + f.t1.cross(dt2[0]), dt1[1].cross(f.t2) + f.t1.cross(dt2[1])};

    // third partials of phi indexed by a sorted multi-index
    auto phi3 = [&](int a, int b, int c) -> const Vec3& {
        const int ones = (a == 0) + (b == 0) + (c == 0);
        return d3[static_cast<std::size_t>(3 - ones)];
    };

    std::array<Vec3, 3> out;
    const std::array<std::pair<int, int>, 3> pairs{{{0, 0}, {0, 1}, {1, 1}}};
    for (std::size_t q = 0; q < 3; ++q) {
        const auto [i, j] = pairs[q];
        // d_ij c = phi_{1ij} x t2 + phi_{1i} x phi_{2j} + phi_{1j} x phi_{2i} + t1 x phi_{2ij}
        const Vec3 dcij = phi3(0, i, j).cross(f.t2) + dt1[i].cross(dt2[j]) + dt1[j].cross(dt2[i])
                          + f.t1.cross(phi3(1, i, j));
        const Vec3 proj = dcij - f.n * f.n.dot(dcij);
        out[q] = (-dn[j] * f.n.dot(dc[i]) - f.n * dn[j].dot(dc[i]) + proj) / f.w - dn[i] * (f.n.dot(dc[j]) / f.w);
    }
    return out;
}

SymTensor2 sym_from(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

} // namespace

double SymTensor2::frobenius() const noexcept { return std::sqrt(a11 * a11 + 2.0 * a12 * a12 + a22 * a22); }

Chart::Chart(std::string name, Vec2 periods, PointMap phi, FirstMap d_phi, SecondMap d2_phi, ThirdMap d3_phi)
    : name_(std::move(name)), periods_(std::move(periods)), phi_(std::move(phi)), d_phi_(std::move(d_phi)),
      d2_phi_(std::move(d2_phi)), d3_phi_(std::move(d3_phi))
{
}

Vec2 Chart::reduce(const Vec2& y) const
{
    Vec2 r;
    for (int a = 0; a < 2; ++a) {
        const double p = periods_[a];
        double v = y[a];
        if (v < 0.0 || v >= p) {
            v = std::fmod(v, p);
            if (v < 0.0) v += p;
        }
        r[a] = v;
    }
    return r;
}

std::optional<ThirdPartials> Chart::d3_phi(const Vec2& y) const
{
    if (!d3_phi_) return std::nullopt;
    return d3_phi_(y);
}

Chart flat_chart()
{
    return Chart(
        "flat", Vec2(kTwoPi, kTwoPi), [](const Vec2& y) { return Vec3(y[0], y[1], 0.0); },
        [](const Vec2&) { return std::array<Vec3, 2>{Vec3(1, 0, 0), Vec3(0, 1, 0)}; },
        [](const Vec2&) { return SecondPartials{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()}; },
        [](const Vec2&) { return ThirdPartials{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()}; });
}

Chart sphere_chart(double R)
{
    return Chart(
        "sphere:" + std::to_string(R), Vec2(kTwoPi, kTwoPi),
        [R](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            return Vec3(R * s1 * c2, R * s1 * s2, R * c1);
        },
        [R](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            return std::array<Vec3, 2>{R * Vec3(c1 * c2, c1 * s2, -s1), R * Vec3(-s1 * s2, s1 * c2, 0.0)};
        },
        [R](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            return SecondPartials{R * Vec3(-s1 * c2, -s1 * s2, -c1), R * Vec3(-c1 * s2, c1 * c2, 0.0),
                                  R * Vec3(-s1 * c2, -s1 * s2, 0.0)};
        },
        [R](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            return ThirdPartials{R * Vec3(-c1 * c2, -c1 * s2, s1), R * Vec3(s1 * s2, -s1 * c2, 0.0),
                                 R * Vec3(-c1 * c2, -c1 * s2, 0.0), R * Vec3(s1 * s2, -s1 * c2, 0.0)};
        });
}

Chart cylinder_chart(double R)
{
    return Chart(
        "cylinder:" + std::to_string(R), Vec2(kTwoPi, kTwoPi),
        [R](const Vec2& y) { return Vec3(R * std::cos(y[0]), R * std::sin(y[0]), y[1]); },
        [R](const Vec2& y) {
            return std::array<Vec3, 2>{Vec3(-R * std::sin(y[0]), R * std::cos(y[0]), 0.0), Vec3(0, 0, 1)};
        },
        [R](const Vec2& y) {
            return SecondPartials{Vec3(-R * std::cos(y[0]), -R * std::sin(y[0]), 0.0), Vec3::Zero(), Vec3::Zero()};
        },
        [R](const Vec2& y) {
            return ThirdPartials{Vec3(R * std::sin(y[0]), -R * std::cos(y[0]), 0.0), Vec3::Zero(), Vec3::Zero(),
                                 Vec3::Zero()};
        });
}

Chart torus_chart(double Rm, double r, const Eigen::Matrix3d& L, const Vec3& b)
{
    std::ostringstream name;
    name << "torus:" << Rm << "," << r;
    return Chart(
        name.str(), Vec2(kTwoPi, kTwoPi),
        [=](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            const double rho = Rm + r * c1;
            return Vec3(L * Vec3(rho * c2, rho * s2, r * s1) + b);
        },
        [=](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            const double rho = Rm + r * c1;
            return std::array<Vec3, 2>{L * Vec3(-r * s1 * c2, -r * s1 * s2, r * c1), L * Vec3(-rho * s2, rho * c2, 0.0)};
        },
        [=](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            const double rho = Rm + r * c1;
            return SecondPartials{L * Vec3(-r * c1 * c2, -r * c1 * s2, -r * s1), L * Vec3(r * s1 * s2, -r * s1 * c2, 0.0),
                                  L * Vec3(-rho * c2, -rho * s2, 0.0)};
        },
        [=](const Vec2& y) {
            const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
            const double rho = Rm + r * c1;
            return ThirdPartials{L * Vec3(r * s1 * c2, r * s1 * s2, -r * c1), L * Vec3(r * c1 * s2, -r * c1 * c2, 0.0),
                                 L * Vec3(r * s1 * c2, r * s1 * s2, 0.0), L * Vec3(rho * s2, -rho * c2, 0.0)};
        });
}

Chart random_torus_chart(unsigned long long seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> radius(1.5, 3.0);
    std::uniform_real_distribution<double> ratio(0.2, 0.6);
    std::uniform_real_distribution<double> entry(-0.3, 0.3);
    const double Rm = radius(gen);
    const double r = ratio(gen) * Rm;
    // identity plus a small perturbation stays well conditioned
    Eigen::Matrix3d L = Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) L(i, j) += entry(gen);
    const Vec3 b(entry(gen), entry(gen), entry(gen));
    return torus_chart(Rm, r, L, b);
}

namespace {

// Height h(y) with partials: value, (1, 2), (11, 12, 22), (111, 112, 122, 222).
struct Height {
    double h;
    std::array<double, 2> d1;
    std::array<double, 3> d2;
    std::array<double, 4> d3;
};

using HeightFn = Height (*)(const Vec2&);

Height wave_height(const Vec2& y)
{
    constexpr double a = 0.2;
    const double s1 = std::sin(y[0]), c1 = std::cos(y[0]), s2 = std::sin(y[1]), c2 = std::cos(y[1]);
    return {a * s1 * s2,
            {a * c1 * s2, a * s1 * c2},
            {-a * s1 * s2, a * c1 * c2, -a * s1 * s2},
            {-a * c1 * s2, -a * s1 * c2, -a * c1 * s2, -a * s1 * c2}};
}

Height ripple_height(const Vec2& y)
{
    constexpr double a = 0.1;
    const double s = std::sin(2.0 * y[0]), c = std::cos(2.0 * y[0]);
    return {a * c + 0.05 * std::sin(y[1]),
            {-2.0 * a * s, 0.05 * std::cos(y[1])},
            {-4.0 * a * c, 0.0, -0.05 * std::sin(y[1])},
            {8.0 * a * s, 0.0, 0.0, -0.05 * std::cos(y[1])}};
}

const std::map<std::string, HeightFn>& height_registry()
{
    static const std::map<std::string, HeightFn> reg{{"wave", &wave_height}, {"ripple", &ripple_height}};
    return reg;
}

} // namespace

Chart graph_chart(const std::string& height_id)
{
    const auto& reg = height_registry();
    const auto it = reg.find(height_id);
    if (it == reg.end()) throw BadFieldSpec("unknown graph height '" + height_id + "'");
    const HeightFn h = it->second;
    return Chart(
        "graph:" + height_id, Vec2(kTwoPi, kTwoPi), [h](const Vec2& y) { return Vec3(y[0], y[1], h(y).h); },
        [h](const Vec2& y) {
            const Height v = h(y);
            return std::array<Vec3, 2>{Vec3(1, 0, v.d1[0]), Vec3(0, 1, v.d1[1])};
        },
        [h](const Vec2& y) {
            const Height v = h(y);
            return SecondPartials{Vec3(0, 0, v.d2[0]), Vec3(0, 0, v.d2[1]), Vec3(0, 0, v.d2[2])};
        },
        [h](const Vec2& y) {
            const Height v = h(y);
            return ThirdPartials{Vec3(0, 0, v.d3[0]), Vec3(0, 0, v.d3[1]), Vec3(0, 0, v.d3[2]), Vec3(0, 0, v.d3[3])};
        });
}

Chart make_chart(const std::string& id)
{
    if (id == "flat") return flat_chart();
    const auto colon = id.find(':');
    if (colon == std::string::npos) throw BadFieldSpec("unknown chart id '" + id + "'");
    const std::string kind = id.substr(0, colon);
    const std::string arg = id.substr(colon + 1);
    if (kind == "sphere") return sphere_chart(parse_positive(arg, id));
    if (kind == "cylinder") return cylinder_chart(parse_positive(arg, id));
    if (kind == "graph") return graph_chart(arg);
    if (kind == "torus") {
        const auto comma = arg.find(',');
        if (comma == std::string::npos) throw BadFieldSpec("torus chart needs 'torus:R,r'");
        const double Rm = parse_positive(arg.substr(0, comma), id);
        const double r = parse_positive(arg.substr(comma + 1), id);
        if (r >= Rm) throw BadFieldSpec("torus chart needs r < R");
        return torus_chart(Rm, r);
    }
    throw BadFieldSpec("unknown chart id '" + id + "'");
}

std::vector<std::string> registered_chart_ids()
{
    return {"flat", "sphere:R", "cylinder:R", "torus:R,r", "graph:wave", "graph:ripple"};
}

Frame evaluate_frame(const Chart& chart, const Vec2& y_in)
{
    const Vec2 y = chart.reduce(y_in);
    const auto d = chart.d_phi(y);
    Frame f;
    f.t1 = d[0];
    f.t2 = d[1];
    const Vec3 c = f.t1.cross(f.t2);
    f.w = c.norm();
    if (!(f.w >= kDegenerateWeight)) {
        std::ostringstream msg;
        msg << "chart '" << chart.name() << "' is degenerate at (" << y[0] << ", " << y[1] << "), w = " << f.w;
        throw DegenerateChart(msg.str());
    }
    f.n = c / f.w;
    f.t1_star = f.t2.cross(f.n) / f.w;
    f.t2_star = -f.t1.cross(f.n) / f.w;
    return f;
}

SurfacePoint evaluate_point(const Chart& chart, const Vec2& y_in)
{
    const Vec2 y = chart.reduce(y_in);
    SurfacePoint p;
    p.frame = evaluate_frame(chart, y);
    p.d2 = chart.d2_phi(y);
    p.dn = normal_first_derivatives(p.frame, p.d2);
    if (auto d3 = chart.d3_phi(y)) {
        p.d2n = normal_second_derivatives(p.frame, p.d2, *d3, p.dn);
    } else {
        auto dn_at = [&chart](int which) {
            return [&chart, which](const Vec2& z) -> Vec3 {
                const Frame f = evaluate_frame(chart, z);
                return normal_first_derivatives(f, chart.d2_phi(z))[static_cast<std::size_t>(which)];
            };
        };
        const double h1 = chart.periods()[0] / 4096.0;
        const double h2 = chart.periods()[1] / 4096.0;
        p.d2n[0] = central_difference(dn_at(0), y, 0, h1);
        p.d2n[1] = central_difference(dn_at(0), y, 1, h2);
        p.d2n[2] = central_difference(dn_at(1), y, 1, h2);
    }
    const Frame& f = p.frame;
    p.metric = {f.t1.dot(f.t1), f.t1.dot(f.t2), f.t2.dot(f.t2)};
    p.curvature = {f.n.dot(p.d2[0]), f.n.dot(p.d2[1]), f.n.dot(p.d2[2])};
    return p;
}

FundamentalForms fundamental_forms(const Chart& chart, const Vec2& y)
{
    const Vec2 r = chart.reduce(y);
    const Frame f = evaluate_frame(chart, r);
    const SecondPartials d2 = chart.d2_phi(r);
    return {{f.t1.dot(f.t1), f.t1.dot(f.t2), f.t2.dot(f.t2)}, {f.n.dot(d2[0]), f.n.dot(d2[1]), f.n.dot(d2[2])}};
}

NormalDisplacementDerivatives normal_displacement_derivatives(const SurfacePoint& p, const DisplacementJet& jet)
{
    const Vec3& n = p.frame.n;
    const double e = jet.eta;
    const double e1 = jet.grad_eta[0];
    const double e2 = jet.grad_eta[1];
    NormalDisplacementDerivatives d;
    d.first[0] = e1 * n + e * p.dn[0];
    d.first[1] = e2 * n + e * p.dn[1];
    const std::array<double, 2> g{e1, e2};
    const std::array<std::pair<int, int>, 3> pairs{{{0, 0}, {0, 1}, {1, 1}}};
    for (std::size_t q = 0; q < 3; ++q) {
        const auto [i, j] = pairs[q];
        const double eij = jet.hess_eta(i, j);
        d.second[q] = eij * n + g[static_cast<std::size_t>(i)] * p.dn[static_cast<std::size_t>(j)]
                      + g[static_cast<std::size_t>(j)] * p.dn[static_cast<std::size_t>(i)] + e * p.d2n[q];
    }
    return d;
}

SymTensor2 change_of_metric(const SurfacePoint& p, const DisplacementJet& jet)
{
    const Frame& f = p.frame;
    // d_i phi_eta = d_i phi + eta d_i n + (d_i eta) n
    const Vec3 a1 = f.t1 + jet.eta * p.dn[0] + jet.grad_eta[0] * f.n;
    const Vec3 a2 = f.t2 + jet.eta * p.dn[1] + jet.grad_eta[1] * f.n;
    return {0.5 * (a1.dot(a1) - p.metric.a11), 0.5 * (a1.dot(a2) - p.metric.a12), 0.5 * (a2.dot(a2) - p.metric.a22)};
}

SymTensor2 change_of_metric(const Chart& chart, const Vec2& y, const DisplacementJet& jet)
{
    return change_of_metric(evaluate_point(chart, y), jet);
}

SymTensor2 modified_change_of_curvature(const SurfacePoint& p, const NormalDisplacementDerivatives& d)
{
    const Frame& f = p.frame;
    const Vec3& u1 = d.first[0];
    const Vec3& u2 = d.first[1];
    const Vec3 u12 = u1.cross(u2);
    const Vec3 mixed = u1.cross(f.t2) + f.t1.cross(u2) + u12;
    std::array<double, 3> r{};
    for (std::size_t q = 0; q < 3; ++q) {
        const Vec3& P = p.d2[q];
        const Vec3& U = d.second[q];
        const double B = p.curvature(q == 2 ? 1 : 0, q == 0 ? 0 : 1);
        // b_eta^ij = w (B + n . U) - u1 . (P x t2) - u2 . (t1 x P)
        const double b_eta = f.w * (B + f.n.dot(U)) - u1.dot(P.cross(f.t2)) - u2.dot(f.t1.cross(P));
        // n.t. = [u1 x t2 + t1 x u2 + u1 x u2] . U + (u1 x u2) . P
        const double nt = mixed.dot(U) + u12.dot(P);
        // Subtracting w B before dividing keeps R# exactly zero for eta = 0.
        r[q] = (b_eta - f.w * B + nt) / f.w;
    }
    return sym_from(r);
}

SymTensor2 modified_change_of_curvature(const Chart& chart, const Vec2& y, const DisplacementJet& jet,
                                        const std::array<Vec3, 3>& hess_of_eta_n)
{
    const SurfacePoint p = evaluate_point(chart, y);
    NormalDisplacementDerivatives d = normal_displacement_derivatives(p, jet);
    d.second = hess_of_eta_n;
    return modified_change_of_curvature(p, d);
}

SymTensor2 modified_change_of_curvature(const Chart& chart, const Vec2& y, const DisplacementJet& jet)
{
    const SurfacePoint p = evaluate_point(chart, y);
    return modified_change_of_curvature(p, normal_displacement_derivatives(p, jet));
}

SymTensor2 modified_change_of_curvature_direct(const SurfacePoint& p, const NormalDisplacementDerivatives& d)
{
    const Frame& f = p.frame;
    const Vec3 n_eta = (f.t1 + d.first[0]).cross(f.t2 + d.first[1]);
    std::array<double, 3> r{};
    for (std::size_t q = 0; q < 3; ++q) {
        const double B = p.curvature(q == 2 ? 1 : 0, q == 0 ? 0 : 1);
        r[q] = n_eta.dot(p.d2[q] + d.second[q]) / f.w - B;
    }
    return sym_from(r);
}

SymTensor2 linearized_change_of_metric(const SurfacePoint& p, double eta)
{
    const Frame& f = p.frame;
    const double s = eta / f.w;
    return {s * f.t1.dot(p.d2[0].cross(f.t2)), s * f.t1.dot(p.d2[1].cross(f.t2)), s * f.t1.dot(p.d2[2].cross(f.t2))};
}

SymTensor2 linearized_change_of_metric(const Chart& chart, const Vec2& y, double eta)
{
    return linearized_change_of_metric(evaluate_point(chart, y), eta);
}

SymTensor2 linearized_change_of_curvature(const SurfacePoint& p, const NormalDisplacementDerivatives& d)
{
    const Frame& f = p.frame;
    std::array<double, 3> r{};
    for (std::size_t q = 0; q < 3; ++q) {
        const Vec3& P = p.d2[q];
        const Vec3 b1 = f.t1.cross(P) / f.w;
        const Vec3 b2 = P.cross(f.t2) / f.w;
        r[q] = f.n.dot(d.second[q]) - d.first[0].dot(b2) - d.first[1].dot(b1);
    }
    return sym_from(r);
}

SymTensor2 linearized_change_of_curvature(const Chart& chart, const Vec2& y, const DisplacementJet& jet)
{
    const SurfacePoint p = evaluate_point(chart, y);
    return linearized_change_of_curvature(p, normal_displacement_derivatives(p, jet));
}

ValidationReport validate_chart(const Chart& chart, int probe_resolution)
{
    ValidationReport rep;
    if (probe_resolution < 8) {
        rep.failures.emplace_back("probe resolution must be >= 8");
        return rep;
    }
    const Vec2 L = chart.periods();
    const double h1 = L[0] / 4096.0;
    const double h2 = L[1] / 4096.0;
    rep.min_weight = std::numeric_limits<double>::infinity();

    auto scaled = [](const Vec3& err, const Vec3& ref) { return err.norm() / std::max(1.0, ref.norm()); };

    const auto phi = [&chart](const Vec2& y) { return chart.phi(y); };
    auto d1 = [&chart](int a) { return [&chart, a](const Vec2& y) { return chart.d_phi(y)[static_cast<std::size_t>(a)]; }; };
    auto d2 = [&chart](int q) { return [&chart, q](const Vec2& y) { return chart.d2_phi(y)[static_cast<std::size_t>(q)]; }; };

    for (int i = 0; i < probe_resolution; ++i) {
        for (int j = 0; j < probe_resolution; ++j) {
            const Vec2 y(L[0] * i / probe_resolution, L[1] * j / probe_resolution);
            const auto first = chart.d_phi(y);
            rep.min_weight = std::min(rep.min_weight, first[0].cross(first[1]).norm());

            const auto second = chart.d2_phi(y);
            double defect = 0.0;
            defect = std::max(defect, scaled(central_difference(phi, y, 0, h1) - first[0], first[0]));
            defect = std::max(defect, scaled(central_difference(phi, y, 1, h2) - first[1], first[1]));
            defect = std::max(defect, scaled(central_difference(d1(0), y, 0, h1) - second[0], second[0]));
            defect = std::max(defect, scaled(central_difference(d1(0), y, 1, h2) - second[1], second[1]));
            defect = std::max(defect, scaled(central_difference(d1(1), y, 1, h2) - second[2], second[2]));
            if (auto third = chart.d3_phi(y)) {
                defect = std::max(defect, scaled(central_difference(d2(0), y, 0, h1) - (*third)[0], (*third)[0]));
                defect = std::max(defect, scaled(central_difference(d2(1), y, 0, h1) - (*third)[1], (*third)[1]));
                defect = std::max(defect, scaled(central_difference(d2(2), y, 0, h1) - (*third)[2], (*third)[2]));
                defect = std::max(defect, scaled(central_difference(d2(2), y, 1, h2) - (*third)[3], (*third)[3]));
            }
            rep.max_derivative_defect = std::max(rep.max_derivative_defect, defect);

            // periodicity: compare partials across each identified edge
            for (int axis = 0; axis < 2; ++axis) {
                Vec2 shift = Vec2::Zero();
                shift[axis] = L[axis];
                const auto f_shift = chart.d_phi(y + shift);
                const auto s_shift = chart.d2_phi(y + shift);
                double per = 0.0;
                for (std::size_t a = 0; a < 2; ++a)
                    per = std::max(per, (f_shift[a] - first[a]).norm() / std::max(1.0, first[a].norm()));
                for (std::size_t q = 0; q < 3; ++q)
                    per = std::max(per, (s_shift[q] - second[q]).norm() / std::max(1.0, second[q].norm()));
                rep.periodicity_defect = std::max(rep.periodicity_defect, per);
            }
        }
    }

    if (!(rep.min_weight >= kDegenerateWeight)) rep.failures.emplace_back("tangents linearly dependent (min w below threshold)");
    if (!(rep.max_derivative_defect <= 1e-6)) rep.failures.emplace_back("supplied derivatives inconsistent with phi");
    if (!(rep.periodicity_defect <= 1e-12)) rep.failures.emplace_back("chart partials not periodic");
    rep.ok = rep.failures.empty();
    return rep;
}

} // namespace koiter
