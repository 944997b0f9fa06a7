#include "koiter/field_spec.hpp"

#include "koiter/errors.hpp"
#include "koiter/io.hpp"
#include "koiter/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace koiter {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::pair<std::string, std::string> split_kind(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return {trim(spec), {}};
    return {trim(spec.substr(0, colon)), spec.substr(colon + 1)};
}

long parse_int(const std::string& token)
{
    try {
        std::size_t used = 0;
        const long v = std::stol(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw BadFieldSpec("expected an integer, got '" + token + "'");
    }
}

std::vector<double> parse_reals(const std::string& args, std::size_t min_count, std::size_t max_count,
                                const std::string& spec)
{
    const auto parts = split(args, ',');
    if (parts.size() < min_count || parts.size() > max_count)
        throw BadFieldSpec("wrong number of arguments in field spec '" + spec + "'");
    std::vector<double> v;
    for (const auto& p : parts) v.push_back(parse_real(p));
    return v;
}

double periodized_gaussian(const Vec2& y, const Vec2& c, double width, const Extents& ext)
{
    double sum = 0.0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            const double d1 = y[0] - c[0] - a * ext.ly1;
            const double d2 = y[1] - c[1] - b * ext.ly2;
            sum += std::exp(-(d1 * d1 + d2 * d2) / (width * width));
        }
    return sum;
}

ScalarField random_smooth_field(std::uint64_t seed, long kmax, double amp, const SpectralGrid& grid)
{
    ScalarField f = grid.zeros();
    std::uint32_t stream = 0;
    for (long m1 = -kmax; m1 <= kmax; ++m1) {
        for (long m2 = 0; m2 <= kmax; ++m2) {
            if (m2 == 0 && m1 < 0) continue;
            const auto [a, b] = standard_normal_pair(seed, 0, stream++);
            const Vec2 k = grid.wavevector(m1, m2);
            const double decay = 1.0 / (1.0 + static_cast<double>(m1 * m1 + m2 * m2));
            for (std::size_t i = 0; i < grid.n1(); ++i)
                for (std::size_t j = 0; j < grid.n2(); ++j) {
                    const double ph = k.dot(grid.node(i, j));
                    f(i, j) += amp * decay * (a * std::cos(ph) + (m1 == 0 && m2 == 0 ? 0.0 : b * std::sin(ph)));
                }
        }
    }
    return f;
}

// Shared parser; when `grid` is null only the syntax is checked.
ScalarField scalar_field_impl(const std::string& spec_in, const SpectralGrid* grid)
{
    const std::string spec = trim(spec_in);
    const auto [kind, args] = split_kind(spec);
    auto zeros = [&] { return grid ? grid->zeros() : ScalarField(); };

    if (kind == "zero" && args.empty()) return zeros();
    if (kind == "const") {
        const double c = parse_reals(args, 1, 1, spec)[0];
        return grid ? ScalarField(grid->n1(), grid->n2(), c) : ScalarField();
    }
    if (kind == "gaussian") {
        const auto v = parse_reals(args, 2, 4, spec);
        const double amp = v.size() > 2 ? v[2] : 1.0;
        const double width = v.size() > 3 ? v[3] : 1.0;
        if (!(width > 0.0)) throw BadFieldSpec("gaussian width must be positive");
        if (!grid) return {};
        const Vec2 c(v[0], v[1]);
        const Extents ext = grid->extents();
        return grid->sample([&](const Vec2& y) { return amp * periodized_gaussian(y, c, width, ext); });
    }
    if (kind == "sinmode" || kind == "cosmode") {
        const auto parts = split(args, ',');
        if (parts.size() < 2 || parts.size() > 3) throw BadFieldSpec("bad mode spec '" + spec + "'");
        const long m1 = parse_int(parts[0]);
        const long m2 = parse_int(parts[1]);
        const double amp = parts.size() > 2 ? parse_real(parts[2]) : 1.0;
        if (!grid) return {};
        const Vec2 k = grid->wavevector(m1, m2);
        const bool use_sin = kind == "sinmode";
        return grid->sample([&](const Vec2& y) {
            const double ph = k.dot(y);
            return amp * (use_sin ? std::sin(ph) : std::cos(ph));
        });
    }
    if (kind == "random") {
        const auto parts = split(args, ',');
        if (parts.empty() || parts.size() > 3 || parts[0].empty()) throw BadFieldSpec("bad random spec '" + spec + "'");
        const long seed = parse_int(parts[0]);
        const long kmax = parts.size() > 1 ? parse_int(parts[1]) : 4;
        const double amp = parts.size() > 2 ? parse_real(parts[2]) : 1.0;
        if (kmax < 0) throw BadFieldSpec("random field kmax must be >= 0");
        if (!grid) return {};
        return random_smooth_field(static_cast<std::uint64_t>(seed), kmax, amp, *grid);
    }
    if (kind == "grid") {
        if (trim(args).empty()) throw BadFieldSpec("grid field spec needs a path");
        if (!grid) return {};
        GridDump d;
        try {
            d = read_grid_dump(trim(args));
        } catch (const Error& e) {
            throw BadFieldSpec("cannot load grid field '" + trim(args) + "': " + e.what());
        }
        if (!grid->matches(d.field)) throw BadFieldSpec("grid field '" + trim(args) + "' does not match grid size");
        return d.field;
    }
    throw BadFieldSpec("unknown field spec '" + spec + "'");
}

std::array<ScalarField, 3> vector3_impl(const std::string& spec_in, const SpectralGrid* grid)
{
    const std::string spec = trim(spec_in);
    const auto [kind, args] = split_kind(spec);
    auto filled = [&](double c) { return grid ? ScalarField(grid->n1(), grid->n2(), c) : ScalarField(); };
    if (kind == "zero" && args.empty()) return {filled(0.0), filled(0.0), filled(0.0)};
    if (kind == "const") {
        const auto v = parse_reals(args, 3, 3, spec);
        return {filled(v[0]), filled(v[1]), filled(v[2])};
    }
    if (kind == "components") {
        const auto parts = split(args, '|');
        if (parts.size() != 3) throw BadFieldSpec("components spec needs three '|'-separated scalar specs");
        return {scalar_field_impl(parts[0], grid), scalar_field_impl(parts[1], grid), scalar_field_impl(parts[2], grid)};
    }
    throw BadFieldSpec("unknown vector field spec '" + spec + "'");
}

} // namespace

double parse_real(const std::string& token_in)
{
    const std::string token = trim(token_in);
    try {
        if (token.size() >= 2 && token.compare(token.size() - 2, 2, "pi") == 0) {
            std::string coef = token.substr(0, token.size() - 2);
            if (!coef.empty() && coef.back() == '*') coef.pop_back();
            double c = 1.0;
            if (coef == "-") c = -1.0;
            else if (coef == "+" || coef.empty()) c = 1.0;
            else {
                std::size_t used = 0;
                c = std::stod(coef, &used);
                if (used != coef.size()) throw std::invalid_argument(token);
            }
            return c * std::numbers::pi;
        }
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw BadFieldSpec("expected a number, got '" + token + "'");
    }
}

ScalarField make_scalar_field(const std::string& spec, const SpectralGrid& grid)
{
    return scalar_field_impl(spec, &grid);
}

std::array<ScalarField, 3> make_vector3_field(const std::string& spec, const SpectralGrid& grid)
{
    return vector3_impl(spec, &grid);
}

void check_scalar_spec(const std::string& spec) { (void)scalar_field_impl(spec, nullptr); }
void check_vector3_spec(const std::string& spec) { (void)vector3_impl(spec, nullptr); }

} // namespace koiter
