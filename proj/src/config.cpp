#include "koiter/config.hpp"

#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/geometry.hpp"
#include "koiter/io.hpp"
#include "koiter/stochastic.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace koiter {

namespace {

// Thrown by value parsers; the caller attaches the line number.
struct BadValue {
    std::string what;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_real(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double read_real(const std::string& s)
{
    try {
        return parse_real(s);
    } catch (const BadFieldSpec&) {
        throw BadValue{"expected a number, got '" + s + "'"};
    }
}

std::uint64_t read_uint(const std::string& s)
{
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw BadValue{"expected a non-negative integer, got '" + s + "'"};
    return v;
}

std::vector<double> read_list(const std::string& s)
{
    std::vector<double> out;
    if (trim(s).empty()) return out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(read_real(trim(item)));
    return out;
}

std::string format_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
    return out;
}

std::string read_text(const std::string& s)
{
    if (s.empty()) throw BadValue{"value must not be empty"};
    return s;
}

struct Key {
    std::string name;
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

#define REAL_KEY(name, member)                                                                                         \
    Key{name, [](Config& c, const std::string& v) { c.member = read_real(v); },                                       \
        [](const Config& c) { return format_real(c.member); }}
#define SIZE_KEY(name, member)                                                                                         \
    Key{name, [](Config& c, const std::string& v) { c.member = static_cast<std::size_t>(read_uint(v)); },             \
        [](const Config& c) { return std::to_string(c.member); }}
#define TEXT_KEY(name, member)                                                                                         \
    Key{name, [](Config& c, const std::string& v) { c.member = read_text(v); }, [](const Config& c) { return c.member; }}
#define LIST_KEY(name, member)                                                                                         \
    Key{name, [](Config& c, const std::string& v) { c.member = read_list(v); },                                       \
        [](const Config& c) { return format_list(c.member); }}

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = {
        Key{"equation",
            [](Config& c, const std::string& v) {
                if (v == "sde") c.equation = Equation::Sde;
                else if (v == "shell") c.equation = Equation::Shell;
                else throw BadValue{"equation must be 'sde' or 'shell', got '" + v + "'"};
            },
            [](const Config& c) { return std::string(to_string(c.equation)); }},
        TEXT_KEY("chart", chart),
        TEXT_KEY("output_dir", output_dir),
        Key{"master_seed", [](Config& c, const std::string& v) { c.master_seed = read_uint(v); },
            [](const Config& c) { return std::to_string(c.master_seed); }},
        SIZE_KEY("grid.n1", grid.n1),
        SIZE_KEY("grid.n2", grid.n2),
        REAL_KEY("grid.ly1", grid.ly1),
        REAL_KEY("grid.ly2", grid.ly2),
        REAL_KEY("grid.origin1", grid.origin1),
        REAL_KEY("grid.origin2", grid.origin2),
        REAL_KEY("params.eps0", params.eps0),
        REAL_KEY("params.rho_s", params.rho_s),
        REAL_KEY("params.lambda_e", params.lambda_e),
        REAL_KEY("params.mu_e", params.mu_e),
        REAL_KEY("params.nu_e", params.nu_e),
        REAL_KEY("params.alpha", params.alpha),
        REAL_KEY("params.beta", params.beta),
        TEXT_KEY("params.g_vec", params.g_vec),
        TEXT_KEY("params.g_scal", params.g_scal),
        REAL_KEY("params.disp_bound_L", params.disp_bound_L),
        TEXT_KEY("noise.fields", noise),
        REAL_KEY("time.dt", time.dt),
        REAL_KEY("time.t_end", time.t_end),
        LIST_KEY("time.snapshots", time.snapshots),
        SIZE_KEY("time.diag_every", time.diag_every),
        TEXT_KEY("initial.eta", initial.eta),
        TEXT_KEY("initial.eta_dot", initial.eta_dot),
        SIZE_KEY("ensemble.n_paths", ensemble.n_paths),
        SIZE_KEY("ensemble.workers", ensemble.workers),
        LIST_KEY("ensemble.thresholds", ensemble.thresholds),
    };
    return table;
}

#undef REAL_KEY
#undef SIZE_KEY
#undef TEXT_KEY
#undef LIST_KEY

const Key* find_key(const std::string& name)
{
    for (const Key& k : keys())
        if (k.name == name) return &k;
    return nullptr;
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

// Index of the step landing on time t, or throws when t is off the step grid.
std::uint64_t step_of(double t, double dt, const std::string& what)
{
    const double r = t / dt;
    const double n = std::round(r);
    require(std::abs(r - n) <= 1e-9 * std::max(1.0, r), what + " must be a whole number of steps of dt");
    return static_cast<std::uint64_t>(n);
}

} // namespace

const char* to_string(Equation e) noexcept { return e == Equation::Sde ? "sde" : "shell"; }

std::uint64_t Config::n_steps() const { return step_of(time.t_end, time.dt, "time.t_end"); }

std::vector<std::uint64_t> Config::snapshot_steps() const
{
    std::vector<std::uint64_t> out;
    for (double t : time.snapshots) out.push_back(step_of(t, time.dt, "snapshot time"));
    return out;
}

Config figure3_preset()
{
    Config c;
    c.equation = Equation::Sde;
    c.grid.n1 = c.grid.n2 = 128;
    c.grid.ly1 = c.grid.ly2 = 4.0 * std::numbers::pi;
    c.grid.origin1 = c.grid.origin2 = -2.0 * std::numbers::pi;
    c.noise = "figure3";
    c.initial.eta = "gaussian:pi,pi";
    c.initial.eta_dot = "zero";
    c.time.dt = 1e-3;
    c.time.t_end = 1.0;
    c.time.snapshots = {0.25, 0.5, 1.0};
    c.output_dir = "out_figure3";
    return c;
}

void validate(const Config& c)
{
    c.params.validate();
    require(c.grid.n1 >= 8 && c.grid.n2 >= 8 && (c.grid.n1 & (c.grid.n1 - 1)) == 0 && (c.grid.n2 & (c.grid.n2 - 1)) == 0,
            "grid.n1 and grid.n2 must be powers of two >= 8");
    require(c.grid.ly1 > 0.0 && c.grid.ly2 > 0.0 && std::isfinite(c.grid.ly1) && std::isfinite(c.grid.ly2),
            "grid periods must be positive");
    require(std::isfinite(c.grid.origin1) && std::isfinite(c.grid.origin2), "grid origin must be finite");
    require(c.time.dt > 0.0 && std::isfinite(c.time.dt), "time.dt must be > 0");
    require(c.time.t_end >= c.time.dt && std::isfinite(c.time.t_end), "time.t_end must be >= time.dt");
    (void)c.n_steps();
    require(c.time.diag_every >= 1, "time.diag_every must be >= 1");
    for (std::size_t i = 0; i < c.time.snapshots.size(); ++i) {
        const double t = c.time.snapshots[i];
        require(t >= 0.0 && t <= c.time.t_end, "snapshot times must lie in [0, t_end]");
        require(i == 0 || t > c.time.snapshots[i - 1], "snapshot times must be strictly increasing");
    }
    (void)c.snapshot_steps();
    require(c.ensemble.n_paths >= 1, "ensemble.n_paths must be >= 1");
    require(c.ensemble.workers >= 1, "ensemble.workers must be >= 1");
    for (double h : c.ensemble.thresholds) require(std::isfinite(h) && h >= 0.0, "ensemble thresholds must be >= 0");
    try {
        (void)make_chart(c.chart);
        check_noise_spec(c.noise);
        check_scalar_spec(c.initial.eta);
        check_scalar_spec(c.initial.eta_dot);
    } catch (const BadFieldSpec& e) {
        throw ValidationError(e.what());
    }
    require(c.chart == "flat", "the evolution model is restricted to the flat chart (w = 1), got chart '" + c.chart + "'");
}

Config parse_config(const std::string& text)
{
    struct Entry {
        std::size_t line;
        std::string key, value;
    };
    std::vector<Entry> entries;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
        Entry e{line, trim(body.substr(0, eq)), trim(body.substr(eq + 1))};
        if (e.key.empty()) throw ParseError(line, "missing key");
        if (e.key != "preset" && !find_key(e.key)) throw ParseError(line, "unknown key '" + e.key + "'");
        if (!seen.insert(e.key).second) throw ParseError(line, "duplicate key '" + e.key + "'");
        entries.push_back(std::move(e));
    }

    Config c;
    for (const Entry& e : entries) {
        if (e.key != "preset") continue;
        if (e.value == "figure3") c = figure3_preset();
        else if (e.value != "default") throw ParseError(e.line, "unknown preset '" + e.value + "'");
    }
    for (const Entry& e : entries) {
        if (e.key == "preset") continue;
        try {
            find_key(e.key)->set(c, e.value);
        } catch (const BadValue& b) {
            throw ParseError(e.line, e.key + ": " + b.what);
        }
    }
    validate(c);
    return c;
}

std::string serialize_config(const Config& c)
{
    std::string out;
    for (const Key& k : keys()) out += k.name + " = " + k.get(c) + "\n";
    return out;
}

std::string config_hash(const Config& c)
{
    return hex64(fnv1a64(serialize_config(c)));
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> out{"preset"};
    for (const Key& k : keys()) out.push_back(k.name);
    return out;
}

} // namespace koiter
