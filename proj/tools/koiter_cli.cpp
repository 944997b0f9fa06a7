// koiter: command-line front end.
//
//   koiter simulate [--config FILE] [--preset NAME] [--set key=value]... [--output DIR]
//   koiter ensemble [same options] [--paths N] [--workers W]
//   koiter verify   [--suite NAME]...
//   koiter geometry --chart ID --at y1,y2 [--grid N --output DIR]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include "koiter/config.hpp"
#include "koiter/ensemble.hpp"
#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/geometry.hpp"
#include "koiter/io.hpp"
#include "koiter/simulation.hpp"
#include "koiter/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

using namespace koiter;

namespace {

struct ConfigOptions {
    std::string file;
    std::string preset;
    std::vector<std::string> sets;
    std::string output;
};

void add_config_options(CLI::App* cmd, ConfigOptions& o)
{
    cmd->add_option("-c,--config", o.file, "configuration file (key = value lines)");
    cmd->add_option("--preset", o.preset, "named preset applied before the file's keys (figure3, default)");
    cmd->add_option("-s,--set", o.sets, "override one key, e.g. --set time.dt=5e-4");
    cmd->add_option("-o,--output", o.output, "output directory (overrides output_dir)");
}

std::string key_of(const std::string& line)
{
    const std::string body = line.substr(0, line.find('#'));
    const auto eq = body.find('=');
    if (eq == std::string::npos) return {};
    const auto b = body.find_first_not_of(" \t");
    const auto e = body.find_last_not_of(" \t", eq - 1);
    return b == std::string::npos || b >= eq ? std::string{} : body.substr(b, e - b + 1);
}

// File text with overridden keys commented out in place (line numbers in
// parse errors keep pointing at the file), followed by the overrides.
Config load_config(const ConfigOptions& o)
{
    std::map<std::string, std::string> overrides;
    if (!o.preset.empty()) overrides["preset"] = o.preset;
    for (const std::string& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
        overrides[key_of(s)] = s.substr(eq + 1);
    }
    std::string text;
    if (!o.file.empty()) {
        const auto bytes = read_file_bytes(o.file);
        std::istringstream in(std::string(bytes.begin(), bytes.end()));
        std::string line;
        while (std::getline(in, line)) text += (overrides.count(key_of(line)) ? "# " : "") + line + "\n";
    }
    for (const auto& [k, v] : overrides) text += k + " = " + v + "\n";
    Config c = parse_config(text);
    if (!o.output.empty()) c.output_dir = o.output;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int simulate(const ConfigOptions& o)
{
    const Config c = load_config(o);
    const auto t0 = std::chrono::steady_clock::now();
    const RunArtifacts art = run_simulation(c, c.output_dir, &std::cerr);
    const DiagnosticRow& last = art.result.diagnostics.back();
    std::printf("simulate: %s, %llu steps in %.2f s, %zu snapshots -> %s\n", to_string(c.equation),
                static_cast<unsigned long long>(c.n_steps()), seconds_since(t0), art.result.snapshots.size(),
                c.output_dir.c_str());
    std::printf("final: t = %g, eta in [%.6g, %.6g], E_total = %.10g\n", last.t, last.eta_min, last.eta_max, last.e_total);
    return 0;
}

int ensemble(const ConfigOptions& o, std::size_t paths, std::size_t workers)
{
    Config c = load_config(o);
    if (paths) c.ensemble.n_paths = paths;
    if (workers) c.ensemble.workers = workers;
    validate(c);
    const auto t0 = std::chrono::steady_clock::now();
    EnsembleOptions opts;
    opts.workers = c.ensemble.workers;
    const EnsembleStats st = run_ensemble(c, c.ensemble.n_paths, opts);
    write_ensemble_outputs(st, c, c.output_dir);
    std::printf("ensemble: %llu paths on %zu workers in %.2f s -> %s\n", static_cast<unsigned long long>(st.n_paths),
                c.ensemble.workers, seconds_since(t0), c.output_dir.c_str());
    for (std::size_t h = 0; h < st.thresholds.size(); ++h) {
        const Interval w = wilson_interval(st.exceedance_counts[h], st.n_paths);
        std::printf("  P(max|eta| > %g) = %.4f  [%.4f, %.4f]\n", st.thresholds[h], w.p_hat, w.low, w.high);
    }
    return 0;
}

int verify(const std::vector<std::string>& suites)
{
    const auto results = run_verify_suites(suites);
    std::printf("%-18s %-62s %12s %10s  %s\n", "suite", "check", "error", "tolerance", "result");
    bool ok = true;
    for (const CheckResult& r : results) {
        std::printf("%-18s %-62s %12.3e %10.1e  %s\n", r.suite.c_str(), r.name.c_str(), r.error, r.tolerance,
                    r.passed ? "PASS" : "FAIL");
        ok = ok && r.passed;
    }
    std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
    return ok ? 0 : 2;
}

std::string sym(const Eigen::Matrix2d& m)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "[[% .10g, % .10g], [% .10g, % .10g]]", m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    return buf;
}

std::string vec(const Vec3& v)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "(% .10g, % .10g, % .10g)", v[0], v[1], v[2]);
    return buf;
}

nlohmann::json tensor_json(const Eigen::Matrix2d& m) { return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}; }

int geometry(const std::string& chart_id, const std::string& at, std::size_t grid_n, const std::string& output)
{
    Chart chart = [&] {
        try {
            return make_chart(chart_id);
        } catch (const BadFieldSpec& e) {
            throw ValidationError(e.what());
        }
    }();
    const auto comma = at.find(',');
    if (comma == std::string::npos) throw ValidationError("--at expects y1,y2");
    Vec2 y;
    try {
        y = Vec2(parse_real(at.substr(0, comma)), parse_real(at.substr(comma + 1)));
    } catch (const BadFieldSpec& e) {
        throw ValidationError(e.what());
    }

    const Frame f = evaluate_frame(chart, y);
    const FundamentalForms ff = fundamental_forms(chart, y);
    const Eigen::Matrix2d a = ff.A.full();
    const Eigen::Matrix2d a_inv = a.inverse();
    const Eigen::Matrix2d b_up = a_inv * ff.B.full() * a_inv;
    std::printf("chart %s at y = (%.10g, %.10g)\n", chart_id.c_str(), y[0], y[1]);
    std::printf("phi      = %s\n", vec(chart.phi(y)).c_str());
    std::printf("t1       = %s\n", vec(f.t1).c_str());
    std::printf("t2       = %s\n", vec(f.t2).c_str());
    std::printf("n        = %s\n", vec(f.n).c_str());
    std::printf("t1*      = %s\n", vec(f.t1_star).c_str());
    std::printf("t2*      = %s\n", vec(f.t2_star).c_str());
    std::printf("w        = %.12g\n", f.w);
    std::printf("A_ij     = %s\n", sym(a).c_str());
    std::printf("A^ij     = %s\n", sym(a_inv).c_str());
    std::printf("B_ij     = %s\n", sym(ff.B.full()).c_str());
    std::printf("B^ij     = %s\n", sym(b_up).c_str());

    if (output.empty()) return 0;
    if (grid_n < 1) throw ValidationError("--grid must be >= 1");
    const std::filesystem::path dir(output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + output + "': " + ec.message());
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < grid_n; ++i)
        for (std::size_t j = 0; j < grid_n; ++j) {
            const Vec2 p(chart.periods()[0] * static_cast<double>(i) / static_cast<double>(grid_n),
                         chart.periods()[1] * static_cast<double>(j) / static_cast<double>(grid_n));
            nlohmann::json node{{"y", {p[0], p[1]}}};
            try {
                const Frame fp = evaluate_frame(chart, p);
                const FundamentalForms fq = fundamental_forms(chart, p);
                node["n"] = {fp.n[0], fp.n[1], fp.n[2]};
                node["w"] = fp.w;
                node["A"] = tensor_json(fq.A.full());
                node["B"] = tensor_json(fq.B.full());
            } catch (const DegenerateChart&) {
                node["degenerate"] = true;
            }
            nodes.push_back(node);
        }
    const nlohmann::json doc{{"chart", chart_id}, {"grid", grid_n}, {"nodes", nodes}};
    const std::string text = doc.dump(1) + "\n";
    write_file_bytes(dir / "geometry.json", std::vector<unsigned char>(text.begin(), text.end()));
    Config c;
    c.chart = chart_id;
    c.output_dir = output;
    write_manifest(dir, "geometry", c, {"geometry.json"}, "ok");
    std::printf("wrote %s\n", (dir / "geometry.json").string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"koiter: stochastic Koiter shell simulation and verification toolkit"};
    app.require_subcommand(1);

    ConfigOptions sim_opts;
    auto* sim = app.add_subcommand("simulate", "run one noise path and write snapshots, diagnostics and a manifest");
    add_config_options(sim, sim_opts);

    ConfigOptions ens_opts;
    std::size_t paths = 0, workers = 0;
    auto* ens = app.add_subcommand("ensemble", "run a Monte Carlo ensemble over noise paths");
    add_config_options(ens, ens_opts);
    ens->add_option("-n,--paths", paths, "number of paths (overrides ensemble.n_paths)");
    ens->add_option("-j,--workers", workers, "worker threads (overrides ensemble.workers)");

    std::vector<std::string> suites;
    auto* ver = app.add_subcommand("verify", "run the oracle suites and print a pass/fail table");
    ver->add_option("--suite", suites, "suite to run (gateaux, characteristics, skew_adjointness, dispersion)");

    std::string chart_id = "flat", at = "0,0", out;
    std::size_t grid_n = 16;
    auto* geo = app.add_subcommand("geometry", "evaluate frame and fundamental forms of a chart");
    geo->add_option("--chart", chart_id, "chart id: flat, sphere:R, cylinder:R, torus:R,r, graph:<id>");
    geo->add_option("--at", at, "parameter point y1,y2 (multiples of pi allowed)");
    geo->add_option("--grid", grid_n, "nodes per direction for the dump");
    geo->add_option("-o,--output", out, "write geometry.json and a manifest to this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return simulate(sim_opts);
        if (*ens) return ensemble(ens_opts, paths, workers);
        if (*ver) return verify(suites);
        if (*geo) return geometry(chart_id, at, grid_n, out);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
