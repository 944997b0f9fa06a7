#include "koiter/simulation.hpp"

#include "koiter/errors.hpp"
#include "koiter/field_spec.hpp"
#include "koiter/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace koiter {

namespace {

std::string real(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string numbered(const char* stem, std::size_t k)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu.ksh", stem, k);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    write_file_bytes(path, std::vector<unsigned char>(text.begin(), text.end()));
}

} // namespace

Problem make_problem(const Config& config)
{
    validate(config);
    const GridConfig& gc = config.grid;
    SpectralGrid grid(gc.n1, gc.n2, Extents{gc.ly1, gc.ly2}, Vec2(gc.origin1, gc.origin2));
    Problem p{config, grid, make_noise_model(config.noise, grid, config.master_seed), {}, {}, std::nullopt, 0, {}};
    p.forcing = normal_forcing(resolve_load(config.params, grid));
    p.initial = {make_scalar_field(config.initial.eta, grid), make_scalar_field(config.initial.eta_dot, grid), 0.0};
    p.n_steps = config.n_steps();
    p.snapshot_steps = config.snapshot_steps();
    if (config.equation == Equation::Shell) p.stepper.emplace(config.params, grid, config.time.dt, p.forcing);
    return p;
}

std::string format_row(const DiagnosticRow& r)
{
    return real(r.t) + "," + real(r.e_kin) + "," + real(r.e_mem) + "," + real(r.e_flex) + "," + real(r.e_total) + "," +
           real(r.eta_min) + "," + real(r.eta_max) + "," + real(r.eta_l2) + "," + real(r.etadot_l2) + "," +
           real(r.grad_inf);
}

DiagnosticRow diagnose(const Problem& p, const ShellState& s)
{
    const EnergyBreakdown e = simplified_energy(s.eta, s.eta_dot, p.config.params, p.grid, p.forcing);
    DiagnosticRow r;
    r.t = s.t;
    r.e_kin = e.kinetic;
    r.e_mem = e.k_m;
    r.e_flex = e.k_f;
    r.e_total = e.kinetic + e.total;
    r.eta_min = min_value(s.eta);
    r.eta_max = max_value(s.eta);
    r.eta_l2 = p.grid.l2_norm(s.eta);
    r.etadot_l2 = p.grid.l2_norm(s.eta_dot);
    r.grad_inf = e.grad_inf;
    r.small_displacement_violated = e.small_displacement_violated;
    return r;
}

PathResult run_path(const Problem& p, std::uint64_t path, const PathObserver* observer)
{
    PathResult out;
    out.path = path;
    if (p.stepper && p.stepper->stability_warning()) out.warnings.push_back(p.stepper->stability_message());
    const double dt = p.config.time.dt;
    const std::size_t every = p.config.time.diag_every;
    bool flagged = false;

    ShellState s = p.initial;
    std::size_t next_snap = 0;
    auto record = [&](std::uint64_t step) {
        if (step % every == 0 || step == p.n_steps) {
            out.diagnostics.push_back(diagnose(p, s));
            const DiagnosticRow& row = out.diagnostics.back();
            if (row.small_displacement_violated && !flagged) {
                flagged = true;
                out.warnings.push_back("SmallDisplacementViolated: |grad eta|_inf = " + real(row.grad_inf) +
                                       " exceeds disp_bound_L at t = " + real(row.t));
            }
            if (observer && observer->on_diagnostic) observer->on_diagnostic(row);
        }
        while (next_snap < p.snapshot_steps.size() && p.snapshot_steps[next_snap] == step) {
            out.snapshots.push_back({step, s});
            if (observer && observer->on_snapshot) observer->on_snapshot(out.snapshots.back());
            ++next_snap;
        }
    };

    record(0);
    for (std::uint64_t k = 0; k < p.n_steps; ++k) {
        if (p.stepper) {
            s = p.stepper->step(s, p.noise, path, k);
        } else {
            s.eta = step_kinematic_sde(s.eta, s.eta_dot, p.noise, path, k, dt, p.grid);
        }
        // time from the step count avoids drift from repeated addition
        s.t = static_cast<double>(k + 1) * dt;
        record(k + 1);
    }
    out.final_state = std::move(s);
    return out;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const Config& config,
                    const std::vector<std::filesystem::path>& files, const std::string& status)
{
    nlohmann::json m;
    m["command"] = command;
    m["status"] = status;
    m["config_hash"] = config_hash(config);
    m["master_seed"] = config.master_seed;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& f : files) {
        const auto bytes = read_file_bytes(dir / f);
        list.push_back({{"path", f.generic_string()},
                        {"bytes", bytes.size()},
                        {"fnv1a64", hex64(fnv1a64(bytes.data(), bytes.size()))}});
    }
    m["artifacts"] = list;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

RunArtifacts run_simulation(const Config& config, const std::filesystem::path& dir, std::ostream* log)
{
    const Problem p = make_problem(config);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    RunArtifacts art;
    write_text(dir / "config.txt", serialize_config(config));
    art.files.emplace_back("config.txt");

    std::ofstream csv(dir / "diagnostics.csv", std::ios::binary);
    if (!csv) throw IoError("cannot write '" + (dir / "diagnostics.csv").string() + "'");
    csv << diagnostics_header << "\n" << std::flush;
    art.files.emplace_back("diagnostics.csv");

    const GridDumpMeta base{config.grid.ly1, config.grid.ly2, 0.0};
    std::size_t n_snap = 0;
    PathObserver obs;
    obs.on_diagnostic = [&](const DiagnosticRow& r) { csv << format_row(r) << "\n" << std::flush; };
    obs.on_snapshot = [&](const Snapshot& s) {
        GridDumpMeta meta = base;
        meta.t = s.state.t;
        const std::string eta_name = numbered("eta", n_snap);
        write_grid_dump(s.state.eta, meta, dir / eta_name);
        art.files.emplace_back(eta_name);
        if (config.equation == Equation::Shell) {
            const std::string dot_name = numbered("eta_dot", n_snap);
            write_grid_dump(s.state.eta_dot, meta, dir / dot_name);
            art.files.emplace_back(dot_name);
        }
        ++n_snap;
    };

    try {
        art.result = run_path(p, 0, &obs);
    } catch (const Error&) {
        csv.close();
        write_manifest(dir, "simulate", config, art.files, "failed");
        throw;
    }
    csv.close();
    for (const auto& w : art.result.warnings)
        if (log) *log << w << "\n";
    write_manifest(dir, "simulate", config, art.files, "ok");
    return art;
}

} // namespace koiter
