#include <doctest.h>

#include "koiter/errors.hpp"
#include "koiter/io.hpp"
#include "koiter/simulation.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace koiter;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("koiter_unit_" + name);
    fs::remove_all(p);
    return p;
}

Config small_shell()
{
    Config c;
    c.grid.n1 = c.grid.n2 = 16;
    c.time.dt = 1e-2;
    c.time.t_end = 0.2;
    c.time.snapshots = {0.0, 0.1, 0.2};
    c.time.diag_every = 3;
    c.noise = "divfree:k1";
    c.initial.eta = "random:3,3,0.01";
    return c;
}

nlohmann::json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p)
{
    const auto b = read_file_bytes(p);
    return std::string(b.begin(), b.end());
}

} // namespace

TEST_CASE("simulate writes a complete manifest")
{
    const fs::path dir = scratch("manifest");
    const Config c = small_shell();
    const RunArtifacts art = run_simulation(c, dir);

    std::set<std::string> on_disk;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename() != "manifest.json") on_disk.insert(e.path().filename().string());
    CHECK(on_disk == std::set<std::string>{"config.txt", "diagnostics.csv", "eta_000.ksh", "eta_001.ksh", "eta_002.ksh",
                                           "eta_dot_000.ksh", "eta_dot_001.ksh", "eta_dot_002.ksh"});

    const auto m = read_json(dir / "manifest.json");
    CHECK(m["status"] == "ok");
    CHECK(m["command"] == "simulate");
    CHECK(m["config_hash"] == config_hash(c));
    CHECK(m["master_seed"] == c.master_seed);
    std::set<std::string> listed;
    for (const auto& a : m["artifacts"]) {
        const std::string name = a["path"];
        listed.insert(name);
        const auto bytes = read_file_bytes(dir / name);
        CHECK(a["bytes"] == bytes.size());
        CHECK(a["fnv1a64"] == hex64(fnv1a64(bytes.data(), bytes.size())));
    }
    CHECK(listed == on_disk);
    CHECK(art.files.size() == on_disk.size());

    // the stored config reproduces the run's config
    CHECK(parse_config(slurp(dir / "config.txt")) == c);
    fs::remove_all(dir);
}

TEST_CASE("diagnostics cadence and csv layout")
{
    const fs::path dir = scratch("diag");
    const RunArtifacts art = run_simulation(small_shell(), dir);
    // steps 0, 3, ..., 18 and the last step 20
    REQUIRE(art.result.diagnostics.size() == 8);
    CHECK(art.result.diagnostics.front().t == 0.0);
    CHECK(art.result.diagnostics[1].t == doctest::Approx(0.03).epsilon(1e-14));
    CHECK(art.result.diagnostics.back().t == doctest::Approx(0.2).epsilon(1e-14));

    std::istringstream csv(slurp(dir / "diagnostics.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == diagnostics_header);
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 9);
        ++rows;
    }
    CHECK(rows == 8);

    const GridDump last = read_grid_dump(dir / "eta_002.ksh");
    CHECK(last.meta.t == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(last.field == art.result.final_state.eta);
    fs::remove_all(dir);
}

TEST_CASE("the sde writes only eta dumps")
{
    const fs::path dir = scratch("sde");
    Config c = small_shell();
    c.equation = Equation::Sde;
    c.noise = "figure3";
    c.grid.ly1 = c.grid.ly2 = 4 * std::acos(-1.0);
    (void)run_simulation(c, dir);
    CHECK(fs::exists(dir / "eta_002.ksh"));
    CHECK(!fs::exists(dir / "eta_dot_000.ksh"));
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are bitwise identical")
{
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const RunArtifacts ra = run_simulation(small_shell(), a);
    (void)run_simulation(small_shell(), b);
    for (const auto& f : ra.files) CHECK(read_file_bytes(a / f) == read_file_bytes(b / f));
    CHECK(read_file_bytes(a / "manifest.json") == read_file_bytes(b / "manifest.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("total energy is conserved without noise or load")
{
    Config c = small_shell();
    c.grid.n1 = c.grid.n2 = 32;
    c.noise = "none";
    c.time.dt = 1e-3;
    c.time.t_end = 1.0;
    c.time.snapshots.clear();
    c.time.diag_every = 100;
    for (const auto& [nu, beta] : {std::pair{1.0, 1.0}, std::pair{-0.5, 1.0}, std::pair{1.0, -0.5}}) {
        c.params.nu_e = nu;
        c.params.beta = beta;
        const PathResult r = run_path(make_problem(c), 0);
        const double e0 = r.diagnostics.front().e_total;
        const double scale = r.diagnostics.front().e_kin + r.diagnostics.front().e_mem + r.diagnostics.front().e_flex;
        for (const auto& row : r.diagnostics) CHECK(std::abs(row.e_total - e0) <= 1e-9 * std::abs(scale));
    }
}

TEST_CASE("a blown-up run leaves a failed manifest")
{
    const fs::path dir = scratch("failed");
    Config c = small_shell();
    c.noise = "none";
    c.params.nu_e = -1e8;
    c.time.dt = 0.1;
    c.time.t_end = 10.0;
    c.time.snapshots = {0.0};
    c.time.diag_every = 1;
    CHECK_THROWS_AS(run_simulation(c, dir), NumericalError);
    const auto m = read_json(dir / "manifest.json");
    CHECK(m["status"] == "failed");
    CHECK(m["artifacts"].size() == 4);
    fs::remove_all(dir);
}

TEST_CASE("invalid configs fail before any output")
{
    const fs::path dir = scratch("invalid");
    Config c = small_shell();
    c.params.alpha = 0.0;
    CHECK_THROWS_AS(run_simulation(c, dir), ValidationError);
    CHECK(!fs::exists(dir));
}
