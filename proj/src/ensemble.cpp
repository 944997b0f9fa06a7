#include "koiter/ensemble.hpp"

#include "koiter/errors.hpp"
#include "koiter/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <thread>

namespace koiter {

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const ScalarField& a, const ScalarField& b)
{
    if (!a.same_shape(b)) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!same_bits(a[k], b[k])) return false;
    return true;
}

bool same_bits(const DiagnosticRow& a, const DiagnosticRow& b)
{
    return same_bits(a.t, b.t) && same_bits(a.e_kin, b.e_kin) && same_bits(a.e_mem, b.e_mem) &&
           same_bits(a.e_flex, b.e_flex) && same_bits(a.e_total, b.e_total) && same_bits(a.eta_min, b.eta_min) &&
           same_bits(a.eta_max, b.eta_max) && same_bits(a.eta_l2, b.eta_l2) && same_bits(a.etadot_l2, b.etadot_l2) &&
           same_bits(a.grad_inf, b.grad_inf) && a.small_displacement_violated == b.small_displacement_violated;
}

std::string real(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// What a worker hands to the reducer for one path.
struct PathOutcome {
    PathSummary summary;
    std::vector<ScalarField> snapshot_eta;
    std::exception_ptr error;
};

PathOutcome simulate_path(const Problem& p, std::uint64_t path)
{
    PathOutcome o;
    try {
        PathResult r = run_path(p, path);
        o.summary.path = path;
        for (const DiagnosticRow& d : r.diagnostics)
            o.summary.max_abs_eta = std::max({o.summary.max_abs_eta, std::abs(d.eta_min), std::abs(d.eta_max)});
        for (Snapshot& s : r.snapshots) {
            o.summary.max_abs_eta = std::max(o.summary.max_abs_eta, max_abs(s.state.eta));
            o.summary.snapshot_energy.push_back(diagnose(p, s.state).e_total);
            o.snapshot_eta.push_back(std::move(s.state.eta));
        }
        o.summary.final = r.diagnostics.back();
    } catch (...) {
        o.error = std::current_exception();
    }
    return o;
}

void merge(EnsembleStats& st, PathOutcome&& o)
{
    st.n_paths += 1;
    const double n = static_cast<double>(st.n_paths);
    for (std::size_t k = 0; k < st.snapshots.size(); ++k) {
        FieldMoments& m = st.snapshots[k];
        const ScalarField& x = o.snapshot_eta[k];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - m.mean[i];
            m.mean[i] += d / n;
            // Welford update written as a sum of squares so m2 never goes negative
            m.m2[i] += d * d * ((n - 1.0) / n);
        }
    }
    for (std::size_t h = 0; h < st.thresholds.size(); ++h)
        if (o.summary.max_abs_eta > st.thresholds[h]) ++st.exceedance_counts[h];
    st.per_path.push_back(std::move(o.summary));
}

} // namespace

ScalarField FieldMoments::variance(std::uint64_t n) const
{
    ScalarField v(m2.n1(), m2.n2());
    if (n < 2) return v;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = m2[k] / static_cast<double>(n - 1);
    return v;
}

std::array<double, 5> EnsembleStats::energy_quantiles(std::size_t k) const
{
    std::vector<double> e;
    e.reserve(per_path.size());
    for (const PathSummary& s : per_path) e.push_back(s.snapshot_energy.at(k));
    std::array<double, 5> q{};
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantile(e, quantile_levels[i]);
    return q;
}

bool operator==(const EnsembleStats& a, const EnsembleStats& b)
{
    if (a.first_path != b.first_path || a.n_paths != b.n_paths || a.snapshots.size() != b.snapshots.size() ||
        a.thresholds != b.thresholds || a.exceedance_counts != b.exceedance_counts || a.per_path.size() != b.per_path.size())
        return false;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        if (!same_bits(a.snapshots[k].t, b.snapshots[k].t) || !same_bits(a.snapshots[k].mean, b.snapshots[k].mean) ||
            !same_bits(a.snapshots[k].m2, b.snapshots[k].m2))
            return false;
    for (std::size_t i = 0; i < a.per_path.size(); ++i) {
        const PathSummary& x = a.per_path[i];
        const PathSummary& y = b.per_path[i];
        if (x.path != y.path || !same_bits(x.max_abs_eta, y.max_abs_eta) || !same_bits(x.final, y.final) ||
            x.snapshot_energy.size() != y.snapshot_energy.size())
            return false;
        for (std::size_t k = 0; k < x.snapshot_energy.size(); ++k)
            if (!same_bits(x.snapshot_energy[k], y.snapshot_energy[k])) return false;
    }
    return true;
}

EnsembleStats run_ensemble(const Config& config, std::uint64_t n_paths, const EnsembleOptions& options)
{
    return run_ensemble(make_problem(config), n_paths, options);
}

EnsembleStats run_ensemble(const Problem& p, std::uint64_t n_paths, const EnsembleOptions& options)
{
    if (n_paths < 1) throw ValidationError("n_paths must be >= 1");
    if (options.workers < 1) throw ValidationError("workers must be >= 1");

    EnsembleStats st;
    if (options.resume) {
        st = *options.resume;
        if (st.first_path + st.n_paths != options.first_path)
            throw ValidationError("resumed ensemble must continue at path " + std::to_string(st.first_path + st.n_paths));
        if (st.snapshots.size() != p.snapshot_steps.size() || st.thresholds != p.config.ensemble.thresholds)
            throw ValidationError("resumed ensemble was built from a different configuration");
    } else {
        st.first_path = options.first_path;
        st.thresholds = p.config.ensemble.thresholds;
        st.exceedance_counts.assign(st.thresholds.size(), 0);
        for (std::uint64_t step : p.snapshot_steps)
            st.snapshots.push_back({static_cast<double>(step) * p.config.time.dt, p.grid.zeros(), p.grid.zeros()});
    }

    const std::size_t workers = options.workers;
    const std::uint64_t batch = 4 * workers;
    for (std::uint64_t start = 0; start < n_paths; start += batch) {
        const std::uint64_t count = std::min(batch, n_paths - start);
        std::vector<PathOutcome> slots(count);
        std::atomic<std::uint64_t> next{0};
        auto work = [&] {
            for (std::uint64_t i = next++; i < count; i = next++) slots[i] = simulate_path(p, options.first_path + start + i);
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < std::min<std::uint64_t>(workers, count); ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            if (slots[i].error) {
                const std::uint64_t path = options.first_path + start + i;
                try {
                    std::rethrow_exception(slots[i].error);
                } catch (const std::exception& e) {
                    throw PathError(path, e.what());
                }
            }
            if (options.on_path) {
                const PathSummary copy = slots[i].summary;
                merge(st, std::move(slots[i]));
                options.on_path(copy);
            } else {
                merge(st, std::move(slots[i]));
            }
        }
    }
    return st;
}

Interval wilson_interval(std::uint64_t count, std::uint64_t n, double z)
{
    if (n == 0) throw ValidationError("n must be >= 1");
    if (count > n) throw ValidationError("count must not exceed n");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(count) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval r{p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (count == 0) r.low = 0.0;
    if (count == n) r.high = 1.0;
    return r;
}

Interval exceedance_probability(const EnsembleStats& stats, double threshold)
{
    std::uint64_t c = 0;
    for (const PathSummary& s : stats.per_path)
        if (s.max_abs_eta > threshold) ++c;
    return wilson_interval(c, stats.per_path.size());
}

GrowthFit estimate_growth_rate(const std::vector<std::pair<double, double>>& series, double t0, double t1)
{
    std::vector<double> t, y;
    for (const auto& [ti, ni] : series) {
        if (ti < t0 || ti > t1) continue;
        if (!(ni > 0.0) || !std::isfinite(ni))
            throw DegenerateWindow("norm is zero or non-finite at t = " + real(ti) + " inside the window");
        t.push_back(ti);
        y.push_back(std::log(ni));
    }
    if (t.size() < 10) throw DegenerateWindow("growth window holds " + std::to_string(t.size()) + " samples, need >= 10");
    const double n = static_cast<double>(t.size());
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= n;
    ym /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    if (!(stt > 0.0)) throw DegenerateWindow("growth window has no time spread");
    GrowthFit f;
    f.lambda = sty / stt;
    f.samples = t.size();
    const double ss_res = std::max(0.0, syy - f.lambda * sty);
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

double quantile(std::vector<double> v, double p)
{
    if (v.empty()) throw ValidationError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<std::filesystem::path> write_ensemble_outputs(const EnsembleStats& st, const Config& config,
                                                          const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> files;

    {
        std::ofstream csv(dir / "ensemble_summary.csv", std::ios::binary);
        if (!csv) throw IoError("cannot write ensemble_summary.csv");
        csv << "path,max_abs_eta,E_kin,E_mem,E_flex,E_total,eta_l2,etadot_l2\n";
        for (const PathSummary& s : st.per_path)
            csv << s.path << "," << real(s.max_abs_eta) << "," << real(s.final.e_kin) << "," << real(s.final.e_mem) << ","
                << real(s.final.e_flex) << "," << real(s.final.e_total) << "," << real(s.final.eta_l2) << ","
                << real(s.final.etadot_l2) << "\n";
        if (!csv) throw IoError("failed writing ensemble_summary.csv");
    }
    files.emplace_back("ensemble_summary.csv");

    for (std::size_t k = 0; k < st.snapshots.size(); ++k) {
        char mean_name[32], var_name[32];
        std::snprintf(mean_name, sizeof mean_name, "mean_%03zu.ksh", k);
        std::snprintf(var_name, sizeof var_name, "var_%03zu.ksh", k);
        const GridDumpMeta meta{config.grid.ly1, config.grid.ly2, st.snapshots[k].t};
        write_grid_dump(st.snapshots[k].mean, meta, dir / mean_name);
        write_grid_dump(st.snapshots[k].variance(st.n_paths), meta, dir / var_name);
        files.emplace_back(mean_name);
        files.emplace_back(var_name);
    }

    nlohmann::json r;
    r["n_paths"] = st.n_paths;
    r["first_path"] = st.first_path;
    r["master_seed"] = config.master_seed;
    r["config_hash"] = config_hash(config);
    r["buckling_criterion"] = "stand-in: a path buckles when sup over its recorded states of |eta|_inf exceeds the "
                              "threshold; the model defines no quantitative buckling criterion";
    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t k = 0; k < st.snapshots.size(); ++k) {
        const auto q = st.energy_quantiles(k);
        nlohmann::json qs;
        for (std::size_t i = 0; i < q.size(); ++i) qs[std::to_string(static_cast<int>(std::lround(quantile_levels[i] * 100)))] = q[i];
        snaps.push_back({{"t", st.snapshots[k].t}, {"energy_quantiles", qs}});
    }
    r["snapshots"] = snaps;
    nlohmann::json ex = nlohmann::json::array();
    for (std::size_t h = 0; h < st.thresholds.size(); ++h) {
        const Interval w = wilson_interval(st.exceedance_counts[h], st.n_paths);
        ex.push_back({{"threshold", st.thresholds[h]},
                      {"count", st.exceedance_counts[h]},
                      {"p_hat", w.p_hat},
                      {"ci_low", w.low},
                      {"ci_high", w.high}});
    }
    r["exceedance"] = ex;
    const std::string text = r.dump(2) + "\n";
    write_file_bytes(dir / "ensemble_report.json", std::vector<unsigned char>(text.begin(), text.end()));
    files.emplace_back("ensemble_report.json");

    write_manifest(dir, "ensemble", config, files, "ok");
    return files;
}

} // namespace koiter
