#include <omp.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "dsice/config.hpp"
#include "dsice/csv.hpp"
#include "dsice/errors.hpp"
#include "dsice/pipeline.hpp"
#include "json.hpp"

using namespace dsice;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
    std::string config;
    int workers = 0;
};

ModelConfig load(const Common& c) {
    ModelConfig cfg = c.config.empty() ? ModelConfig{} : load_config(c.config);
    if (c.workers > 0) cfg.solver.workers = c.workers;
    if (cfg.solver.workers > 0) omp_set_num_threads(cfg.solver.workers);
    cfg.validate();
    return cfg;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p);
    if (!f) throw ValidationError("cannot write " + p.string());
    f << s;
    if (!f) throw ValidationError("failed writing " + p.string());
}

void ensure_dir(const fs::path& d) {
    if (d.empty()) return;
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw ValidationError("cannot create directory " + d.string());
}

json manifest(const std::string& command, const ModelConfig& cfg, const std::string& hash, double seconds) {
    return {{"command", command},
            {"config_hash", hash},
            {"seed", cfg.simulate.seed},
            {"pilot_seed", cfg.solver.pilot_seed},
            {"version", kVersion},
            {"compiler", __VERSION__},
            {"openmp", _OPENMP},
            {"workers", cfg.solver.workers > 0 ? cfg.solver.workers : omp_get_max_threads()},
            {"wall_seconds", seconds}};
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolveOptions solve_options(const std::string& kernel) {
    SolveOptions so;
    so.kernel = kernel == "serial" ? Kernel::Serial : Kernel::Parallel;
    so.progress = [](const StepStats& s) {
        spdlog::info("t={:4d}  residual={:.2e}  unconverged={}  evaluations={}  {:.2f}s", s.t, s.max_residual,
                     s.unconverged, s.evaluations, s.seconds);
    };
    return so;
}

void warn_fit(const std::vector<StepStats>& stats, double tol) {
    for (const auto& s : stats)
        if (s.max_residual > tol) spdlog::warn("t={}: fit residual {:.2e} exceeds {:.1e}", s.t, s.max_residual, tol);
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const Common& c, const std::string& targets_path, const std::string& emissions_path,
                  const std::string& out, const std::string& fixture_dir) {
    const ModelConfig cfg = load(c);
    if (!fixture_dir.empty()) {
        ensure_dir(fixture_dir);
        const auto pts = synthetic_emissions();
        std::string e = "t,E\n";
        for (auto [t, v] : pts) e += std::to_string(static_cast<int>(t)) + "," + fmt::format("{:.17g}", v) + "\n";
        write_text(fs::path(fixture_dir) / "emissions.csv", e);
        const auto annual = interpolate_annual(pts, 500);
        const CarbonState M0{cfg.initial.x[MAT], cfg.initial.x[MUO], cfg.initial.x[MLO]};
        const TemperatureState T0{cfg.initial.x[TAT], cfg.initial.x[TOC]};
        write_targets(generate_targets(cfg.params.climate, annual, M0, T0, 500),
                      (fs::path(fixture_dir) / "targets.csv").string());
        spdlog::info("wrote {}/targets.csv and {}/emissions.csv", fixture_dir, fixture_dir);
        if (targets_path.empty()) return 0;
    }
    if (targets_path.empty() || emissions_path.empty())
        throw ValidationError("calibrate-climate needs --targets and --emissions");
    const auto t0 = std::chrono::steady_clock::now();
    const DecadalTargets targets = read_targets(targets_path);
    const auto annual = interpolate_annual(read_emissions(emissions_path), targets.t.back());
    CalibrationOptions opt;
    opt.start = {0.03, 0.004, 0.05, 0.02, 0.003};
    opt.extra_starts = {{0.01, 0.008, 0.025, 0.005, 0.008}};
    const CalibrationResult r =
        calibrate_climate(targets, annual, targets.M.front(), targets.T.front(), cfg.params.climate, opt);
    const auto& p = r.params;
    const std::string text = fmt::format(
        "# calibrated annual climate parameters\n# config_hash={}\n# objective={:.6e} evaluations={} seconds={:.2f}\n"
        "# derived: phi21={:.8g} phi32={:.8g} xi2={:.8g}\n"
        "[climate]\nphi12 = {:.10g}\nphi23 = {:.10g}\nxi1 = {:.10g}\nvarphi12 = {:.10g}\nvarphi21 = {:.10g}\n",
        config_hash(cfg), r.objective, r.evaluations, since(t0), p.phi21, p.phi32, p.xi2, p.phi12, p.phi23, p.xi1, p.varphi12,
        p.varphi21);
    if (out.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text(out, text);
    spdlog::info("objective {:.3e} after {} evaluations", r.objective, r.evaluations);
    return 0;
}

int cmd_build_chains(const Common& c, const std::string& out) {
    const ModelConfig cfg = load(c);
    const std::string hash = config_hash(cfg);
    const ProductivityChain chain = build_chain(cfg.growth);
    if (chain.degenerate_rows > 0)
        spdlog::warn("{} transition rows are nearly degenerate (max probability > 0.999)", chain.degenerate_rows);
    const int T = chain.horizon;
    std::printf("horizon %d  grids %d x %d  sqrt(Delta_T) %.6f  sqrt(Upsilon_T) %.6f\n", T, chain.n_zeta(T),
                chain.n_chi(T), std::sqrt(chain.Delta[T]), std::sqrt(chain.Upsilon[T]));
    if (!out.empty()) {
        write_chain_csv(chain, out, "config_hash=" + hash);
        spdlog::info("wrote {}", out);
    }
    return 0;
}

int cmd_hazard(const std::string& input, const std::string& out) {
    std::vector<std::pair<double, double>> rows{{1, 0.125}, {2, 0.25}, {3, 0.375}, {4, 0.5}, {5, 0.625}, {6, 0.75}};
    if (!input.empty()) {
        rows.clear();
        for (const auto& r : read_csv(input, {"dT", "P"})) rows.emplace_back(r[0], r[1]);
    }
    std::string s = "dT,P,lambda\n";
    for (auto [dT, P] : rows) s += fmt::format("{:g},{:g},{:.6g}\n", dT, P, calibrate_hazard(P, dT));
    if (out.empty())
        std::fputs(s.c_str(), stdout);
    else
        write_text(out, s);
    return 0;
}

int cmd_solve(const Common& c, const std::string& out, bool resume, const std::string& kernel) {
    const ModelConfig cfg = load(c);
    const auto t0 = std::chrono::steady_clock::now();
    ensure_dir(fs::path(out).parent_path());
    SolveOptions so = solve_options(kernel);
    so.checkpoint = out;
    so.resume = resume;
    const SolvedModel m = solve_model(cfg, so);
    warn_fit(m.stats, cfg.solver.fit_warn);
    json man = manifest("solve", cfg, m.hash, since(t0));
    json steps = json::array();
    for (const auto& s : m.stats)
        steps.push_back({{"t", s.t}, {"max_residual", s.max_residual}, {"unconverged", s.unconverged},
                         {"evaluations", s.evaluations}, {"seconds", s.seconds}});
    man["steps"] = steps;
    write_text(out + ".manifest.json", man.dump(2) + "\n");
    std::filesystem::remove(out + ".policy");
    spdlog::info("value table written to {}", out);
    return 0;
}

int cmd_simulate(const Common& c, const std::string& table_path, std::string out_dir, std::optional<int> paths,
                 std::optional<std::uint64_t> seed, const std::string& kernel) {
    ModelConfig cfg = load(c);
    if (paths) cfg.simulate.n_paths = *paths;
    if (seed) cfg.simulate.seed = *seed;
    cfg.validate();
    const std::string hash = config_hash(cfg);
    const ValueTable table = ValueTable::load(table_path);
    if (table.config_hash != hash)
        throw ValidationError("value table " + table_path + " was solved for config " + table.config_hash +
                              ", not " + hash + "; refusing to simulate");
    if (out_dir.empty()) out_dir = cfg.simulate.output_dir;
    ensure_dir(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const ProductivityChain chain = build_chain(cfg.growth);
    SimulateOptions so;
    so.n_paths = cfg.simulate.n_paths;
    so.seed = cfg.simulate.seed;
    so.kernel = kernel == "serial" ? Kernel::Serial : Kernel::Parallel;
    so.workers = cfg.solver.workers;
    const PathSet ps = simulate(cfg, chain, table, so);
    write_paths_csv(ps, (fs::path(out_dir) / "paths.csv").string());
    write_text(fs::path(out_dir) / "summary.json",
               summary_json(ps, std::min(cfg.simulate.stats_year, ps.horizon - 2), cfg.simulate.ar_window) + "\n");
    json man = manifest("simulate", cfg, hash, since(t0));
    man["n_paths"] = ps.n_paths;
    man["abort_fraction"] = ps.abort_fraction();
    write_text(fs::path(out_dir) / "manifest.json", man.dump(2) + "\n");
    if (ps.abort_fraction() > 0.0) spdlog::warn("{:.2f}% of paths left the box and were aborted", 100 * ps.abort_fraction());
    spdlog::info("initial SCC {:.3f} $/tC; outputs in {}", ps.paths[0].empty() ? NAN : ps.paths[0][0].scc, out_dir);
    return 0;
}

int cmd_stats(const Common& c, const std::string& paths_csv, const std::string& out) {
    const ModelConfig cfg = load(c);
    const PathSet ps = read_paths_csv(paths_csv);
    if (!c.config.empty() && ps.config_hash != config_hash(cfg))
        throw ValidationError(paths_csv + " was produced under a different config");
    const std::string s = summary_json(ps, std::min(cfg.simulate.stats_year, ps.horizon - 2), cfg.simulate.ar_window);
    if (out.empty())
        std::puts(s.c_str());
    else
        write_text(out, s + "\n");
    return 0;
}

int cmd_verify(const Common& c, const std::string& out_dir, const std::string& kernel) {
    const ModelConfig cfg = deterministic_variant(load(c));
    const auto t0 = std::chrono::steady_clock::now();
    const VerifyReport r = verify_model(cfg, solve_options(kernel));
    warn_fit(r.stats, cfg.solver.fit_warn);
    const std::string hash = config_hash(cfg);
    const std::string text = report_text(r);
    std::fputs(text.c_str(), stdout);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_text(fs::path(out_dir) / "accuracy.txt", "# config_hash=" + hash + "\n" + text);
        write_text(fs::path(out_dir) / "accuracy.csv", report_csv(r, hash));
        write_text(fs::path(out_dir) / "manifest.json", manifest("verify", cfg, hash, since(t0)).dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic integrated assessment model: solver, simulator and diagnostics"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* s) {
        s->add_option("-c,--config", common.config, "run configuration (INI)")->check(CLI::ExistingFile);
        s->add_option("-w,--workers", common.workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    };
    std::string kernel = "parallel";
    auto add_kernel = [&](CLI::App* s) {
        s->add_option("--kernel", kernel, "maximization kernel")->check(CLI::IsMember({"serial", "parallel"}));
    };

    std::string targets, emissions, out, fixture, input, table, out_dir, paths_csv;
    bool resume = false;
    std::optional<int> n_paths;
    std::optional<std::uint64_t> seed;

    auto* cal = app.add_subcommand("calibrate-climate", "fit the annual climate parameters to decadal targets");
    add_common(cal);
    cal->add_option("--targets", targets, "decadal targets CSV (t,M_AT,M_UO,M_LO,T_AT,T_OC)");
    cal->add_option("--emissions", emissions, "emissions CSV (t,E)");
    cal->add_option("-o,--out", out, "parameter file to write");
    cal->add_option("--write-fixture", fixture, "write synthetic targets and emissions into this directory");

    auto* chains = app.add_subcommand("build-chains", "build the productivity Markov chain");
    add_common(chains);
    chains->add_option("-o,--out", out, "transition CSV");

    auto* hazard = app.add_subcommand("hazard-table", "hazard rate parameters from cumulative probabilities");
    hazard->add_option("--input", input, "CSV with columns dT,P (default: the six benchmark pairs)");
    hazard->add_option("-o,--out", out, "output CSV");

    auto* solve_cmd = app.add_subcommand("solve", "backward value function iteration");
    add_common(solve_cmd);
    add_kernel(solve_cmd);
    solve_cmd->add_option("-o,--out", out, "value table file")->required();
    solve_cmd->add_flag("--resume", resume, "continue an interrupted sweep from --out");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo paths from a solved value table");
    add_common(sim);
    add_kernel(sim);
    sim->add_option("-t,--table", table, "value table file")->required()->check(CLI::ExistingFile);
    sim->add_option("-o,--out-dir", out_dir, "output directory (default from config)");
    sim->add_option("-n,--paths", n_paths, "number of paths");
    sim->add_option("--seed", seed, "random seed");

    auto* stats = app.add_subcommand("stats", "summary statistics of a paths CSV");
    add_common(stats);
    stats->add_option("-p,--paths", paths_csv, "paths CSV")->required()->check(CLI::ExistingFile);
    stats->add_option("-o,--out", out, "summary JSON");

    auto* ver = app.add_subcommand("verify", "deterministic DP against trajectory optimization");
    add_common(ver);
    add_kernel(ver);
    ver->add_option("-o,--out-dir", out_dir, "directory for the accuracy report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cal) return cmd_calibrate(common, targets, emissions, out, fixture);
        if (*chains) return cmd_build_chains(common, out);
        if (*hazard) return cmd_hazard(input, out);
        if (*solve_cmd) return cmd_solve(common, out, resume, kernel);
        if (*sim) return cmd_simulate(common, table, out_dir, n_paths, seed, kernel);
        if (*stats) return cmd_stats(common, paths_csv, out);
        if (*ver) return cmd_verify(common, out_dir, kernel);
    } catch (const ValidationError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const DomainError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const CalibrationError& e) {
        spdlog::error("{} (best objective {:.3e})", e.what(), e.best().objective);
        return 3;
    } catch (const NumericalError& e) {
        spdlog::error("{}", e.what());
        return 3;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 3;
    }
    return 0;
}
