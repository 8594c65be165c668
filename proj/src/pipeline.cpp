#include "dsice/pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "dsice/config.hpp"
#include "dsice/errors.hpp"

namespace dsice {

std::vector<std::pair<double, double>> synthetic_emissions() {
    std::vector<std::pair<double, double>> pts;
    for (int t = 0; t <= 500; t += 10) {
        // Rises to a peak at t = 100 and falls back to the initial level.
        const double x = t / 100.0;
        pts.emplace_back(t, 8.4 + 17.0 * x * x * std::exp(1.0 - x * x));
    }
    return pts;
}

ModelConfig deterministic_variant(ModelConfig cfg) {
    cfg.growth.n_zeta = 1;
    cfg.growth.n_chi = 1;
    cfg.tipping.enabled = false;
    return cfg;
}

TrajectoryOptions trajectory_options(const ModelConfig& cfg) {
    TrajectoryOptions o;
    o.horizon = cfg.solver.horizon;
    o.tail = cfg.solver.tail;
    o.s_max = cfg.solver.s_max;
    return o;
}

namespace {

Envelope pilot(const ModelConfig& cfg, const ProductivityChain& chain) {
    const auto sol = solve_deterministic(cfg.initial.x, cfg.params, trajectory_options(cfg));
    std::vector<double> mu;
    for (const auto& c : sol.path.c) mu.push_back(c.mu);
    return pilot_envelope(cfg, chain, mu, cfg.solver.pilot_seed);
}

}  // namespace

std::vector<Box6> pilot_boxes(const ModelConfig& cfg, const ProductivityChain& chain) {
    return boxes_from_envelope(cfg, pilot(cfg, chain));
}

SolvedModel solve_model(const ModelConfig& cfg, const SolveOptions& opts) {
    cfg.validate();
    SolvedModel m;
    m.cfg = cfg;
    m.hash = config_hash(cfg);
    m.chain = build_chain(cfg.growth);
    Envelope env = pilot(cfg, m.chain);
    const auto boxes = boxes_from_envelope(cfg, env);
    auto res = solve(cfg, m.chain, boxes, m.hash, opts);
    // A resumed checkpoint on other boxes is already the refined solve.
    if (cfg.solver.refine_boxes && res.table.boxes == boxes) {
        const int n = cfg.deterministic() ? 1 : cfg.solver.pilot_paths;
        if (policy_envelope(cfg, m.chain, res.table, n, cfg.solver.pilot_seed, env)) {
            SolveOptions o = opts;
            o.resume = false;
            res = solve(cfg, m.chain, boxes_from_envelope(cfg, env), m.hash, o);
        }
    }
    m.table = std::move(res.table);
    m.stats = std::move(res.stats);
    return m;
}

Trajectory dp_trajectory(const SolvedModel& m) {
    SimulateOptions so;
    so.n_paths = 1;
    so.seed = m.cfg.simulate.seed;
    so.kernel = Kernel::Serial;
    const PathSet ps = simulate(m.cfg, m.chain, m.table, so);
    if (ps.aborted_at[0] >= 0)
        throw DomainViolation("deterministic path left the box at t=" + std::to_string(ps.aborted_at[0]), -1);
    Trajectory tr;
    for (const auto& r : ps.paths[0]) {
        tr.x.push_back(r.x);
        tr.c.push_back({r.s, r.mu});
        tr.C.push_back(r.C);
        tr.Y.push_back(r.Y);
        tr.Psi.push_back(r.Psi);
        tr.I.push_back(r.I);
        tr.scc.push_back(r.scc);
    }
    return tr;
}

VerifyReport verify_model(const ModelConfig& cfg_in, const SolveOptions& opts, bool finite_difference) {
    const ModelConfig cfg = deterministic_variant(cfg_in);
    VerifyReport r;
    const auto topt = trajectory_options(cfg);
    r.oracle = solve_deterministic(cfg.initial.x, cfg.params, topt);
    const SolvedModel m = solve_model(cfg, opts);
    r.stats = m.stats;
    r.dp = dp_trajectory(m);
    r.errors = compare(r.dp, r.oracle.path, std::min(100, cfg.solver.horizon));
    r.dp_objective = trajectory_objective(cfg.initial.x, r.dp.c, cfg.params, topt);
    if (finite_difference) r.scc_fd = scc_finite_difference(cfg.initial.x, cfg.params, topt, r.oracle.path.c);
    return r;
}

std::string report_text(const VerifyReport& r) {
    std::string s = "Relative errors of the DP solution against the trajectory oracle\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %18s %18s\n", "", "first 100 years", "initial year");
    s += buf;
    for (const auto& e : r.errors) {
        if (e.has_initial)
            std::snprintf(buf, sizeof buf, "%-8s %18.2e %18.2e\n", e.variable.c_str(), e.window, e.initial);
        else
            std::snprintf(buf, sizeof buf, "%-8s %18.2e %18s\n", e.variable.c_str(), e.window, "");
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "\ninitial SCC: DP %.4f  oracle costate %.4f  oracle finite-difference %.4f\n",
                  r.dp.scc.at(0), r.oracle.path.scc.at(0), r.scc_fd);
    s += buf;
    std::snprintf(buf, sizeof buf, "objective: oracle %.12e  DP path %.12e\n", r.oracle.path.objective, r.dp_objective);
    s += buf;
    return s;
}

std::string report_csv(const VerifyReport& r, const std::string& hash) {
    std::string s = "# config_hash=" + hash + "\nvariable,window_error,initial_error\n";
    char buf[128];
    for (const auto& e : r.errors) {
        if (e.has_initial)
            std::snprintf(buf, sizeof buf, "%s,%.6e,%.6e\n", e.variable.c_str(), e.window, e.initial);
        else
            std::snprintf(buf, sizeof buf, "%s,%.6e,\n", e.variable.c_str(), e.window);
        s += buf;
    }
    return s;
}

}  // namespace dsice
