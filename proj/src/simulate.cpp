#include "dsice/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include "json.hpp"

#include "dsice/csv.hpp"
#include "dsice/errors.hpp"
#include "dsice/rng.hpp"

namespace dsice {

double PathSet::abort_fraction() const {
    if (aborted_at.empty()) return 0.0;
    int n = 0;
    for (int a : aborted_at) n += a >= 0 ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(aborted_at.size());
}

namespace {

int draw_row(const Matrix& P, int row, double u) {
    return draw_index(&P.a[static_cast<std::size_t>(row) * P.cols], P.cols, u);
}

void simulate_path(const ModelConfig& cfg, const ProductivityChain& chain, const ValueTable& table,
                   const ChebyshevBasis& basis, const std::vector<double>& Jvals, std::uint64_t seed, int path,
                   std::vector<PathRecord>& out, int& aborted_at) {
    const int T = table.horizon;
    State6 x = cfg.initial.x;
    int iz = 0, ic = 0, iJ = 0;
    std::vector<Controls> warm;
    aborted_at = -1;
    out.clear();
    out.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        if (!table.boxes[t].contains(to_coords(x))) {
            aborted_at = t;
            return;
        }
        const int d = table.index[t].flat(iz, ic, iJ);
        const NodeResult nr = bellman_node(cfg, chain, basis, table, t, x, iz, ic, iJ, warm);
        const PeriodContext ctx = period_context(t, cfg.params.exo);
        PathRecord r;
        r.t = t;
        r.x = x;
        r.zeta = chain.zeta_grid[t][iz];
        r.chi = chain.chi_grid[t][ic];
        r.J = Jvals[iJ];
        r.iz = iz;
        r.ic = ic;
        r.iJ = iJ;
        r.C = nr.step.C;
        r.mu = nr.controls.mu;
        r.s = nr.controls.s;
        r.Y = nr.step.Y;
        r.I = nr.step.I;
        r.Psi = nr.step.Psi;
        r.L = ctx.L;
        r.scc = table_scc(basis, table, t, d, x);
        r.tax = carbon_tax(r.mu, ctx.theta1, cfg.params.exo.theta2, ctx.sigma);
        out.push_back(r);

        const Matrix& Pc = chain.P_chi[t];
        const Matrix& Pz = chain.P_zeta[t][ic];
        const int ic1 = draw_row(Pc, ic, uniform(seed, path, t, Shock::Chi));
        const int iz1 = draw_row(Pz, iz, uniform(seed, path, t, Shock::Zeta));
        const auto jrow = transition_row(iJ, x[TAT], cfg.tipping);
        std::vector<double> pj;
        for (auto [j, p] : jrow) pj.push_back(p);
        iJ = jrow[draw_index(pj.data(), static_cast<int>(pj.size()), uniform(seed, path, t, Shock::Tipping))].first;
        ic = ic1;
        iz = iz1;
        x = nr.step.next;
        warm = {nr.controls};
    }
    if (!table.boxes[T].contains(to_coords(x))) aborted_at = T;
}

}  // namespace

PathSet simulate(const ModelConfig& cfg, const ProductivityChain& chain, const ValueTable& table,
                 const SimulateOptions& opts) {
    if (opts.n_paths < 1) throw ValidationError("n_paths must be positive");
    if (table.first_solved != 0) throw ValidationError("value table does not cover t = 0");
    if (table.degree != cfg.solver.degree || table.horizon != cfg.solver.horizon)
        throw ValidationError("value table does not match the solver configuration");
    const ChebyshevBasis basis(table.degree);
    const auto Jvals = damage_lattice(cfg.tipping);

    PathSet ps;
    ps.horizon = table.horizon;
    ps.n_paths = opts.n_paths;
    ps.seed = opts.seed;
    ps.config_hash = table.config_hash;
    ps.paths.resize(static_cast<std::size_t>(opts.n_paths));
    ps.aborted_at.assign(static_cast<std::size_t>(opts.n_paths), -1);
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(opts.n_paths));
    auto run = [&](int p) {
        try {
            simulate_path(cfg, chain, table, basis, Jvals, opts.seed, p, ps.paths[p], ps.aborted_at[p]);
        } catch (...) {
            errs[p] = std::current_exception();
        }
    };
    if (opts.kernel == Kernel::Parallel) {
        const int threads = opts.workers > 0 ? opts.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int p = 0; p < opts.n_paths; ++p) run(p);
    } else {
        for (int p = 0; p < opts.n_paths; ++p) run(p);
    }
    for (int p = 0; p < opts.n_paths; ++p) {
        if (!errs[p]) continue;
        try {
            std::rethrow_exception(errs[p]);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericalError("path " + std::to_string(p) + ": " + e.what());
        }
    }
    return ps;
}

bool policy_envelope(const ModelConfig& cfg, const ProductivityChain& chain, const ValueTable& table, int n_paths,
                     std::uint64_t seed, Envelope& env) {
    const ChebyshevBasis basis(table.degree);
    const auto Jvals = damage_lattice(cfg.tipping);
    const int T = table.horizon;
    const int jmax = static_cast<int>(std::max_element(Jvals.begin(), Jvals.end()) - Jvals.begin());
    const int corners = cfg.deterministic() ? 0 : 4;
    std::vector<std::vector<State6>> visited(static_cast<std::size_t>(n_paths + corners));
    auto run = [&](int p) {
        auto& out = visited[p];
        State6 x = cfg.initial.x;
        int iz = 0, ic = 0, iJ = 0;
        std::vector<Controls> warm;
        for (int t = 0; t <= T; ++t) {
            out.push_back(x);
            if (t == T || table.boxes[t].excursion(to_coords(x)) > cfg.solver.excursion_tol) return;
            if (p >= n_paths) {
                const int corner = p - n_paths;
                iz = (corner & 1) ? chain.n_zeta(t) - 1 : 0;
                ic = 0;
                iJ = (corner & 2) ? jmax : 0;
            }
            const NodeResult nr = bellman_node(cfg, chain, basis, table, t, x, iz, ic, iJ, warm);
            if (p < n_paths) {
                const int ic1 = draw_row(chain.P_chi[t], ic, uniform(seed, p, t, Shock::Chi));
                iz = draw_row(chain.P_zeta[t][ic], iz, uniform(seed, p, t, Shock::Zeta));
                ic = ic1;
                const auto jrow = transition_row(iJ, x[TAT], cfg.tipping);
                std::vector<double> pj;
                for (auto [j, pr] : jrow) pj.push_back(pr);
                iJ = jrow[draw_index(pj.data(), static_cast<int>(pj.size()), uniform(seed, p, t, Shock::Tipping))].first;
            }
            x = nr.step.next;
            warm = {nr.controls};
        }
    };
#pragma omp parallel for schedule(dynamic, 1)
    for (int p = 0; p < n_paths + corners; ++p) run(p);
    bool escaped = false;
    for (const auto& path : visited)
        for (std::size_t t = 0; t < path.size(); ++t) {
            escaped = escaped || !table.boxes[t].contains(to_coords(path[t]));
            env.add(static_cast<int>(t), path[t]);
        }
    return escaped;
}

void write_paths_csv(const PathSet& ps, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ValidationError("cannot write " + path);
    std::fprintf(f, "# config_hash=%s seed=%llu paths=%d horizon=%d\n", ps.config_hash.c_str(),
                 static_cast<unsigned long long>(ps.seed), ps.n_paths, ps.horizon);
    std::fprintf(f, "path_id,t,K,M_AT,M_UO,M_LO,T_AT,T_OC,zeta,chi,J,C,mu,Y,I,Psi,SCC,tax\n");
    for (std::size_t p = 0; p < ps.paths.size(); ++p)
        for (const auto& r : ps.paths[p])
            std::fprintf(f, "%zu,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                         p, r.t, r.x[0], r.x[1], r.x[2], r.x[3], r.x[4], r.x[5], r.zeta, r.chi, r.J, r.C, r.mu, r.Y,
                         r.I, r.Psi, r.scc, r.tax);
    if (std::fclose(f) != 0) throw ValidationError("failed writing " + path);
}

PathSet read_paths_csv(const std::string& path) {
    PathSet ps;
    {
        std::ifstream f(path);
        std::string first;
        if (!f || !std::getline(f, first)) throw ValidationError("cannot read " + path);
        unsigned long long seed = 0;
        char hash[129] = {0};
        if (std::sscanf(first.c_str(), "# config_hash=%128s seed=%llu paths=%d horizon=%d", hash, &seed, &ps.n_paths,
                        &ps.horizon) != 4)
            throw ValidationError(path + ":1: missing config hash header");
        ps.config_hash = hash;
        ps.seed = seed;
    }
    const auto rows = read_csv(path, {"path_id", "t", "K", "M_AT", "M_UO", "M_LO", "T_AT", "T_OC", "zeta", "chi", "J",
                                      "C", "mu", "Y", "I", "Psi", "SCC", "tax"});
    ps.paths.resize(static_cast<std::size_t>(ps.n_paths));
    ps.aborted_at.assign(static_cast<std::size_t>(ps.n_paths), -1);
    for (const auto& v : rows) {
        const int p = static_cast<int>(v[0]);
        if (p < 0 || p >= ps.n_paths) throw ValidationError(path + ": path_id out of range");
        PathRecord r;
        r.t = static_cast<int>(v[1]);
        for (int d = 0; d < kStateDim; ++d) r.x[d] = v[2 + d];
        r.zeta = v[8];
        r.chi = v[9];
        r.J = v[10];
        r.C = v[11];
        r.mu = v[12];
        r.Y = v[13];
        r.I = v[14];
        r.Psi = v[15];
        r.scc = v[16];
        r.tax = v[17];
        r.L = population(r.t);
        if (r.t != static_cast<int>(ps.paths[p].size())) throw ValidationError(path + ": records out of order");
        ps.paths[p].push_back(r);
    }
    for (int p = 0; p < ps.n_paths; ++p)
        if (static_cast<int>(ps.paths[p].size()) < ps.horizon) ps.aborted_at[p] = static_cast<int>(ps.paths[p].size());
    return ps;
}

namespace series {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

PathSeries consumption_growth(const PathSet& ps) {
    return ps.series([](const PathRecord& r, const PathRecord* n) {
        return n ? (n->C / n->L) / (r.C / r.L) - 1.0 : kNaN;
    });
}

PathSeries output_growth(const PathSet& ps) {
    return ps.series([](const PathRecord& r, const PathRecord* n) {
        return n ? (n->Y / n->L) / (r.Y / r.L) - 1.0 : kNaN;
    });
}

PathSeries log10_scc(const PathSet& ps) {
    return ps.series([](const PathRecord& r, const PathRecord*) { return r.scc > 0.0 ? std::log10(r.scc) : kNaN; });
}

PathSeries ratio_C_Y(const PathSet& ps) {
    return ps.series([](const PathRecord& r, const PathRecord*) { return r.C / r.Y; });
}

PathSeries ratio_I_Y(const PathSet& ps) {
    return ps.series([](const PathRecord& r, const PathRecord*) { return r.I / r.Y; });
}

PathSeries ratio_Psi_Y(const PathSet& ps) {
    return ps.series([](const PathRecord& r, const PathRecord*) { return r.Psi / r.Y; });
}

PathSeries variable(const PathSet& ps, const std::string& name) {
    if (name == "g_c") return consumption_growth(ps);
    if (name == "g_y") return output_growth(ps);
    if (name == "log10_SCC") return log10_scc(ps);
    if (name == "C_Y") return ratio_C_Y(ps);
    if (name == "I_Y") return ratio_I_Y(ps);
    if (name == "Psi_Y") return ratio_Psi_Y(ps);
    static const char* dims[] = {"K", "M_AT", "M_UO", "M_LO", "T_AT", "T_OC"};
    for (int d = 0; d < kStateDim; ++d)
        if (name == dims[d]) return ps.series([d](const PathRecord& r, const PathRecord*) { return r.x[d]; });
    auto field = [&](double PathRecord::*m) {
        return ps.series([m](const PathRecord& r, const PathRecord*) { return r.*m; });
    };
    if (name == "zeta") return field(&PathRecord::zeta);
    if (name == "chi") return field(&PathRecord::chi);
    if (name == "J") return field(&PathRecord::J);
    if (name == "C") return field(&PathRecord::C);
    if (name == "mu") return field(&PathRecord::mu);
    if (name == "Y") return field(&PathRecord::Y);
    if (name == "I") return field(&PathRecord::I);
    if (name == "Psi") return field(&PathRecord::Psi);
    if (name == "SCC") return field(&PathRecord::scc);
    if (name == "tax") return field(&PathRecord::tax);
    throw ValidationError("unknown variable '" + name + "'");
}

}  // namespace series

Correlation growth_correlations(const PathSet& ps, int year) {
    if (year < 0 || year + 1 >= ps.horizon) throw DomainError("correlation year outside the simulated range");
    std::vector<std::vector<double>> v(5);
    for (const auto& p : ps.paths) {
        if (static_cast<int>(p.size()) <= year + 1) continue;
        const auto& a = p[year];
        const auto& b = p[year + 1];
        v[0].push_back(b.Y / a.Y - 1.0);
        v[1].push_back(b.C / a.C - 1.0);
        v[2].push_back(b.I / a.I - 1.0);
        v[3].push_back(a.Psi > 0.0 ? b.Psi / a.Psi - 1.0 : 0.0);
        v[4].push_back(b.scc / a.scc - 1.0);
    }
    if (v[0].size() < 2) throw DomainError("correlations need at least 2 complete paths");
    return correlations(v);
}

std::string summary_json(const PathSet& ps, int stats_year, int ar_window) {
    using nlohmann::json;
    json j;
    j["config_hash"] = ps.config_hash;
    j["seed"] = ps.seed;
    j["n_paths"] = ps.n_paths;
    j["horizon"] = ps.horizon;
    j["abort_fraction"] = ps.abort_fraction();

    static const char* vars[] = {"g_y", "C_Y", "I_Y", "Psi_Y", "log10_SCC", "g_c", "K",
                                 "M_AT", "T_AT", "C", "mu", "SCC", "tax"};
    for (const char* name : vars) {
        const PathSeries s = series::variable(ps, name);
        const ArStats a = ar1_stats(s, ar_window);
        j["ar1"][name] = {{"Lambda_mean", a.Lambda_mean}, {"Lambda_se", a.Lambda_se},
                          {"sigma_eps_mean", a.sigma_mean}, {"sigma_eps_se", a.sigma_se},
                          {"used", a.used}, {"excluded", a.excluded}};
        const Fan f = quantile_fan(s);
        json fan = json::object();
        for (std::size_t t = 0; t < f.mean.size(); ++t) {
            json row{{"mean", f.mean[t]}, {"sd", f.sd[t]}, {"n", f.count[t]}};
            for (std::size_t k = 0; k < kFanLevels.size(); ++k) {
                char key[8];
                std::snprintf(key, sizeof key, "q%02d", static_cast<int>(kFanLevels[k] * 100 + 0.5));
                row[key] = f.q[t][k];
            }
            fan[std::to_string(t)] = row;
        }
        j["fans"][name] = fan;
    }
    if (ps.n_paths >= 2 && stats_year + 1 < ps.horizon) {
        const Correlation c = growth_correlations(ps, stats_year);
        j["correlations"] = {{"year", stats_year},
                             {"variables", {"g_Y", "g_C", "g_I", "g_Psi", "g_SCC"}},
                             {"matrix", c.r},
                             {"degenerate", c.degenerate}};
    }
    const GrowthStats g = growth_stats(series::consumption_growth(ps), ar_window);
    auto b = [](const Band& x) { return json{{"median", x.median}, {"p05", x.lo}, {"p95", x.hi}}; };
    j["consumption_growth"] = {{"mean", b(g.mean)}, {"sd", b(g.sd)}, {"ac1", b(g.ac1)},
                               {"ac2", b(g.ac2)}, {"Lambda", b(g.Lambda)}, {"sigma_eps", b(g.sigma_eps)},
                               {"paths", g.paths}};
    return j.dump(2);
}

}  // namespace dsice
