#include "dsice/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "dsice/errors.hpp"
#include "dsice/optimize.hpp"
#include "dsice/rng.hpp"

namespace dsice {

DiscreteIndex discrete_index(const ProductivityChain& chain, const TippingParams& tp, int t) {
    return {chain.n_zeta(t), chain.n_chi(t), tp.n_states()};
}

std::vector<Successor> successors(const ProductivityChain& chain, const TippingParams& tp, int t, int iz,
                                  int ic, int iJ, double T_AT) {
    const DiscreteIndex next = discrete_index(chain, tp, t + 1);
    const auto jrow = transition_row(iJ, T_AT, tp);
    const Matrix& Pc = chain.P_chi[t];
    const Matrix& Pz = chain.P_zeta[t][ic];
    std::vector<Successor> out;
    for (int iz1 = 0; iz1 < next.n_zeta; ++iz1) {
        const double pz = Pz(iz, iz1);
        if (pz <= 0.0) continue;
        for (int ic1 = 0; ic1 < next.n_chi; ++ic1) {
            const double pc = Pc(ic, ic1);
            if (pc <= 0.0) continue;
            for (auto [iJ1, pj] : jrow) out.push_back({next.flat(iz1, ic1, iJ1), pz * pc * pj});
        }
    }
    return out;
}

namespace {

std::string fmt_fraction(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct NodeProblem {
    const ModelConfig* cfg;
    const ChebyshevBasis* basis;
    const Box6* box_next;
    PeriodContext ctx;
    State6 x;
    double zeta;
    double J;
    std::vector<const double*> coef;
    std::vector<double> prob;
};

NodeProblem make_problem(const ModelConfig& cfg, const ProductivityChain& chain, const ChebyshevBasis& basis,
                         const ValueTable& table, int t, const State6& x, int iz, int ic, int iJ,
                         const std::vector<double>& Jvals) {
    if (t < 0 || t >= table.horizon) throw DomainError("time index outside the solved horizon");
    if (table.coeffs[t + 1].empty()) throw NumericalError("value table has no coefficients at t+1");
    NodeProblem np{&cfg, &basis, &table.boxes[t + 1], period_context(t, cfg.params.exo), x,
                   chain.zeta_grid[t][iz], Jvals[iJ], {}, {}};
    for (const auto& s : successors(chain, cfg.tipping, t, iz, ic, iJ, x[TAT])) {
        np.coef.push_back(table.coefficients(t + 1, s.d));
        np.prob.push_back(s.p);
    }
    return np;
}

struct Scratch {
    std::vector<double> B, G, H, v, w, wsum;
};

// Objective u + beta * CE at controls c; writes d/d(s, mu) when grad != nullptr.
double node_objective(const NodeProblem& np, const Controls& c, double* grad, StepResult* out,
                      Scratch& sc) {
    const auto& p = np.cfg->params;
    StepResult r = step(np.x, np.zeta, np.J, np.ctx, c, p, grad != nullptr);
    if (out) *out = r;
    if (!(r.C > 0.0) || !std::isfinite(r.u)) return -std::numeric_limits<double>::infinity();

    const Box6& box = *np.box_next;
    const State6 y = to_coords(r.next);
    State6 z = normalize(y, box), off{};
    bool outside = false;
    for (int d = 0; d < kStateDim; ++d) {
        const double zc = std::clamp(z[d], -1.0, 1.0);
        off[d] = z[d] - zc;
        outside = outside || off[d] != 0.0;
        z[d] = zc;
    }
    const int n = np.basis->size();
    const std::size_t ns = np.coef.size();
    sc.B.resize(n);
    sc.G.resize(static_cast<std::size_t>(n) * kStateDim);
    sc.v.resize(ns);
    sc.w.resize(ns);
    const bool need_g = outside || grad != nullptr;
    if (need_g)
        np.basis->eval_grad(z, sc.B.data(), sc.G.data());
    else
        np.basis->eval(z, sc.B.data());

    for (std::size_t k = 0; k < ns; ++k) {
        const double* ck = np.coef[k];
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += sc.B[j] * ck[j];
        if (outside) {
            for (int d = 0; d < kStateDim; ++d) {
                if (off[d] == 0.0) continue;
                const double* g = &sc.G[static_cast<std::size_t>(d) * n];
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += g[j] * ck[j];
                v += s * off[d];
            }
        }
        sc.v[k] = v;
    }
    const auto& prefs = p.prefs;
    double ce;
    if (np.cfg->solver.separable) {
        ce = 0.0;
        for (std::size_t k = 0; k < ns; ++k) {
            ce += np.prob[k] * sc.v[k];
            sc.w[k] = np.prob[k];
        }
    } else if (ns == 1) {
        ce = sc.v[0];
        sc.w[0] = 1.0;
        if (!(prefs.value_sign() * ce > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    } else {
        ce = certainty_equivalent(sc.v, np.prob, prefs, grad ? std::span<double>(sc.w) : std::span<double>());
        if (std::isnan(ce)) return ce;
    }
    const double obj = r.u + prefs.beta * ce;
    if (!grad) return obj;

    sc.wsum.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < ns; ++k) {
        const double wk = sc.w[k];
        const double* ck = np.coef[k];
        for (int j = 0; j < n; ++j) sc.wsum[j] += wk * ck[j];
    }
    State6 dx{};
    for (int d = 0; d < kStateDim; ++d) {
        const double* g = &sc.G[static_cast<std::size_t>(d) * n];
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += g[j] * sc.wsum[j];
        dx[d] = s;
    }
    if (outside) {
        sc.H.resize(static_cast<std::size_t>(n) * kStateDim);
        for (int d = 0; d < kStateDim; ++d) {
            if (off[d] == 0.0) continue;
            np.basis->eval_mixed(z, d, sc.H.data());
            for (int e = 0; e < kStateDim; ++e) {
                if (off[e] != 0.0) continue;
                const double* h = &sc.H[static_cast<std::size_t>(e) * n];
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += h[j] * sc.wsum[j];
                dx[e] += off[d] * s;
            }
        }
    }
    for (int d = 0; d < kStateDim; ++d) dx[d] *= 2.0 / box.width(d);
    dx[Dim::K] /= r.next[Dim::K] * std::numbers::ln10;
    for (int m = 0; m < 2; ++m) {
        double s = r.du_dc[m];
        for (int d = 0; d < kStateDim; ++d) s += prefs.beta * dx[d] * r.dnext_dc[d][m];
        grad[m] = s;
    }
    return obj;
}

const std::array<Controls, 4> kStandardStarts{{{0.25, 0.5}, {0.1, 0.0}, {0.4, 1.0}, {0.25, 0.1}}};

NodeResult maximize_node(const NodeProblem& np, const std::vector<Controls>& warm, Scratch& sc) {
    const auto& cfg = *np.cfg;
    std::vector<Controls> starts = warm;
    for (const auto& s : kStandardStarts) {
        if (static_cast<int>(starts.size()) >= std::max(1, cfg.solver.starts)) break;
        starts.push_back(s);
    }
    starts.resize(std::min<std::size_t>(starts.size(), std::max(1, cfg.solver.starts)));

    const std::array<double, 2> lo{0.0, 0.0}, hi{cfg.solver.s_max, 1.0};
    opt::Options o;
    o.gtol = cfg.solver.opt_tol;
    o.fscale = 0.0;
    o.max_iterations = cfg.solver.max_iterations;
    auto fg = [&](const std::array<double, 2>& v, std::array<double, 2>& g) {
        double gr[2];
        const double f = node_objective(np, {v[0], v[1]}, gr, nullptr, sc);
        g = {-gr[0], -gr[1]};
        return -f;
    };
    NodeResult best;
    best.value = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& s0 : starts) {
        const auto r = opt::minimize_box<2>(fg, {s0.s, s0.mu}, lo, hi, o);
        best.evaluations += r.evaluations;
        if (!std::isfinite(r.f)) continue;
        const double val = -r.f;
        const double tie = 1e-12 * std::abs(val);
        const bool better = !found || val > best.value + tie ||
                            (std::abs(val - best.value) <= tie && r.x[1] < best.controls.mu);
        if (better) {
            found = true;
            best.value = val;
            best.controls = {r.x[0], r.x[1]};
            best.converged = r.converged;
        }
    }
    if (!found) throw NumericalError("no feasible start for the node maximization");
    node_objective(np, best.controls, nullptr, &best.step, sc);
    best.excursion = np.box_next->excursion(to_coords(best.step.next), &best.excursion_dim);
    return best;
}

std::vector<double> tipping_values(const ModelConfig& cfg) { return damage_lattice(cfg.tipping); }

State6 node_state(const Box6& box, const State6& z) {
    State6 y{};
    for (int d = 0; d < kStateDim; ++d) y[d] = box.lo[d] + 0.5 * (z[d] + 1.0) * box.width(d);
    return from_coords(y);
}

int thread_count(const ModelConfig& cfg) {
    return cfg.solver.workers > 0 ? cfg.solver.workers : omp_get_max_threads();
}

// Runs body(i) for i in [0, n) and rethrows the failure with the smallest index.
template <class Body>
void for_each_index(long n, Kernel kernel, int threads, Body&& body) {
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
    if (kernel == Kernel::Parallel) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
        for (long i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    } else {
        for (long i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace

double bellman_objective(const ModelConfig& cfg, const ProductivityChain& chain, const ChebyshevBasis& basis,
                         const ValueTable& table, int t, const State6& x, int iz, int ic, int iJ,
                         const Controls& c, std::array<double, 2>* grad) {
    const auto np = make_problem(cfg, chain, basis, table, t, x, iz, ic, iJ, tipping_values(cfg));
    Scratch sc;
    double g[2];
    const double v = node_objective(np, c, grad ? g : nullptr, nullptr, sc);
    if (grad) *grad = {g[0], g[1]};
    return v;
}

NodeResult bellman_node(const ModelConfig& cfg, const ProductivityChain& chain, const ChebyshevBasis& basis,
                        const ValueTable& table, int t, const State6& x, int iz, int ic, int iJ,
                        const std::vector<Controls>& starts) {
    const auto np = make_problem(cfg, chain, basis, table, t, x, iz, ic, iJ, tipping_values(cfg));
    Scratch sc;
    return maximize_node(np, starts, sc);
}

double table_value(const ChebyshevBasis& basis, const ValueTable& table, int t, int d, const State6& x,
                   State6* grad) {
    if (table.coeffs[t].empty()) throw NumericalError("value table has no coefficients at this time");
    State6 gy{};
    const double v = eval_surface(basis, table.boxes[t], table.coefficients(t, d), to_coords(x),
                                  grad ? &gy : nullptr);
    if (grad) {
        *grad = gy;
        (*grad)[Dim::K] = gy[Dim::K] / (x[Dim::K] * std::numbers::ln10);
    }
    return v;
}

double table_scc(const ChebyshevBasis& basis, const ValueTable& table, int t, int d, const State6& x) {
    State6 g{};
    table_value(basis, table, t, d, x, &g);
    if (!(g[Dim::K] > 0.0)) throw NumericalError("value function is not increasing in capital");
    return -1000.0 * g[MAT] / g[Dim::K];
}

Envelope::Envelope(int horizon) : lo(static_cast<std::size_t>(horizon) + 1), hi(static_cast<std::size_t>(horizon) + 1) {
    for (auto& v : lo) v.fill(std::numeric_limits<double>::infinity());
    for (auto& v : hi) v.fill(-std::numeric_limits<double>::infinity());
}

void Envelope::add(int t, const State6& x) {
    const State6 y = to_coords(x);
    for (int d = 0; d < kStateDim; ++d) {
        lo[t][d] = std::min(lo[t][d], y[d]);
        hi[t][d] = std::max(hi[t][d], y[d]);
    }
}

Envelope pilot_envelope(const ModelConfig& cfg, const ProductivityChain& chain, const std::vector<double>& mu_path,
                        std::uint64_t seed) {
    const int T = cfg.solver.horizon;
    if (static_cast<int>(mu_path.size()) < T) throw ValidationError("pilot mu path shorter than the horizon");
    const int n_paths = cfg.deterministic() ? 1 : std::max(1, cfg.solver.pilot_paths);
    const auto Jvals = tipping_values(cfg);
    Envelope env(T);
    for (int path = 0; path < n_paths; ++path) {
        State6 x = cfg.initial.x;
        int iz = 0, ic = 0, iJ = 0;
        for (int t = 0; t <= T; ++t) {
            env.add(t, x);
            if (t == T) break;
            const auto r = step(x, chain.zeta_grid[t][iz], Jvals[iJ], period_context(t, cfg.params.exo),
                                {0.25, mu_path[t]}, cfg.params);
            const auto jrow = transition_row(iJ, x[TAT], cfg.tipping);
            const Matrix& Pc = chain.P_chi[t];
            const Matrix& Pz = chain.P_zeta[t][ic];
            const int ic1 = draw_index(&Pc.a[static_cast<std::size_t>(ic) * Pc.cols], Pc.cols, uniform(seed, path, t, Shock::Chi));
            const int iz1 = draw_index(&Pz.a[static_cast<std::size_t>(iz) * Pz.cols], Pz.cols, uniform(seed, path, t, Shock::Zeta));
            std::vector<double> pj;
            for (auto [j, pr] : jrow) pj.push_back(pr);
            iJ = jrow[draw_index(pj.data(), static_cast<int>(pj.size()),
                                 uniform(seed, path, t, Shock::Tipping))].first;
            ic = ic1;
            iz = iz1;
            x = r.next;
        }
    }
    // Envelope paths pinned to the extreme discrete states, which the solver
    // visits at every node but random pilots rarely reach.
    if (!cfg.deterministic()) {
        const int jmax = static_cast<int>(std::max_element(Jvals.begin(), Jvals.end()) - Jvals.begin());
        for (int corner = 0; corner < 4; ++corner) {
            State6 x = cfg.initial.x;
            for (int t = 0; t <= T; ++t) {
                env.add(t, x);
                if (t == T) break;
                const int iz = (corner & 1) ? chain.n_zeta(t) - 1 : 0;
                const int iJ = (corner & 2) ? jmax : 0;
                x = step(x, chain.zeta_grid[t][iz], Jvals[iJ], period_context(t, cfg.params.exo),
                         {0.25, mu_path[t]}, cfg.params)
                        .next;
            }
        }
    }
    return env;
}

std::vector<Box6> boxes_from_envelope(const ModelConfig& cfg, const Envelope& env) {
    const auto& s = cfg.solver;
    const int T = static_cast<int>(env.lo.size()) - 1;
    std::vector<Box6> boxes(T + 1);
    for (int t = 0; t <= T; ++t) {
        for (int d = 0; d < kStateDim; ++d) {
            const double c = 0.5 * (env.lo[t][d] + env.hi[t][d]);
            double half = 0.5 * (env.hi[t][d] - env.lo[t][d]);
            double floor;
            if (d == Dim::K)
                floor = s.floor_logK;
            else if (d == MAT || d == MUO || d == MLO)
                floor = s.floor_M * std::abs(c);
            else
                floor = s.floor_T;
            half = std::max(half, floor) * (1.0 + s.box_margin);
            boxes[t].lo[d] = c - half;
            boxes[t].hi[d] = c + half;
        }
        boxes[t].validate();
    }
    return boxes;
}

std::vector<Box6> build_boxes(const ModelConfig& cfg, const ProductivityChain& chain,
                              const std::vector<double>& mu_path, std::uint64_t seed) {
    return boxes_from_envelope(cfg, pilot_envelope(cfg, chain, mu_path, seed));
}

StepOutput terminal_step(const ModelConfig& cfg, const ProductivityChain& chain, const Fitter& fitter,
                         const ValueTable& table, Kernel kernel) {
    const int T = table.horizon;
    const DiscreteIndex di = table.index[T];
    const int m = fitter.node_count();
    const auto Jvals = tipping_values(cfg);
    const PeriodContext ctx = tail_context(T, cfg.params.exo);
    StepOutput out;
    out.values.assign(di.size(), std::vector<double>(m));
    // Terminal values depend on (zeta, J) only; chi copies share the result.
    const int nzJ = di.n_zeta * di.n_J;
    for_each_index(static_cast<long>(nzJ) * m, kernel, thread_count(cfg), [&](long k) {
        const int node = static_cast<int>(k % m);
        const int q = static_cast<int>(k / m);
        const int iz = q / di.n_J, iJ = q % di.n_J;
        const State6 x = node_state(table.boxes[T], fitter.nodes()[node]);
        const double v = terminal_value(x, chain.zeta_grid[T][iz], Jvals[iJ], ctx, cfg.params, cfg.solver.tail);
        if (!(cfg.params.prefs.value_sign() * v > 0.0))
            throw NumericalError("terminal value has the wrong sign for the chosen psi");
        out.values[di.flat(iz, 0, iJ)][node] = v;
    });
    for (int iz = 0; iz < di.n_zeta; ++iz)
        for (int iJ = 0; iJ < di.n_J; ++iJ)
            for (int ic = 1; ic < di.n_chi; ++ic) out.values[di.flat(iz, ic, iJ)] = out.values[di.flat(iz, 0, iJ)];
    return out;
}

StepOutput maximize_step(const ModelConfig& cfg, const ProductivityChain& chain, const Fitter& fitter,
                         const ValueTable& table, int t, const std::vector<std::vector<Controls>>* warm,
                         Kernel kernel) {
    const DiscreteIndex di = table.index[t];
    const DiscreteIndex dn = table.index[t + 1];
    const int m = fitter.node_count();
    const auto Jvals = tipping_values(cfg);
    StepOutput out;
    out.values.assign(di.size(), std::vector<double>(m));
    out.policy.assign(di.size(), std::vector<Controls>(m));
    std::vector<int> evals(static_cast<std::size_t>(di.size()) * m), conv(evals.size());
    for_each_index(static_cast<long>(di.size()) * m, kernel, thread_count(cfg), [&](long k) {
        const int node = static_cast<int>(k % m);
        const int d = static_cast<int>(k / m);
        int iz, ic, iJ;
        di.split(d, iz, ic, iJ);
        const State6 x = node_state(table.boxes[t], fitter.nodes()[node]);
        std::vector<Controls> starts;
        if (warm && !warm->empty()) {
            int dw = d;
            if (di.n_zeta != dn.n_zeta || di.n_chi != dn.n_chi) dw = dn.flat(dn.n_zeta / 2, dn.n_chi / 2, iJ);
            starts.push_back((*warm)[dw][node]);
        }
        thread_local Scratch sc;
        const auto np = make_problem(cfg, chain, fitter.basis(), table, t, x, iz, ic, iJ, Jvals);
        const NodeResult r = maximize_node(np, starts, sc);
        if (r.excursion > cfg.solver.excursion_tol)
            throw DomainViolation("t=" + std::to_string(t) + " d=" + std::to_string(d) + " node=" +
                                      std::to_string(node) + ": next state leaves the box in " +
                                      dim_name(r.excursion_dim) + " by " + fmt_fraction(r.excursion) +
                                      " of its width (s=" + fmt_fraction(r.controls.s) +
                                      ", mu=" + fmt_fraction(r.controls.mu) + ")",
                                  r.excursion_dim);
        out.values[d][node] = r.value;
        out.policy[d][node] = r.controls;
        evals[k] = r.evaluations;
        conv[k] = r.converged ? 1 : 0;
    });
    for (std::size_t k = 0; k < evals.size(); ++k) {
        out.evaluations += evals[k];
        out.unconverged += conv[k] ? 0 : 1;
    }
    return out;
}

namespace {

double fit_into(const ModelConfig& cfg, const Fitter& fitter, const StepOutput& step, int t, ValueTable& table) {
    const double sgn = cfg.params.prefs.value_sign();
    double worst = 0.0;
    table.coeffs[t].resize(step.values.size());
    for (std::size_t d = 0; d < step.values.size(); ++d) {
        const auto& v = step.values[d];
        for (double x : v)
            if (!(sgn * x > 0.0))
                throw NumericalError("t=" + std::to_string(t) + " d=" + std::to_string(d) +
                                     ": node value has the wrong sign for the chosen psi");
        table.coeffs[t][d] = fitter.fit(v);
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        const double range = std::max(*mx - *mn, 1e-300 + 1e-12 * std::abs(*mx));
        worst = std::max(worst, fitter.max_residual(table.coeffs[t][d], v) / range);
    }
    table.first_solved = t;
    return worst;
}

}  // namespace

SolveResult solve(const ModelConfig& cfg, const ProductivityChain& chain, const std::vector<Box6>& boxes,
                  const std::string& config_hash, const SolveOptions& opts) {
    cfg.validate();
    const int T = cfg.solver.horizon;
    if (static_cast<int>(boxes.size()) != T + 1) throw ValidationError("need one box per year including the horizon");
    if (chain.horizon < T) throw ValidationError("productivity chain shorter than the horizon");
    const ChebyshevBasis basis(cfg.solver.degree);
    const Fitter fitter(basis, cfg.solver.nodes);

    SolveResult res;
    ValueTable& table = res.table;
    std::vector<std::vector<Controls>> warm;
    bool resumed = false;
    if (opts.resume && !opts.checkpoint.empty() && std::filesystem::exists(opts.checkpoint)) {
        table = ValueTable::load(opts.checkpoint);
        if (table.config_hash != config_hash)
            throw ValidationError("checkpoint was written for a different configuration");
        resumed = table.first_solved >= 0;
    }
    if (!resumed) {
        table = ValueTable{};
        table.horizon = T;
        table.degree = cfg.solver.degree;
        table.config_hash = config_hash;
        table.boxes = boxes;
        for (int t = 0; t <= T; ++t) table.index.push_back(discrete_index(chain, cfg.tipping, t));
        table.coeffs.assign(T + 1, {});
    }
    auto save = [&](const std::vector<std::vector<Controls>>& policy) {
        if (opts.checkpoint.empty()) return;
        const std::string tmp = opts.checkpoint + ".tmp";
        table.save(tmp);
        std::ofstream pol(opts.checkpoint + ".policy.tmp", std::ios::binary);
        const std::int64_t nd = static_cast<std::int64_t>(policy.size());
        pol.write(reinterpret_cast<const char*>(&nd), sizeof nd);
        for (const auto& row : policy) {
            const std::int64_t nn = static_cast<std::int64_t>(row.size());
            pol.write(reinterpret_cast<const char*>(&nn), sizeof nn);
            pol.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(nn * sizeof(Controls)));
        }
        pol.close();
        std::filesystem::rename(opts.checkpoint + ".policy.tmp", opts.checkpoint + ".policy");
        std::filesystem::rename(tmp, opts.checkpoint);
    };
    auto report = [&](StepStats st) {
        res.stats.push_back(st);
        if (opts.progress) opts.progress(st);
    };

    int start_t = T - 1;
    if (resumed) {
        start_t = table.first_solved - 1;
        std::ifstream pol(opts.checkpoint + ".policy", std::ios::binary);
        std::int64_t nd = 0;
        if (pol.read(reinterpret_cast<char*>(&nd), sizeof nd)) {
            warm.resize(static_cast<std::size_t>(nd));
            for (auto& row : warm) {
                std::int64_t nn = 0;
                pol.read(reinterpret_cast<char*>(&nn), sizeof nn);
                row.resize(static_cast<std::size_t>(nn));
                pol.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(nn * sizeof(Controls)));
            }
            if (!pol) warm.clear();
        }
    } else {
        const auto t0 = std::chrono::steady_clock::now();
        const StepOutput term = terminal_step(cfg, chain, fitter, table, opts.kernel);
        StepStats st;
        st.t = T;
        st.max_residual = fit_into(cfg, fitter, term, T, table);
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        save({});
        report(st);
    }
    for (int t = start_t; t >= 0; --t) {
        const auto t0 = std::chrono::steady_clock::now();
        StepOutput out = maximize_step(cfg, chain, fitter, table, t, warm.empty() ? nullptr : &warm, opts.kernel);
        StepStats st;
        st.t = t;
        st.max_residual = fit_into(cfg, fitter, out, t, table);
        st.unconverged = out.unconverged;
        st.evaluations = out.evaluations;
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        warm = std::move(out.policy);
        save(warm);
        report(st);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Persistence.

namespace {

constexpr char kMagic[8] = {'D', 'S', 'I', 'C', 'E', 'V', 'T', '1'};
constexpr std::int32_t kVersion = 1;

template <class T>
void put(std::ostream& o, const T& v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& i) {
    T v{};
    if (!i.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ValidationError("value table file is truncated");
    return v;
}

}  // namespace

void ValueTable::save(const std::string& path) const {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw ValidationError("cannot write " + path);
    o.write(kMagic, sizeof kMagic);
    put(o, kVersion);
    put(o, static_cast<std::int32_t>(config_hash.size()));
    o.write(config_hash.data(), static_cast<std::streamsize>(config_hash.size()));
    put(o, static_cast<std::int32_t>(horizon));
    put(o, static_cast<std::int32_t>(degree));
    put(o, static_cast<std::int32_t>(first_solved));
    for (int t = 0; t <= horizon; ++t) {
        for (int d = 0; d < kStateDim; ++d) put(o, boxes[t].lo[d]);
        for (int d = 0; d < kStateDim; ++d) put(o, boxes[t].hi[d]);
        put(o, static_cast<std::int32_t>(index[t].n_zeta));
        put(o, static_cast<std::int32_t>(index[t].n_chi));
        put(o, static_cast<std::int32_t>(index[t].n_J));
        put(o, static_cast<std::int32_t>(coeffs[t].size()));
        for (const auto& c : coeffs[t]) {
            put(o, static_cast<std::int32_t>(c.size()));
            o.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
        }
    }
    if (!o) throw ValidationError("failed writing " + path);
}

ValueTable ValueTable::load(const std::string& path) {
    std::ifstream i(path, std::ios::binary);
    if (!i) throw ValidationError("cannot open " + path);
    char magic[8];
    if (!i.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw ValidationError(path + " is not a value table");
    if (get<std::int32_t>(i) != kVersion) throw ValidationError(path + ": unsupported value table version");
    ValueTable vt;
    const auto hl = get<std::int32_t>(i);
    if (hl < 0 || hl > 1024) throw ValidationError(path + ": corrupt header");
    vt.config_hash.resize(static_cast<std::size_t>(hl));
    i.read(vt.config_hash.data(), hl);
    vt.horizon = get<std::int32_t>(i);
    vt.degree = get<std::int32_t>(i);
    vt.first_solved = get<std::int32_t>(i);
    if (vt.horizon < 1 || vt.horizon > 100000) throw ValidationError(path + ": corrupt header");
    vt.boxes.resize(vt.horizon + 1);
    vt.index.resize(vt.horizon + 1);
    vt.coeffs.resize(vt.horizon + 1);
    for (int t = 0; t <= vt.horizon; ++t) {
        for (int d = 0; d < kStateDim; ++d) vt.boxes[t].lo[d] = get<double>(i);
        for (int d = 0; d < kStateDim; ++d) vt.boxes[t].hi[d] = get<double>(i);
        vt.index[t].n_zeta = get<std::int32_t>(i);
        vt.index[t].n_chi = get<std::int32_t>(i);
        vt.index[t].n_J = get<std::int32_t>(i);
        const auto nd = get<std::int32_t>(i);
        vt.coeffs[t].resize(static_cast<std::size_t>(nd));
        for (auto& c : vt.coeffs[t]) {
            const auto n = get<std::int32_t>(i);
            c.resize(static_cast<std::size_t>(n));
            if (!i.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(n * sizeof(double))))
                throw ValidationError(path + ": truncated coefficients");
        }
    }
    return vt;
}

}  // namespace dsice
