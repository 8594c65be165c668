#include "dsice/verify.hpp"

#include <algorithm>
#include <cmath>

#include "dsice/errors.hpp"
#include "dsice/optimize.hpp"

namespace dsice {

namespace {

struct Forward {
    std::vector<StepResult> steps;
    std::vector<State6> x;
    double terminal = 0.0;
    State6 terminal_grad{};
    double objective = 0.0;
};

Forward run_forward(const State6& x0, const std::vector<Controls>& c, const ModelParams& p,
                    const TrajectoryOptions& o, bool jacobian) {
    Forward fw;
    const int T = static_cast<int>(c.size());
    fw.steps.reserve(c.size());
    fw.x.reserve(c.size() + 1);
    fw.x.push_back(x0);
    double disc = 1.0;
    for (int t = 0; t < T; ++t) {
        const PeriodContext ctx = period_context(t, p.exo);
        StepResult r = step(fw.x.back(), 1.0, 0.0, ctx, c[t], p, jacobian);
        fw.objective += disc * r.u;
        disc *= p.prefs.beta;
        fw.x.push_back(r.next);
        fw.steps.push_back(r);
    }
    const PeriodContext tctx = tail_context(T, p.exo);
    fw.terminal = terminal_value(fw.x.back(), 1.0, 0.0, tctx, p, o.tail,
                                 jacobian ? &fw.terminal_grad : nullptr);
    fw.objective += disc * fw.terminal;
    return fw;
}

// Costates lambda_t = dW/dx_t for t = 0..T, with W discounted to t = 0.
std::vector<State6> costates(const Forward& fw, const ModelParams& p, std::vector<double>* grad) {
    const int T = static_cast<int>(fw.steps.size());
    std::vector<State6> lam(static_cast<std::size_t>(T) + 1);
    double disc = std::pow(p.prefs.beta, T);
    for (int i = 0; i < kStateDim; ++i) lam[T][i] = disc * fw.terminal_grad[i];
    for (int t = T - 1; t >= 0; --t) {
        disc /= p.prefs.beta;
        const auto& r = fw.steps[t];
        const State6& ln = lam[t + 1];
        for (int i = 0; i < kStateDim; ++i) {
            double v = disc * r.du_dx[i];
            for (int j = 0; j < kStateDim; ++j) v += r.dnext_dx[j][i] * ln[j];
            lam[t][i] = v;
        }
        if (grad) {
            for (int k = 0; k < 2; ++k) {
                double v = disc * r.du_dc[k];
                for (int j = 0; j < kStateDim; ++j) v += r.dnext_dc[j][k] * ln[j];
                (*grad)[2 * t + k] = v;
            }
        }
    }
    return lam;
}

}  // namespace

double trajectory_objective(const State6& x0, const std::vector<Controls>& c, const ModelParams& p,
                            const TrajectoryOptions& o, std::vector<double>* grad, State6* lambda0) {
    const bool need = grad != nullptr || lambda0 != nullptr;
    Forward fw = run_forward(x0, c, p, o, need);
    if (!need) return fw.objective;
    if (grad) grad->assign(2 * c.size(), 0.0);
    const auto lam = costates(fw, p, grad);
    if (lambda0) *lambda0 = lam[0];
    return fw.objective;
}

Trajectory evaluate_trajectory(const State6& x0, const std::vector<Controls>& c, const ModelParams& p,
                               const TrajectoryOptions& o) {
    Forward fw = run_forward(x0, c, p, o, true);
    const auto lam = costates(fw, p, nullptr);
    Trajectory tr;
    tr.x = fw.x;
    tr.c = c;
    tr.objective = fw.objective;
    for (std::size_t t = 0; t < c.size(); ++t) {
        const auto& r = fw.steps[t];
        tr.C.push_back(r.C);
        tr.Y.push_back(r.Y);
        tr.Psi.push_back(r.Psi);
        tr.I.push_back(r.I);
        tr.E.push_back(r.E);
        tr.scc.push_back(-1000.0 * lam[t][MAT] / lam[t][Dim::K]);
    }
    return tr;
}

TrajectorySolution solve_deterministic(const State6& x0, const ModelParams& p,
                                       const TrajectoryOptions& o, const std::vector<Controls>* warm) {
    const int T = o.horizon;
    if (T < 1) throw ValidationError("trajectory horizon must be positive");
    std::vector<double> z(2 * static_cast<std::size_t>(T)), lo(z.size()), hi(z.size());
    for (int t = 0; t < T; ++t) {
        Controls c0{0.25, std::min(1.0, 0.2 + 0.8 * t / std::max(1.0, 0.8 * T))};
        if (warm && static_cast<int>(warm->size()) > t) c0 = (*warm)[t];
        z[2 * t] = std::clamp(c0.s, 0.0, o.s_max);
        z[2 * t + 1] = std::clamp(c0.mu, 0.0, 1.0);
        lo[2 * t] = 0.0;
        hi[2 * t] = o.s_max;
        lo[2 * t + 1] = 0.0;
        hi[2 * t + 1] = 1.0;
    }
    std::vector<Controls> c(static_cast<std::size_t>(T));
    std::vector<double> g;
    auto fg = [&](std::span<const double> v, std::span<double> out) {
        for (int t = 0; t < T; ++t) c[t] = {v[2 * t], v[2 * t + 1]};
        double W;
        try {
            W = trajectory_objective(x0, c, p, o, &g);
        } catch (const DomainError&) {
            return static_cast<double>(INFINITY);
        }
        for (std::size_t i = 0; i < g.size(); ++i) out[i] = -g[i];
        return -W;
    };
    opt::LbfgsOptions lo_opts;
    lo_opts.gtol = o.gtol;
    lo_opts.max_iterations = o.max_iterations;
    lo_opts.memory = 20;
    const auto r = opt::minimize_lbfgs_box(fg, z, lo, hi, lo_opts);

    TrajectorySolution sol;
    for (int t = 0; t < T; ++t) c[t] = {r.x[2 * t], r.x[2 * t + 1]};
    sol.path = evaluate_trajectory(x0, c, p, o);
    sol.iterations = r.iterations;
    sol.evaluations = r.evaluations;
    sol.projected_gradient = r.projected_gradient / (std::abs(r.f) + 1.0);
    sol.converged = r.converged;
    sol.message = r.message;
    return sol;
}

double scc_finite_difference(const State6& x0, const ModelParams& p, const TrajectoryOptions& o,
                             const std::vector<Controls>& warm, double rel_step) {
    auto value_at = [&](int dim, double h) {
        State6 x = x0;
        x[dim] += h;
        return solve_deterministic(x, p, o, &warm).path.objective;
    };
    const double hM = rel_step * x0[MAT];
    const double hK = rel_step * x0[Dim::K];
    const double dM = (value_at(MAT, hM) - value_at(MAT, -hM)) / (2.0 * hM);
    const double dK = (value_at(Dim::K, hK) - value_at(Dim::K, -hK)) / (2.0 * hK);
    return -1000.0 * dM / dK;
}

std::vector<ErrorRow> compare(const Trajectory& dp, const Trajectory& oracle, int window) {
    const int n = std::min<int>({window, static_cast<int>(dp.c.size()), static_cast<int>(oracle.c.size())});
    auto l1 = [n](auto get) {
        double num = 0.0, den = 0.0;
        for (int t = 0; t < n; ++t) {
            const double a = get(0, t), b = get(1, t);
            num += std::abs(a - b);
            den += std::abs(b);
        }
        return den > 0.0 ? num / den : (num > 0.0 ? INFINITY : 0.0);
    };
    auto rel0 = [](double a, double b) {
        return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b);
    };
    const Trajectory* tr[2] = {&dp, &oracle};
    std::vector<ErrorRow> rows;
    rows.push_back({"K", l1([&](int w, int t) { return tr[w]->x[t][Dim::K]; }), 0.0, false});
    rows.push_back({"M_AT", l1([&](int w, int t) { return tr[w]->x[t][MAT]; }), 0.0, false});
    rows.push_back({"T_AT", l1([&](int w, int t) { return tr[w]->x[t][TAT]; }), 0.0, false});
    rows.push_back({"C", l1([&](int w, int t) { return tr[w]->C[t]; }), rel0(dp.C[0], oracle.C[0]), true});
    rows.push_back({"mu", l1([&](int w, int t) { return tr[w]->c[t].mu; }),
                    rel0(dp.c[0].mu, oracle.c[0].mu), true});
    rows.push_back({"SCC", l1([&](int w, int t) { return tr[w]->scc[t]; }),
                    rel0(dp.scc[0], oracle.scc[0]), true});
    return rows;
}

}  // namespace dsice
