#include "dsice/terminal.hpp"

#include <cmath>
#include <vector>

#include "dsice/errors.hpp"

namespace dsice {

PeriodContext tail_context(int horizon, const ExogenousParams& exo) {
    PeriodContext ctx = period_context(horizon, exo);
    ctx.E_land = 0.0;
    return ctx;
}

double tail_savings(const PeriodContext& ctx, const TailSpec& tail) {
    const double s = 1.0 - tail.consumption_ratio / (1.0 - ctx.theta1);
    if (!(s >= 0.0 && s < 1.0))
        throw NumericalError("terminal consumption ratio leaves no feasible savings share");
    return s;
}

double terminal_value(const State6& x, double zeta, double J, const PeriodContext& ctx,
                      const ModelParams& p, const TailSpec& tail, State6* grad) {
    const double beta = p.prefs.beta;
    const Controls c{tail_savings(ctx, tail), 1.0};
    const int n = tail.years;
    const bool want = grad != nullptr;
    std::vector<StepResult> steps;
    if (want) steps.reserve(static_cast<std::size_t>(n) + 1);

    State6 s = x;
    double value = 0.0, disc = 1.0;
    for (int k = 0; k <= n; ++k) {
        StepResult r = step(s, zeta, J, ctx, c, p, want);
        const double w = (k == n) ? disc / (1.0 - beta) : disc;
        value += w * r.u;
        s = r.next;
        disc *= beta;
        if (want) steps.push_back(r);
    }
    if (!std::isfinite(value)) throw NumericalError("terminal value is not finite");
    if (!want) return value;

    // Adjoint sweep: lambda_k = w_k du_k/dx + D_k^T lambda_{k+1}.
    State6 lam{};
    disc = std::pow(beta, n);
    for (int k = n; k >= 0; --k) {
        const auto& r = steps[static_cast<std::size_t>(k)];
        const double w = (k == n) ? disc / (1.0 - beta) : disc;
        State6 nl{};
        for (int i = 0; i < kStateDim; ++i) {
            double v = w * r.du_dx[i];
            if (k < n)
                for (int j = 0; j < kStateDim; ++j) v += r.dnext_dx[j][i] * lam[j];
            nl[i] = v;
        }
        lam = nl;
        disc /= beta;
    }
    *grad = lam;
    return value;
}

}  // namespace dsice
