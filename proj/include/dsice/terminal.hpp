#pragma once

#include "dsice/dynamics.hpp"

namespace dsice {

struct TailSpec {
    int years = 200;                    // deterministic rollout length
    double consumption_ratio = 0.78;    // C / Y during the rollout
};

// Exogenous quantities held fixed after the horizon: those of the last year,
// with land emissions switched off.
PeriodContext tail_context(int horizon, const ExogenousParams& exo);

// Savings share that yields C = ratio * Y at mu = 1.
double tail_savings(const PeriodContext& ctx, const TailSpec& tail);

// Transformed terminal value of state x: discounted utility over the rollout
// with mu = 1 and a fixed consumption-output ratio, closed by a constant
// continuation at the final year's utility. Writes dV/dx when grad != nullptr.
double terminal_value(const State6& x, double zeta, double J, const PeriodContext& ctx,
                      const ModelParams& p, const TailSpec& tail, State6* grad = nullptr);

}  // namespace dsice
