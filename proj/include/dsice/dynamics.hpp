#pragma once

#include <array>

#include "dsice/climate.hpp"
#include "dsice/economy.hpp"
#include "dsice/exogenous.hpp"

namespace dsice {

// Continuous state (K, M_AT, M_UO, M_LO, T_AT, T_OC).
enum Dim : int { K = 0, MAT = 1, MUO = 2, MLO = 3, TAT = 4, TOC = 5 };
constexpr int kStateDim = 6;
using State6 = std::array<double, kStateDim>;

const char* dim_name(int d);

struct ModelParams {
    ExogenousParams exo;
    EconomyParams econ;
    ClimateParams climate;
    Preferences prefs;
};

// Controls: savings share s of output net of abatement, and emission control rate mu.
struct Controls {
    double s = 0.25;
    double mu = 0.0;
};

struct StepResult {
    State6 next{};
    double f = 0.0;    // gross production before damages
    double Y = 0.0;    // output after damages
    double Psi = 0.0;  // abatement expenditure
    double C = 0.0;
    double I = 0.0;
    double E = 0.0;    // total emissions
    double u = 0.0;    // period utility

    // Filled only when requested.
    std::array<std::array<double, kStateDim>, kStateDim> dnext_dx{};  // [row=next dim][col=x dim]
    std::array<std::array<double, 2>, kStateDim> dnext_dc{};         // [next dim][s, mu]
    std::array<double, kStateDim> du_dx{};
    std::array<double, 2> du_dc{};
};

// One annual transition of the continuous state given the current discrete
// productivity multiplier zeta and tipping damage J.
StepResult step(const State6& x, double zeta, double J, const PeriodContext& ctx, const Controls& c,
                const ModelParams& p, bool jacobian = false);

// Carbon tax implementing mitigation rate mu, in $/tC.
double carbon_tax(double mu, double theta1, double theta2, double sigma);

}  // namespace dsice
