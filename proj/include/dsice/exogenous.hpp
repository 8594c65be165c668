#pragma once

// Deterministic exogenous paths of the annual model. Time is an integer year
// index with t = 0 corresponding to 2005.

namespace dsice {

struct ExogenousParams {
    double A0 = 0.0272;       // initial productivity level
    double alpha1 = 0.0092;   // initial productivity growth rate (1/yr)
    double alpha2 = 0.001;    // decline rate of productivity growth (1/yr)
    double sigma0 = 0.13418;  // initial carbon intensity (GtC per $T)
    double theta2 = 2.8;      // mitigation cost exponent

    void validate() const;
};

// World population in millions.
double population(int t);

// Deterministic productivity trend A_t. alpha2 == 0 takes the constant-growth limit.
double productivity_trend(int t, const ExogenousParams& p);

double carbon_intensity(int t, const ExogenousParams& p);
double mitigation_coeff(int t, const ExogenousParams& p);
double land_emissions(int t);
double external_forcing(int t);

// Bundle of every exogenous quantity the one-period dynamics need. The terminal
// rollout holds one of these fixed instead of advancing t.
struct PeriodContext {
    double L = 0.0;
    double A = 0.0;
    double sigma = 0.0;
    double theta1 = 0.0;
    double E_land = 0.0;
    double F_ex = 0.0;
};

PeriodContext period_context(int t, const ExogenousParams& p);

}  // namespace dsice
