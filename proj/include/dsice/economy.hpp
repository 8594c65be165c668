#pragma once

#include <span>

namespace dsice {

struct Preferences {
    double beta = 0.985;
    double psi = 1.5;    // intertemporal elasticity of substitution
    double gamma = 10.0; // risk aversion

    void validate() const;

    // Exponent (1 - gamma) / (1 - 1/psi) of the certainty-equivalent power mean.
    double ce_exponent() const { return (1.0 - gamma) / (1.0 - 1.0 / psi); }
    // +1 when values are positive (psi > 1), -1 when negative (psi < 1).
    double value_sign() const { return psi > 1.0 ? 1.0 : -1.0; }
};

struct EconomyParams {
    double alpha = 0.3;
    double delta = 0.1;
    double pi1 = 0.0;
    double pi2 = 0.0028388;

    void validate() const;
};

double gross_production(double K, double L, double A_eff, const EconomyParams& p);
double damage_factor(double T_AT, double J, const EconomyParams& p);
double industrial_emissions(double K, double L, double A_eff, double mu, double sigma,
                            const EconomyParams& p);
double total_emissions(double K, double L, double A_eff, double mu, double sigma, double E_land,
                       const EconomyParams& p);
double mitigation_cost(double mu, double theta1, double theta2, double Y);
// Throws DomainError when investment Y_net - C - Psi is negative or K is not positive.
double capital_step(double K, double Y, double C, double Psi, double delta);

double period_utility(double C, double L, double psi);
// du/dC = (C/L)^(-1/psi).
double marginal_utility(double C, double L, double psi);

// Certainty-equivalent aggregate of next-period transformed values:
// u_now + beta * CE for psi > 1 and u_now - beta * CE(-v) for psi < 1.
double ez_aggregate(double u_now, std::span<const double> next_values, std::span<const double> probs,
                    const Preferences& prefs);

// Certainty equivalent in value units (same sign as the values) and, when
// `weights` is non-empty, dCE/dv_i. Returns NaN if any value has the wrong sign.
double certainty_equivalent(std::span<const double> values, std::span<const double> probs,
                            const Preferences& prefs, std::span<double> weights = {});

}  // namespace dsice
