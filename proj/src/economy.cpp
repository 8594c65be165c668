#include "dsice/economy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsice/errors.hpp"

namespace dsice {

void Preferences::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("preferences.beta must lie in (0, 1)");
    if (!(psi > 0.0) || psi == 1.0) throw ValidationError("preferences.psi must be positive and not 1");
    if (!(gamma > 0.0) || gamma == 1.0)
        throw ValidationError("preferences.gamma must be positive and not 1");
}

void EconomyParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("economy.alpha must lie in (0, 1)");
    if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("economy.delta must lie in (0, 1]");
    if (!(pi1 >= 0.0)) throw ValidationError("economy.pi1 must be nonnegative");
    if (!(pi2 >= 0.0)) throw ValidationError("economy.pi2 must be nonnegative");
}

double gross_production(double K, double L, double A_eff, const EconomyParams& p) {
    if (!(K > 0.0 && L > 0.0 && A_eff > 0.0))
        throw DomainError("production inputs must be positive");
    return A_eff * std::pow(K, p.alpha) * std::pow(L, 1.0 - p.alpha);
}

double damage_factor(double T_AT, double J, const EconomyParams& p) {
    return (1.0 - J) / (1.0 + p.pi1 * T_AT + p.pi2 * T_AT * T_AT);
}

double industrial_emissions(double K, double L, double A_eff, double mu, double sigma,
                            const EconomyParams& p) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0, 1]");
    return sigma * (1.0 - mu) * gross_production(K, L, A_eff, p);
}

double total_emissions(double K, double L, double A_eff, double mu, double sigma, double E_land,
                       const EconomyParams& p) {
    return industrial_emissions(K, L, A_eff, mu, sigma, p) + E_land;
}

double mitigation_cost(double mu, double theta1, double theta2, double Y) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0, 1]");
    return theta1 * std::pow(mu, theta2) * Y;
}

double capital_step(double K, double Y, double C, double Psi, double delta) {
    if (!(K > 0.0)) throw DomainError("capital must be positive");
    const double I = Y - C - Psi;
    if (I < 0.0) throw DomainError("negative investment");
    return (1.0 - delta) * K + I;
}

double period_utility(double C, double L, double psi) {
    if (!(C > 0.0 && L > 0.0)) throw DomainError("consumption and population must be positive");
    const double e = 1.0 - 1.0 / psi;
    return std::pow(C / L, e) / e * L;
}

double marginal_utility(double C, double L, double psi) { return std::pow(C / L, -1.0 / psi); }

double certainty_equivalent(std::span<const double> values, std::span<const double> probs,
                            const Preferences& prefs, std::span<double> weights) {
    const double sgn = prefs.value_sign();
    const double a = prefs.ce_exponent();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        const double w = sgn * values[i];
        if (!(w > 0.0) || !std::isfinite(w)) return std::numeric_limits<double>::quiet_NaN();
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    // Scale by the extreme value that dominates the power mean to avoid overflow.
    const double ref = a < 0.0 ? lo : hi;
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (probs[i] > 0.0) s += probs[i] * std::pow(sgn * values[i] / ref, a);
    const double ce = ref * std::pow(s, 1.0 / a);
    if (!weights.empty()) {
        for (std::size_t i = 0; i < values.size(); ++i)
            weights[i] = probs[i] > 0.0 ? probs[i] * std::pow(sgn * values[i] / ce, a - 1.0) : 0.0;
    }
    return sgn * ce;
}

double ez_aggregate(double u_now, std::span<const double> next_values, std::span<const double> probs,
                    const Preferences& prefs) {
    if (next_values.size() != probs.size()) throw DomainError("values and probabilities differ in size");
    const double ce = certainty_equivalent(next_values, probs, prefs);
    if (std::isnan(ce))
        throw DomainError(prefs.psi > 1.0 ? "continuation values must be positive when psi > 1"
                                          : "continuation values must be negative when psi < 1");
    return u_now + prefs.beta * ce;
}

}  // namespace dsice
