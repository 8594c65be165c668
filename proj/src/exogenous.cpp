#include "dsice/exogenous.hpp"

#include <cmath>
#include <string>

#include "dsice/errors.hpp"

namespace dsice {

void ExogenousParams::validate() const {
    if (!(A0 > 0.0)) throw ValidationError("exogenous.A0 must be positive");
    if (!(alpha1 >= 0.0)) throw ValidationError("exogenous.alpha1 must be nonnegative");
    if (!(alpha2 >= 0.0)) throw ValidationError("exogenous.alpha2 must be nonnegative");
    if (!(sigma0 > 0.0)) throw ValidationError("exogenous.sigma0 must be positive");
    if (!(theta2 > 1.0)) throw ValidationError("exogenous.theta2 must exceed 1");
}

double population(int t) {
    const double decay = std::exp(-0.035 * t);
    return 6514.0 * decay + 8600.0 * (1.0 - decay);
}

double productivity_trend(int t, const ExogenousParams& p) {
    if (p.alpha2 == 0.0) return p.A0 * std::exp(p.alpha1 * t);
    return p.A0 * std::exp(p.alpha1 * -std::expm1(-p.alpha2 * t) / p.alpha2);
}

double carbon_intensity(int t, const ExogenousParams& p) {
    return p.sigma0 * std::exp(-0.0073 * -std::expm1(-0.003 * t) / 0.003);
}

double mitigation_coeff(int t, const ExogenousParams& p) {
    return 1.17 * carbon_intensity(t, p) * (1.0 + std::exp(-0.005 * t)) / (2.0 * p.theta2);
}

double land_emissions(int t) { return 1.1 * std::exp(-0.01 * t); }

double external_forcing(int t) {
    if (t <= 100) return -0.06 + 0.0036 * t;
    return 0.3;
}

PeriodContext period_context(int t, const ExogenousParams& p) {
    if (t < 0) throw DomainError("year index must be nonnegative, got " + std::to_string(t));
    PeriodContext c;
    c.L = population(t);
    c.A = productivity_trend(t, p);
    c.sigma = carbon_intensity(t, p);
    c.theta1 = mitigation_coeff(t, p);
    c.E_land = land_emissions(t);
    c.F_ex = external_forcing(t);
    return c;
}

}  // namespace dsice
