#pragma once

#include <utility>
#include <vector>

namespace dsice {

struct TippingParams {
    bool enabled = true;     // false leaves the single pre-tipping state J = 0
    double lambda = 0.0035;  // hazard rate parameter (1/degC/yr)
    double T_floor = 1.0;    // temperature below which the hazard is zero
    double Jbar_inf = 0.05;  // mean long-run damage
    double q = 0.2;          // variance of long-run damage over its squared mean
    double Dbar = 50.0;      // expected post-tipping duration (years)

    void validate() const;
    int n_states() const { return !enabled ? 1 : (q > 0.0 ? 16 : 6); }
    int n_outcomes() const { return q > 0.0 ? 3 : 1; }
};

double survival_prob(double T_AT, const TippingParams& p);
double calibrate_hazard(double P_cum, double deltaT);

// Damage levels: J_0 = 0, then stage-major triples (q > 0) or a 5-step ramp (q = 0).
std::vector<double> damage_lattice(const TippingParams& p);

// Probability of staying in a transient post-tipping stage for one year.
double stage_stay_prob(const TippingParams& p);

// Nonzero entries (next state, probability) of row `i` at temperature T_AT.
// Entries are complementary so each row sums to one.
std::vector<std::pair<int, double>> transition_row(int i, double T_AT, const TippingParams& p);

// Dense row-major transition matrix.
std::vector<double> transition_matrix(double T_AT, const TippingParams& p);

}  // namespace dsice
