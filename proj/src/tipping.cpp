#include "dsice/tipping.hpp"

#include <algorithm>
#include <cmath>

#include "dsice/errors.hpp"

namespace dsice {

void TippingParams::validate() const {
    if (!(lambda >= 0.0)) throw ValidationError("tipping.lambda must be nonnegative");
    if (!(Jbar_inf >= 0.0 && Jbar_inf < 1.0)) throw ValidationError("tipping.Jbar_inf must lie in [0, 1)");
    if (!(q >= 0.0)) throw ValidationError("tipping.q must be nonnegative");
    if (1.5 * q > 1.0) throw ValidationError("tipping.q too large: damage levels would be negative");
    if (!(Dbar > 0.0)) throw ValidationError("tipping.Dbar must be positive");
    if (Jbar_inf * (1.0 + std::sqrt(1.5 * q)) >= 1.0)
        throw ValidationError("tipping: largest damage level must stay below 1");
}

double survival_prob(double T_AT, const TippingParams& p) {
    return std::exp(-p.lambda * std::max(0.0, T_AT - p.T_floor));
}

double calibrate_hazard(double P_cum, double deltaT) {
    if (!(P_cum > 0.0 && P_cum < 1.0)) throw DomainError("cumulative probability must lie in (0, 1)");
    if (!(deltaT > 0.0)) throw DomainError("temperature increase must be positive");
    return -std::log1p(-P_cum) / (50.0 * deltaT);
}

std::vector<double> damage_lattice(const TippingParams& p) {
    std::vector<double> v{0.0};
    if (!p.enabled) return v;
    if (p.q > 0.0) {
        const double spread = std::sqrt(1.5 * p.q);
        for (int i = 1; i <= 5; ++i)
            for (int j = 1; j <= 3; ++j) v.push_back(i / 5.0 * (1.0 + (j - 2) * spread) * p.Jbar_inf);
    } else {
        for (int i = 1; i <= 5; ++i) v.push_back(p.Jbar_inf * i / 5.0);
    }
    return v;
}

double stage_stay_prob(const TippingParams& p) { return std::exp(-4.0 / p.Dbar); }

std::vector<std::pair<int, double>> transition_row(int i, double T_AT, const TippingParams& p) {
    const int n = p.n_states();
    if (i < 0 || i >= n) throw DomainError("tipping state index out of range");
    if (n == 1) return {{0, 1.0}};
    const int width = p.n_outcomes();
    if (i == 0) {
        const double stay = survival_prob(T_AT, p);
        if (stay == 1.0) return {{0, 1.0}};
        std::vector<std::pair<int, double>> row{{0, stay}};
        for (int j = 1; j <= width; ++j) row.emplace_back(j, (1.0 - stay) / width);
        return row;
    }
    if (i > n - 1 - width) return {{i, 1.0}};
    const double stay = stage_stay_prob(p);
    return {{i, stay}, {i + width, 1.0 - stay}};
}

std::vector<double> transition_matrix(double T_AT, const TippingParams& p) {
    const int n = p.n_states();
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (auto [j, pr] : transition_row(i, T_AT, p)) m[static_cast<std::size_t>(i) * n + j] = pr;
    return m;
}

}  // namespace dsice
