#include "dsice/climate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsice/errors.hpp"
#include "dsice/optimize.hpp"

namespace dsice {

void ClimateParams::derive() {
    phi21 = phi12 * Mtilde_AT / Mtilde_UO;
    phi32 = phi23 * Mtilde_UO / Mtilde_LO;
    xi2 = xi1 * eta / xi3;
}

void ClimateParams::validate() const {
    auto rate = [](double v, const char* name) {
        if (!(v >= 0.0 && v < 1.0))
            throw ValidationError(std::string("climate.") + name + " must lie in [0, 1)");
    };
    rate(phi12, "phi12");
    rate(phi21, "phi21");
    rate(phi23, "phi23");
    rate(phi32, "phi32");
    rate(xi1, "xi1");
    rate(xi2, "xi2");
    rate(varphi12, "varphi12");
    rate(varphi21, "varphi21");
    if (!(phi21 + phi23 < 1.0)) throw ValidationError("climate: phi21 + phi23 must be below 1");
    if (!(varphi21 + xi2 < 1.0)) throw ValidationError("climate: varphi21 + xi2 must be below 1");
    if (!(eta > 0.0 && MAT_star > 0.0 && xi3 > 0.0))
        throw ValidationError("climate: eta, MAT_star and xi3 must be positive");
    if (!(Mtilde_AT > 0.0 && Mtilde_UO > 0.0 && Mtilde_LO > 0.0))
        throw ValidationError("climate: equilibrium masses must be positive");
}

std::array<double, 9> ClimateParams::carbon_matrix() const {
    return {1.0 - phi12, phi21,                 0.0,
            phi12,       1.0 - phi21 - phi23,   phi32,
            0.0,         phi23,                 1.0 - phi32};
}

std::array<double, 4> ClimateParams::temperature_matrix() const {
    return {1.0 - varphi21 - xi2, varphi21,
            varphi12,             1.0 - varphi12};
}

CarbonState carbon_step(const CarbonState& M, double emissions, const ClimateParams& p) {
    if (!(emissions >= 0.0)) throw DomainError("emissions must be nonnegative");
    const auto P = p.carbon_matrix();
    CarbonState n;
    n.M_AT = P[0] * M.M_AT + P[1] * M.M_UO + emissions;
    n.M_UO = P[3] * M.M_AT + P[4] * M.M_UO + P[5] * M.M_LO;
    n.M_LO = P[7] * M.M_UO + P[8] * M.M_LO;
    return n;
}

double forcing_with_exogenous(double M_AT, double F_ex, const ClimateParams& p) {
    if (!(M_AT > 0.0)) throw DomainError("M_AT must be positive");
    return p.eta * std::log2(M_AT / p.MAT_star) + F_ex;
}

double forcing(double M_AT, int t, const ClimateParams& p) {
    return forcing_with_exogenous(M_AT, external_forcing(t), p);
}

TemperatureState temperature_step(const TemperatureState& T, double F, const ClimateParams& p) {
    const auto P = p.temperature_matrix();
    return {P[0] * T.T_AT + P[1] * T.T_OC + p.xi1 * F, P[2] * T.T_AT + P[3] * T.T_OC};
}

std::vector<double> interpolate_annual(const std::vector<std::pair<double, double>>& points,
                                       int last_year) {
    if (points.size() < 2 && last_year > 0)
        throw ValidationError("emissions series needs at least two points");
    if (points.empty() || points.front().first != 0.0 || points.back().first < last_year)
        throw ValidationError("emissions series must start at t = 0 and cover the horizon");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw ValidationError("emissions times must be strictly increasing");
    std::vector<double> out(static_cast<std::size_t>(last_year) + 1);
    std::size_t k = 0;
    for (int t = 0; t <= last_year; ++t) {
        while (k + 1 < points.size() && points[k + 1].first <= t) ++k;
        if (k + 1 == points.size()) {
            out[t] = points[k].second;
            continue;
        }
        const auto& [t0, e0] = points[k];
        const auto& [t1, e1] = points[k + 1];
        out[t] = e0 + (e1 - e0) * (t - t0) / (t1 - t0);
    }
    return out;
}

ClimateParams with_free(const ClimateParams& base, const FreeClimateParams& free) {
    ClimateParams p = base;
    p.phi12 = free.phi12;
    p.phi23 = free.phi23;
    p.xi1 = free.xi1;
    p.varphi12 = free.varphi12;
    p.varphi21 = free.varphi21;
    p.derive();
    return p;
}

DecadalTargets generate_targets(const ClimateParams& p, const std::vector<double>& annual_emissions,
                                const CarbonState& M0, const TemperatureState& T0, int last_year,
                                int stride) {
    if (static_cast<int>(annual_emissions.size()) < last_year)
        throw ValidationError("emissions series shorter than the horizon");
    DecadalTargets out;
    CarbonState M = M0;
    TemperatureState T = T0;
    for (int t = 0; t <= last_year; ++t) {
        if (t % stride == 0) {
            out.t.push_back(t);
            out.M.push_back(M);
            out.T.push_back(T);
        }
        if (t == last_year) break;
        const double F = forcing(M.M_AT, t, p);
        T = temperature_step(T, F, p);
        M = carbon_step(M, annual_emissions[t], p);
    }
    return out;
}

double calibration_objective(const FreeClimateParams& free, const ClimateParams& base,
                             const DecadalTargets& targets,
                             const std::vector<double>& annual_emissions, const CarbonState& M0,
                             const TemperatureState& T0) {
    const ClimateParams p = with_free(base, free);
    const int last = targets.t.empty() ? 0 : targets.t.back();
    CarbonState M = M0;
    TemperatureState T = T0;
    double obj = 0.0;
    std::size_t k = 0;
    auto sq = [](double a, double b) {
        const double r = (a - b) / b;
        return r * r;
    };
    for (int t = 0; t <= last; ++t) {
        while (k < targets.t.size() && targets.t[k] < t) ++k;
        if (k < targets.t.size() && targets.t[k] == t && t > 0) {
            obj += sq(M.M_AT, targets.M[k].M_AT) + sq(M.M_UO, targets.M[k].M_UO) +
                   sq(M.M_LO, targets.M[k].M_LO) + sq(T.T_AT, targets.T[k].T_AT) +
                   sq(T.T_OC, targets.T[k].T_OC);
        }
        if (t == last) break;
        if (!(M.M_AT > 0.0)) return INFINITY;
        const double F = forcing(M.M_AT, t, p);
        T = temperature_step(T, F, p);
        M = carbon_step(M, annual_emissions[t], p);
    }
    return obj;
}

CalibrationResult calibrate_climate(const DecadalTargets& targets,
                                    const std::vector<double>& annual_emissions,
                                    const CarbonState& M0, const TemperatureState& T0,
                                    const ClimateParams& base, const CalibrationOptions& options) {
    if (targets.t.empty() || targets.t.size() != targets.M.size() ||
        targets.t.size() != targets.T.size())
        throw ValidationError("decadal targets are empty or ragged");
    for (std::size_t i = 0; i < targets.t.size(); ++i) {
        if (targets.t[i] == 0) continue;
        const auto& M = targets.M[i];
        const auto& T = targets.T[i];
        if (!(M.M_AT > 0 && M.M_UO > 0 && M.M_LO > 0 && T.T_AT > 0 && T.T_OC > 0))
            throw ValidationError("decadal targets must be strictly positive");
    }
    if (static_cast<int>(annual_emissions.size()) < targets.t.back())
        throw ValidationError("emissions series shorter than the target horizon");
    for (double e : annual_emissions)
        if (!(e >= 0.0)) throw ValidationError("emissions must be nonnegative");

    // Search in log space keeps every rate positive.
    auto unpack = [](std::span<const double> z) {
        return FreeClimateParams{std::exp(z[0]), std::exp(z[1]), std::exp(z[2]), std::exp(z[3]),
                                 std::exp(z[4])};
    };
    auto objective = [&](std::span<const double> z) {
        const FreeClimateParams f = unpack(z);
        const ClimateParams p = with_free(base, f);
        if (p.phi21 + p.phi23 >= 1.0 || p.varphi21 + p.xi2 >= 1.0 || p.phi12 >= 1.0 ||
            p.varphi12 >= 1.0 || p.phi32 >= 1.0)
            return static_cast<double>(INFINITY);
        return calibration_objective(f, base, targets, annual_emissions, M0, T0);
    };

    std::vector<FreeClimateParams> starts{options.start};
    starts.insert(starts.end(), options.extra_starts.begin(), options.extra_starts.end());

    CalibrationResult best;
    best.objective = INFINITY;
    for (const auto& s : starts) {
        std::vector<double> z0{std::log(s.phi12), std::log(s.phi23), std::log(s.xi1),
                               std::log(s.varphi12), std::log(s.varphi21)};
        opt::NelderMeadOptions nm;
        nm.max_evaluations = options.max_evaluations;
        nm.restarts = options.restarts;
        nm.ftol = 1e-24;
        nm.xtol = 1e-10;
        const auto r = opt::nelder_mead(objective, z0, std::vector<double>(5, 0.2), nm);
        best.evaluations += r.evaluations;
        if (r.f < best.objective) {
            best.objective = r.f;
            best.params = with_free(base, unpack(r.x));
            best.converged = r.converged;
        }
    }
    if (!std::isfinite(best.objective))
        throw NumericalError("climate calibration found no feasible parameters");
    if (!best.converged)
        throw CalibrationError("climate calibration did not converge within the evaluation budget", best);
    return best;
}

}  // namespace dsice
