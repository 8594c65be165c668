#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dsice/errors.hpp"
#include "dsice/exogenous.hpp"

namespace dsice {

// Annual-step carbon cycle and two-layer temperature model.
//
// phi21, phi32 and xi2 are tied to the free parameters through the
// preindustrial-equilibrium and climate-sensitivity identities; call derive()
// after changing phi12, phi23 or xi1.
struct ClimateParams {
    double phi12 = 0.019;
    double phi23 = 0.0054;
    double phi21 = 0.0;
    double phi32 = 0.0;
    double xi1 = 0.037;
    double xi2 = 0.0;
    double varphi12 = 0.01;   // heat diffusion, atmosphere to ocean
    double varphi21 = 0.0048; // heat diffusion, ocean to atmosphere
    double eta = 3.8;
    double MAT_star = 596.4;
    double xi3 = 3.0;
    double Mtilde_AT = 587.5;
    double Mtilde_UO = 1144.0;
    double Mtilde_LO = 18340.0;

    ClimateParams() { derive(); }

    void derive();
    void validate() const;

    // Column-stochastic carbon transition matrix, row-major.
    std::array<double, 9> carbon_matrix() const;
    // Temperature transition matrix, row-major.
    std::array<double, 4> temperature_matrix() const;
};

struct CarbonState {
    double M_AT = 808.9;
    double M_UO = 1255.0;
    double M_LO = 18365.0;

    double total() const { return M_AT + M_UO + M_LO; }
};

struct TemperatureState {
    double T_AT = 0.7307;
    double T_OC = 0.0068;
};

CarbonState carbon_step(const CarbonState& M, double emissions, const ClimateParams& p);

// Total radiative forcing in W/m^2.
double forcing(double M_AT, int t, const ClimateParams& p);
double forcing_with_exogenous(double M_AT, double F_ex, const ClimateParams& p);

TemperatureState temperature_step(const TemperatureState& T, double F, const ClimateParams& p);

// ---------------------------------------------------------------------------
// Calibration of the five free annual parameters against decadal targets.

struct DecadalTargets {
    std::vector<int> t;  // 0, 10, ..., 500
    std::vector<CarbonState> M;
    std::vector<TemperatureState> T;
};

struct FreeClimateParams {
    double phi12 = 0.019;
    double phi23 = 0.0054;
    double xi1 = 0.037;
    double varphi12 = 0.01;
    double varphi21 = 0.0048;
};

struct CalibrationOptions {
    FreeClimateParams start{};
    int max_evaluations = 200000;
    int restarts = 8;
    // Extra starting points; each is refined and the best result kept.
    std::vector<FreeClimateParams> extra_starts;
};

struct CalibrationResult {
    ClimateParams params;
    double objective = 0.0;
    int evaluations = 0;
    bool converged = false;
};

class CalibrationError : public NumericalError {
public:
    CalibrationError(const std::string& what, CalibrationResult best)
        : NumericalError(what), best_(std::move(best)) {}
    const CalibrationResult& best() const noexcept { return best_; }

private:
    CalibrationResult best_;
};

// Builds an annual emissions path on 0..last_year by linear interpolation of
// (t, E) points. Points must be sorted, start at t = 0 and reach last_year.
std::vector<double> interpolate_annual(const std::vector<std::pair<double, double>>& points,
                                       int last_year);

// Relative least-squares misfit between annual paths at decadal times and the
// targets. Rows with t = 0 are excluded.
double calibration_objective(const FreeClimateParams& free, const ClimateParams& base,
                             const DecadalTargets& targets,
                             const std::vector<double>& annual_emissions,
                             const CarbonState& M0, const TemperatureState& T0);

CalibrationResult calibrate_climate(const DecadalTargets& targets,
                                    const std::vector<double>& annual_emissions,
                                    const CarbonState& M0, const TemperatureState& T0,
                                    const ClimateParams& base = {},
                                    const CalibrationOptions& options = {});

// Runs the annual climate system and samples it every `stride` years.
DecadalTargets generate_targets(const ClimateParams& p, const std::vector<double>& annual_emissions,
                                const CarbonState& M0, const TemperatureState& T0, int last_year,
                                int stride = 10);

ClimateParams with_free(const ClimateParams& base, const FreeClimateParams& free);

}  // namespace dsice
