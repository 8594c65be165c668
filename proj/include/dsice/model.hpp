#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "dsice/dynamics.hpp"
#include "dsice/growth.hpp"
#include "dsice/terminal.hpp"
#include "dsice/tipping.hpp"

namespace dsice {

struct InitialState {
    State6 x{137.0, 808.9, 1255.0, 18365.0, 0.7307, 0.0068};
};

struct SolverConfig {
    int horizon = 150;
    int degree = 4;
    std::array<int, kStateDim> nodes{5, 5, 5, 5, 5, 5};
    TailSpec tail{};
    double s_max = 0.9;
    int starts = 4;
    double opt_tol = 1e-9;        // scaled projected-gradient tolerance, relative to |value|
    int max_iterations = 200;
    double excursion_tol = 0.25;  // allowed overshoot of Box(t+1), fraction of its width
    double fit_warn = 1e-6;       // max node residual relative to the value range
    // Box construction from pilot paths.
    int pilot_paths = 200;
    std::uint64_t pilot_seed = 1703;
    bool refine_boxes = true;     // re-solve on boxes widened to the solved policy paths
    double box_margin = 0.25;
    double floor_logK = 0.04;     // half-width floors: log10 units,
    double floor_M = 0.02;        // fraction of the carbon level,
    double floor_T = 0.05;        // degC
    int workers = 0;              // 0 = OpenMP default
    bool separable = false;       // expected-utility aggregation V = u + beta E[V]
};

struct SimulateConfig {
    int n_paths = 1000;
    std::uint64_t seed = 20050101;
    std::string output_dir = "out";
    int stats_year = 15;          // year of the growth-correlation table
    int ar_window = 100;
};

struct ModelConfig {
    ModelParams params;
    GrowthParams growth;
    TippingParams tipping;
    InitialState initial;
    SolverConfig solver;
    SimulateConfig simulate;

    ModelConfig() { growth.horizon = solver.horizon; }

    // Validates every section; the growth horizon must cover the solver's.
    void validate() const;
    bool deterministic() const { return !growth.zeta_on() && !tipping.enabled; }
};

// Discrete state indexing at a given time: d = (iz * n_chi + ic) * n_J + iJ.
struct DiscreteIndex {
    int n_zeta = 1, n_chi = 1, n_J = 1;
    int size() const { return n_zeta * n_chi * n_J; }
    int flat(int iz, int ic, int iJ) const { return (iz * n_chi + ic) * n_J + iJ; }
    void split(int d, int& iz, int& ic, int& iJ) const {
        iJ = d % n_J;
        ic = (d / n_J) % n_chi;
        iz = d / (n_J * n_chi);
    }
};

DiscreteIndex discrete_index(const ProductivityChain& chain, const TippingParams& tp, int t);

}  // namespace dsice
