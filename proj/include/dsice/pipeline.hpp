#pragma once

#include <string>
#include <vector>

#include "dsice/simulate.hpp"
#include "dsice/verify.hpp"

namespace dsice {

// Synthetic business-as-usual emissions (t, GtC/yr) at decadal points up to year 500.
std::vector<std::pair<double, double>> synthetic_emissions();

// The same configuration with every shock switched off.
ModelConfig deterministic_variant(ModelConfig cfg);

TrajectoryOptions trajectory_options(const ModelConfig& cfg);

// Boxes from pilot paths whose mu path comes from the shock-free oracle.
std::vector<Box6> pilot_boxes(const ModelConfig& cfg, const ProductivityChain& chain);

struct SolvedModel {
    ModelConfig cfg;
    std::string hash;
    ProductivityChain chain;
    ValueTable table;
    std::vector<StepStats> stats;
};

SolvedModel solve_model(const ModelConfig& cfg, const SolveOptions& opts = {});

// Shock-free path implied by a solved table, starting at the initial state.
Trajectory dp_trajectory(const SolvedModel& m);

struct VerifyReport {
    TrajectorySolution oracle;
    Trajectory dp;
    std::vector<ErrorRow> errors;
    double scc_fd = 0.0;       // oracle SCC at t = 0 from re-optimized central differences
    double dp_objective = 0.0; // oracle objective evaluated along the DP controls
    std::vector<StepStats> stats;
};

VerifyReport verify_model(const ModelConfig& cfg, const SolveOptions& opts = {}, bool finite_difference = true);

std::string report_text(const VerifyReport& r);
std::string report_csv(const VerifyReport& r, const std::string& hash);

}  // namespace dsice
