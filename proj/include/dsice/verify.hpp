#pragma once

#include <string>
#include <vector>

#include "dsice/dynamics.hpp"
#include "dsice/terminal.hpp"

namespace dsice {

// A deterministic path: states at t = 0..T and controls at t = 0..T-1.
struct Trajectory {
    std::vector<State6> x;
    std::vector<Controls> c;
    std::vector<double> C, Y, Psi, I, E, scc;
    double objective = 0.0;
};

struct TrajectoryOptions {
    int horizon = 150;
    TailSpec tail{};
    double s_max = 0.9;
    double gtol = 1e-10;
    int max_iterations = 20000;
};

struct TrajectorySolution {
    Trajectory path;
    int iterations = 0;
    int evaluations = 0;
    double projected_gradient = 0.0;
    bool converged = false;
    std::string message;
};

// Objective and adjoint gradient of the deterministic problem for a given
// control sequence. `lambda0`, when non-null, receives dW/dx0.
double trajectory_objective(const State6& x0, const std::vector<Controls>& c, const ModelParams& p,
                            const TrajectoryOptions& o, std::vector<double>* grad = nullptr,
                            State6* lambda0 = nullptr);

// Direct transcription of the shock-free problem over (s_t, mu_t), solved with
// projected L-BFGS and an exact adjoint gradient. SCC along the path comes from
// the costates.
TrajectorySolution solve_deterministic(const State6& x0, const ModelParams& p,
                                       const TrajectoryOptions& o,
                                       const std::vector<Controls>* warm = nullptr);

// SCC at x0 from central differences of the re-optimized objective in M_AT and K.
double scc_finite_difference(const State6& x0, const ModelParams& p, const TrajectoryOptions& o,
                             const std::vector<Controls>& warm, double rel_step = 1e-4);

// Rebuilds all path quantities and costate SCCs for the given controls.
Trajectory evaluate_trajectory(const State6& x0, const std::vector<Controls>& c, const ModelParams& p,
                               const TrajectoryOptions& o);

struct ErrorRow {
    std::string variable;
    double window = 0.0;   // relative L1 error over the window
    double initial = 0.0;  // relative error at t = 0 (controls and SCC only)
    bool has_initial = false;
};

// Relative L1 errors sum|a - b| / sum|b| of `dp` against the `oracle` over t < window.
std::vector<ErrorRow> compare(const Trajectory& dp, const Trajectory& oracle, int window = 100);

}  // namespace dsice
