#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsice/chebyshev.hpp"
#include "dsice/model.hpp"

namespace dsice {

struct ValueTable {
    int horizon = 0;
    int degree = 0;
    std::string config_hash;
    std::vector<Box6> boxes;                              // [t], t = 0..horizon
    std::vector<DiscreteIndex> index;                     // [t]
    std::vector<std::vector<std::vector<double>>> coeffs; // [t][d][term]; empty until solved
    int first_solved = -1;                                // smallest t with coefficients

    const double* coefficients(int t, int d) const { return coeffs[t][d].data(); }

    void save(const std::string& path) const;
    static ValueTable load(const std::string& path);
};

// Continuation data for one node: successor discrete states with probabilities.
struct Successor {
    int d = 0;
    double p = 0.0;
};

std::vector<Successor> successors(const ProductivityChain& chain, const TippingParams& tp, int t, int iz,
                                  int ic, int iJ, double T_AT);

struct NodeResult {
    double value = 0.0;
    Controls controls{};
    StepResult step{};
    bool converged = false;
    int evaluations = 0;
    // Largest overshoot of Box(t+1) at the optimum, as a fraction of the width.
    double excursion = 0.0;
    int excursion_dim = -1;
};

// Maximizes the transformed Bellman objective at state x in discrete state
// (iz, ic, iJ) at time t against the fitted table at t+1. `starts` seeds the
// multi-start search; the first `cfg.starts` entries of the standard list are
// appended after them.
NodeResult bellman_node(const ModelConfig& cfg, const ProductivityChain& chain, const ChebyshevBasis& basis,
                        const ValueTable& table, int t, const State6& x, int iz, int ic, int iJ,
                        const std::vector<Controls>& starts);

// Value of fixed controls at a node (same objective as bellman_node).
double bellman_objective(const ModelConfig& cfg, const ProductivityChain& chain, const ChebyshevBasis& basis,
                         const ValueTable& table, int t, const State6& x, int iz, int ic, int iJ,
                         const Controls& c, std::array<double, 2>* grad = nullptr);

// Fitted value and its gradient in natural units (K, M_AT, ...).
double table_value(const ChebyshevBasis& basis, const ValueTable& table, int t, int d, const State6& x,
                   State6* grad = nullptr);

// -1000 (dV/dM_AT) / (dV/dK) from the fitted table at time t.
double table_scc(const ChebyshevBasis& basis, const ValueTable& table, int t, int d, const State6& x);

// Per-period hull of visited states, in box coordinates.
struct Envelope {
    std::vector<State6> lo, hi;
    explicit Envelope(int horizon);
    void add(int t, const State6& x);
};

// Pilot paths under s = 0.25 and the given mu path.
Envelope pilot_envelope(const ModelConfig& cfg, const ProductivityChain& chain, const std::vector<double>& mu_path,
                        std::uint64_t seed);
// Hull plus floors and the safety margin.
std::vector<Box6> boxes_from_envelope(const ModelConfig& cfg, const Envelope& env);
std::vector<Box6> build_boxes(const ModelConfig& cfg, const ProductivityChain& chain,
                              const std::vector<double>& mu_path, std::uint64_t seed);

enum class Kernel { Serial, Parallel };

struct StepStats {
    int t = 0;
    double max_residual = 0.0;   // relative to the value range
    int unconverged = 0;
    long evaluations = 0;
    double seconds = 0.0;
};

struct SolveOptions {
    Kernel kernel = Kernel::Parallel;
    std::string checkpoint;      // written after every step when non-empty
    bool resume = false;
    std::function<void(const StepStats&)> progress;
};

struct SolveResult {
    ValueTable table;
    std::vector<StepStats> stats;
};

// Terminal fit followed by the backward sweep t = T-1 .. 0.
SolveResult solve(const ModelConfig& cfg, const ProductivityChain& chain, const std::vector<Box6>& boxes,
                  const std::string& config_hash, const SolveOptions& opts = {});

// Node values and policies for one time step (exposed for tests and the benchmark).
struct StepOutput {
    std::vector<std::vector<double>> values;     // [d][node]
    std::vector<std::vector<Controls>> policy;   // [d][node]
    int unconverged = 0;
    long evaluations = 0;
};

StepOutput maximize_step(const ModelConfig& cfg, const ProductivityChain& chain, const Fitter& fitter,
                         const ValueTable& table, int t, const std::vector<std::vector<Controls>>* warm,
                         Kernel kernel);

StepOutput terminal_step(const ModelConfig& cfg, const ProductivityChain& chain, const Fitter& fitter,
                         const ValueTable& table, Kernel kernel);

}  // namespace dsice
