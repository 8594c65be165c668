#pragma once

#include "dsice/pipeline.hpp"

namespace dsice::testing {

// A few seconds to solve: short horizon, low degree, coarse nodes, 3 x 1 x 6 discrete states.
inline ModelConfig small_config(int horizon = 6) {
    ModelConfig c;
    c.solver.horizon = horizon;
    c.growth.horizon = horizon;
    c.growth.n_zeta = 3;
    c.growth.n_chi = 1;
    c.tipping.q = 0.0;
    c.solver.degree = 2;
    c.solver.nodes.fill(3);
    c.solver.starts = 2;
    c.solver.pilot_paths = 50;
    c.solver.floor_logK = 0.12;
    c.simulate.stats_year = 2;
    c.simulate.ar_window = horizon;
    c.validate();
    return c;
}

inline const SolvedModel& small_solved() {
    static const SolvedModel m = [] {
        SolveOptions o;
        o.kernel = Kernel::Serial;
        return solve_model(small_config(), o);
    }();
    return m;
}

}  // namespace dsice::testing
