#include "dsice/model.hpp"

#include <string>

#include "dsice/errors.hpp"

namespace dsice {

void ModelConfig::validate() const {
    params.exo.validate();
    params.econ.validate();
    params.climate.validate();
    params.prefs.validate();
    growth.validate();
    tipping.validate();

    const auto& s = solver;
    if (s.horizon < 1) throw ValidationError("solver.horizon must be positive");
    if (growth.horizon < s.horizon) throw ValidationError("productivity chain horizon shorter than solver.horizon");
    if (s.degree < 1) throw ValidationError("solver.degree must be at least 1");
    for (int d = 0; d < kStateDim; ++d)
        if (s.nodes[d] < s.degree + 1)
            throw ValidationError(std::string("solver.nodes for ") + dim_name(d) + " must be at least degree + 1");
    if (s.tail.years < 1) throw ValidationError("solver.tail_years must be positive");
    if (!(s.tail.consumption_ratio > 0.0 && s.tail.consumption_ratio < 1.0))
        throw ValidationError("solver.tail_consumption_ratio must lie in (0, 1)");
    if (!(s.s_max > 0.0 && s.s_max < 1.0)) throw ValidationError("solver.s_max must lie in (0, 1)");
    if (s.starts < 1) throw ValidationError("solver.starts must be positive");
    if (!(s.opt_tol > 0.0)) throw ValidationError("solver.opt_tol must be positive");
    if (s.max_iterations < 1) throw ValidationError("solver.max_iterations must be positive");
    if (!(s.excursion_tol >= 0.0)) throw ValidationError("solver.excursion_tol must be non-negative");
    if (!(s.fit_warn > 0.0)) throw ValidationError("solver.fit_warn must be positive");
    if (s.pilot_paths < 1) throw ValidationError("solver.pilot_paths must be positive");
    if (!(s.box_margin >= 0.0)) throw ValidationError("solver.box_margin must be non-negative");
    if (!(s.floor_logK > 0.0 && s.floor_M > 0.0 && s.floor_T > 0.0))
        throw ValidationError("solver box floors must be positive");
    if (s.workers < 0) throw ValidationError("solver.workers must be non-negative");

    const auto& x = initial.x;
    for (int d = 0; d < 4; ++d)
        if (!(x[d] > 0.0)) throw ValidationError(std::string("initial ") + dim_name(d) + " must be positive");

    if (simulate.n_paths < 1) throw ValidationError("simulate.n_paths must be positive");
    if (simulate.stats_year < 1 || simulate.stats_year > s.horizon)
        throw ValidationError("simulate.stats_year must lie in [1, horizon]");
    if (simulate.ar_window < 3) throw ValidationError("simulate.ar_window must be at least 3");
}

}  // namespace dsice
