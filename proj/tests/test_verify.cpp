#include "doctest.h"

#include <cmath>

#include "dsice/optimize.hpp"
#include "dsice/verify.hpp"

using namespace dsice;

TEST_SUITE("verify") {

const State6 x0{137.0, 808.9, 1255.0, 18365.0, 0.7307, 0.0068};

TrajectoryOptions short_options(int horizon) {
    TrajectoryOptions o;
    o.horizon = horizon;
    o.tail.years = 50;
    return o;
}

TEST_CASE("adjoint gradient matches finite differences") {
    ModelParams p;
    const auto o = short_options(5);
    std::vector<Controls> c(5, {0.24, 0.2});
    c[2] = {0.3, 0.5};
    std::vector<double> g;
    State6 lam;
    const double f = trajectory_objective(x0, c, p, o, &g, &lam);
    for (int k = 0; k < 10; ++k) {
        auto cp = c, cm = c;
        const double h = 1e-6;
        (k % 2 ? cp[k / 2].mu : cp[k / 2].s) += h;
        (k % 2 ? cm[k / 2].mu : cm[k / 2].s) -= h;
        const double fd = (trajectory_objective(x0, cp, p, o) - trajectory_objective(x0, cm, p, o)) / (2 * h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5).scale(1e-9 * std::abs(f)));
    }
    for (int d : {0, 1}) {
        State6 xp = x0, xm = x0;
        const double h = 1e-6 * x0[d];
        xp[d] += h;
        xm[d] -= h;
        const double fd = (trajectory_objective(xp, c, p, o) - trajectory_objective(xm, c, p, o)) / (2 * h);
        CHECK(lam[d] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("three-period problem matches an independent derivative-free optimum") {
    ModelParams p;
    const auto o = short_options(3);
    auto sol = solve_deterministic(x0, p, o);
    CHECK(sol.converged);
    CHECK(sol.projected_gradient <= 1e-8 * std::abs(sol.path.objective));
    // Oracle: Nelder-Mead on a smooth reparametrization of the same objective.
    auto f = [&](std::span<const double> z) {
        std::vector<Controls> c(3);
        for (int t = 0; t < 3; ++t) {
            c[t].s = 0.9 / (1.0 + std::exp(-z[2 * t]));
            c[t].mu = 1.0 / (1.0 + std::exp(-z[2 * t + 1]));
        }
        return -trajectory_objective(x0, c, p, o);
    };
    std::vector<double> z0(6, 0.0), step(6, 0.5);
    opt::NelderMeadOptions no;
    no.max_evaluations = 200000;
    const auto nm = opt::nelder_mead(f, z0, step, no);
    CHECK(-nm.f <= sol.path.objective + 1e-10 * std::abs(sol.path.objective));
    CHECK(-nm.f == doctest::Approx(sol.path.objective).epsilon(1e-12));
    for (int t = 0; t < 3; ++t) {
        CHECK(0.9 / (1.0 + std::exp(-nm.x[2 * t])) == doctest::Approx(sol.path.c[t].s).epsilon(1e-4));
        CHECK(1.0 / (1.0 + std::exp(-nm.x[2 * t + 1])) == doctest::Approx(sol.path.c[t].mu).epsilon(1e-4));
    }
}

TEST_CASE("solution beats perturbed feasible paths and has positive SCC") {
    ModelParams p;
    const auto o = short_options(30);
    const auto sol = solve_deterministic(x0, p, o);
    CHECK(sol.converged);
    auto c = sol.path.c;
    for (auto& v : c) v.mu = std::min(1.0, v.mu + 0.02);
    CHECK(trajectory_objective(x0, c, p, o) < sol.path.objective);
    for (double s : sol.path.scc) CHECK(s > 0.0);
    const double fd = scc_finite_difference(x0, p, o, sol.path.c);
    CHECK(fd == doctest::Approx(sol.path.scc[0]).epsilon(1e-4));
}

TEST_CASE("comparison of identical paths is zero") {
    ModelParams p;
    const auto o = short_options(10);
    std::vector<Controls> c(10, {0.25, 0.3});
    const auto tr = evaluate_trajectory(x0, c, p, o);
    const auto rows = compare(tr, tr, 10);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        CHECK(r.window == 0.0);
        CHECK(r.initial == 0.0);
    }
    CHECK(rows[0].variable == "K");
    CHECK(rows[5].variable == "SCC");
    CHECK(rows[5].has_initial);
    CHECK(!rows[0].has_initial);
}

}
