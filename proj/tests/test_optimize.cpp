#include "doctest.h"

#include <cmath>

#include "dsice/optimize.hpp"

using namespace dsice;

TEST_SUITE("optimize") {

TEST_CASE("small box minimizer: interior and bound optima") {
    auto fg = [](const std::array<double, 2>& x, std::array<double, 2>& g) {
        g = {2.0 * (x[0] - 0.3), 20.0 * (x[1] + 0.5)};
        return (x[0] - 0.3) * (x[0] - 0.3) + 10.0 * (x[1] + 0.5) * (x[1] + 0.5);
    };
    opt::Options o;
    o.gtol = 1e-12;
    const auto r = opt::minimize_box<2>(fg, {0.9, 0.9}, {0.0, 0.0}, {1.0, 1.0}, o);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(r.x[1] == 0.0);
    CHECK(r.gradient[1] > 0.0);
}

TEST_CASE("small box minimizer: Rosenbrock") {
    auto fg = [](const std::array<double, 2>& x, std::array<double, 2>& g) {
        const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
        g = {-2.0 * a - 400.0 * x[0] * b, 200.0 * b};
        return a * a + 100.0 * b * b;
    };
    opt::Options o;
    o.max_iterations = 2000;
    o.gtol = 1e-14;
    const auto r = opt::minimize_box<2>(fg, {-1.2, 1.0}, {-2.0, -2.0}, {2.0, 2.0}, o);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("non-finite objective is treated as infeasible") {
    auto fg = [](const std::array<double, 2>& x, std::array<double, 2>& g) {
        g = {-1.0 / x[0] + 1.0, 2.0 * x[1]};
        if (x[0] > 0.8) return std::numeric_limits<double>::infinity();
        return -std::log(x[0]) + x[0] + x[1] * x[1];
    };
    const auto r = opt::minimize_box<2>(fg, {0.1, 0.5}, {1e-6, -1.0}, {2.0, 1.0});
    CHECK(std::isfinite(r.f));
    CHECK(r.x[0] <= 0.8);
}

TEST_CASE("projected L-BFGS on a bound-constrained quadratic") {
    const int n = 20;
    auto fg = [n](std::span<const double> x, std::span<double> g) {
        double f = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = (i % 3) - 1.0;
            f += (i + 1) * (x[i] - c) * (x[i] - c);
            g[i] = 2.0 * (i + 1) * (x[i] - c);
        }
        return f;
    };
    std::vector<double> lo(n, -0.5), hi(n, 0.5);
    opt::LbfgsOptions o;
    o.gtol = 1e-12;
    const auto r = opt::minimize_lbfgs_box(fg, std::vector<double>(n, 0.0), lo, hi, o);
    CHECK(r.converged);
    for (int i = 0; i < n; ++i) CHECK(r.x[i] == doctest::Approx(std::clamp((i % 3) - 1.0, -0.5, 0.5)).epsilon(1e-9).scale(1e-9));
}

TEST_CASE("Nelder-Mead on a smooth bowl") {
    auto f = [](std::span<const double> x) {
        return std::pow(x[0] - 1.0, 2) + 5.0 * std::pow(x[1] + 2.0, 2) + std::pow(x[2] - 0.5 * x[0], 2);
    };
    const auto r = opt::nelder_mead(f, {0.0, 0.0, 0.0}, {0.5, 0.5, 0.5});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(r.x[2] == doctest::Approx(0.5).epsilon(1e-6));
}

}
