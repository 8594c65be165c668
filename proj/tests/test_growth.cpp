#include "doctest.h"

#include <cmath>
#include <random>

#include "dsice/errors.hpp"
#include "dsice/growth.hpp"
#include "dsice/rng.hpp"

using namespace dsice;

TEST_SUITE("growth") {

TEST_CASE("variances against the double-sum formula") {
    GrowthParams p;
    p.n_zeta = 9;
    p.n_chi = 5;
    p.horizon = 60;
    const auto c = build_chain(p);
    for (int t : {1, 2, 3, 10, 60}) {
        CHECK(c.Upsilon[t] == doctest::Approx(variance_chi(t, p)).epsilon(1e-13));
        CHECK(c.Delta[t] == doctest::Approx(variance_logzeta(t, p)).epsilon(1e-12));
    }
    // Upsilon recursion.
    for (int t = 1; t < 60; ++t)
        CHECK(c.Upsilon[t + 1] == doctest::Approx(p.r * p.r * c.Upsilon[t] + p.varsigma * p.varsigma).epsilon(1e-13));
    CHECK(c.Delta[1] == doctest::Approx(p.varrho * p.varrho));
}

TEST_CASE("rows are stochastic") {
    GrowthParams p;
    p.n_zeta = 15;
    p.n_chi = 5;
    p.horizon = 30;
    const auto c = build_chain(p);
    for (int t = 0; t < p.horizon; ++t) {
        const Matrix& Pc = c.P_chi[t];
        for (int i = 0; i < Pc.rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < Pc.cols; ++j) s += Pc(i, j);
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
        for (const Matrix& P : c.P_zeta[t])
            for (int i = 0; i < P.rows; ++i) {
                double s = 0.0;
                for (int j = 0; j < P.cols; ++j) {
                    CHECK(P(i, j) >= 0.0);
                    s += P(i, j);
                }
                CHECK(std::abs(s - 1.0) <= 1e-12);
            }
    }
}

TEST_CASE("grids are symmetric with an exact center") {
    GrowthParams p;
    p.n_zeta = 11;
    p.n_chi = 7;
    p.horizon = 20;
    const auto c = build_chain(p);
    CHECK(c.n_zeta(0) == 1);
    CHECK(c.zeta_grid[0][0] == 1.0);
    for (int t = 1; t <= 20; ++t) {
        CHECK(c.zeta_grid[t][5] == 1.0);
        CHECK(c.chi_grid[t][3] == 0.0);
        for (int i = 0; i < 11; ++i) CHECK(std::log(c.zeta_grid[t][i]) == doctest::Approx(-std::log(c.zeta_grid[t][10 - i])).epsilon(1e-14));
        CHECK(std::log(c.zeta_grid[t].back()) == doctest::Approx(3.0 * std::sqrt(c.Delta[t])));
    }
    // Central row at chi = 0 is mirror-symmetric.
    const Matrix& P = c.P_zeta[10][3];
    for (int j = 0; j < 11; ++j) CHECK(P(5, j) == doctest::Approx(P(5, 10 - j)).epsilon(1e-12));
}

TEST_CASE("switched-off dimensions") {
    GrowthParams p;
    p.n_zeta = 1;
    p.n_chi = 1;
    p.horizon = 10;
    const auto c = build_chain(p);
    for (int t = 0; t <= 10; ++t) {
        CHECK(c.zeta_grid[t] == std::vector<double>{1.0});
        CHECK(c.chi_grid[t] == std::vector<double>{0.0});
    }
    p.n_zeta = 5;
    const auto d = build_chain(p);
    CHECK(d.Delta[10] == doctest::Approx(p.varrho * p.varrho * 10));
    p.n_zeta = 4;
    CHECK_THROWS_AS(build_chain(p), ValidationError);
    p.n_zeta = 1;
    p.n_chi = 3;
    CHECK_THROWS_AS(build_chain(p), ValidationError);
}

TEST_CASE("chain-simulated dispersion of log zeta") {
    GrowthParams p;
    p.n_zeta = 91;
    p.n_chi = 19;
    p.horizon = 100;
    const auto c = build_chain(p);
    const int n = 10000;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
        int iz = 0, ic = 0;
        for (int t = 0; t < 100; ++t) {
            const Matrix& Pc = c.P_chi[t];
            const Matrix& Pz = c.P_zeta[t][ic];
            const int ic1 = draw_index(&Pc.a[static_cast<std::size_t>(ic) * Pc.cols], Pc.cols, uniform(3, k, t, Shock::Chi));
            iz = draw_index(&Pz.a[static_cast<std::size_t>(iz) * Pz.cols], Pz.cols, uniform(3, k, t, Shock::Zeta));
            ic = ic1;
        }
        const double l = std::log(c.zeta_grid[100][iz]);
        s += l;
        s2 += l * l;
    }
    const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
    CHECK(std::abs(sd / std::sqrt(c.Delta[100]) - 1.0) < 0.05);
}

}
