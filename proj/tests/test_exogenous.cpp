#include "doctest.h"

#include <cmath>

#include "dsice/errors.hpp"
#include "dsice/exogenous.hpp"
#include "dsice/tipping.hpp"

using namespace dsice;

TEST_SUITE("exogenous") {

TEST_CASE("initial values") {
    ExogenousParams p;
    CHECK(population(0) == doctest::Approx(6514.0));
    CHECK(productivity_trend(0, p) == doctest::Approx(0.0272));
    CHECK(carbon_intensity(0, p) == doctest::Approx(0.13418));
    CHECK(mitigation_coeff(0, p) == doctest::Approx(1.17 * 0.13418 / 2.8));
    CHECK(land_emissions(0) == doctest::Approx(1.1));
    CHECK(external_forcing(0) == doctest::Approx(-0.06));
    CHECK(external_forcing(100) == doctest::Approx(0.3));
    CHECK(external_forcing(400) == doctest::Approx(0.3));
}

TEST_CASE("long-run limits") {
    ExogenousParams p;
    CHECK(population(2000) == doctest::Approx(8600.0));
    // Productivity converges to A0 exp(alpha1 / alpha2).
    CHECK(productivity_trend(50000, p) == doctest::Approx(0.0272 * std::exp(9.2)).epsilon(1e-9));
}

TEST_CASE("constant-growth limit of the productivity trend") {
    ExogenousParams p;
    p.alpha2 = 0.0;
    CHECK(productivity_trend(50, p) == doctest::Approx(0.0272 * std::exp(0.0092 * 50)));
    p.alpha2 = 1e-12;
    CHECK(productivity_trend(50, p) == doctest::Approx(0.0272 * std::exp(0.0092 * 50)).epsilon(1e-9));
}

TEST_CASE("trend paths are monotone") {
    ExogenousParams p;
    for (int t = 0; t < 600; ++t) {
        CHECK(population(t + 1) > population(t));
        CHECK(productivity_trend(t + 1, p) > productivity_trend(t, p));
        CHECK(carbon_intensity(t + 1, p) < carbon_intensity(t, p));
    }
}

TEST_CASE("negative years are rejected") { CHECK_THROWS_AS(period_context(-1, ExogenousParams{}), DomainError); }

}

TEST_SUITE("tipping") {

TEST_CASE("hazard calibration table") {
    const double dT[] = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const double P[] = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75};
    const double expect[] = {0.00267, 0.00288, 0.00313, 0.00347, 0.00392, 0.00462};
    for (int k = 0; k < 6; ++k) {
        const double lam = calibrate_hazard(P[k], dT[k]);
        CHECK(std::round(lam * 1e5) / 1e5 == doctest::Approx(expect[k]).epsilon(1e-12));
    }
}

TEST_CASE("damage lattice long-run levels and moments") {
    const double cases[2][4] = {{0.05, 0.2, 0.0226, 0.0774}, {0.10, 0.4, 0.0225, 0.1775}};
    for (const auto& [Jbar, q, lo, hi] : cases) {
        TippingParams p;
        p.Jbar_inf = Jbar;
        p.q = q;
        const auto v = damage_lattice(p);
        REQUIRE(v.size() == 16);
        CHECK(std::abs(v[13] - lo) <= 5e-4);
        CHECK(std::abs(v[14] - Jbar) <= 5e-4);
        CHECK(std::abs(v[15] - hi) <= 5e-4);
        const double m = (v[13] + v[14] + v[15]) / 3.0;
        double var = 0.0;
        for (int k = 13; k < 16; ++k) var += (v[k] - m) * (v[k] - m) / 3.0;
        CHECK(std::abs(m - Jbar) <= 1e-12);
        CHECK(std::abs(var - q * Jbar * Jbar) <= 1e-12);
        for (int i = 1; i <= 5; ++i) CHECK(std::abs(v[3 * i - 1] - Jbar * i / 5.0) <= 1e-15);
    }
}

TEST_CASE("q = 0 collapses to a single ramp") {
    TippingParams p;
    p.q = 0.0;
    CHECK(p.n_states() == 6);
    const auto v = damage_lattice(p);
    CHECK(v.size() == 6);
    CHECK(v.back() == doctest::Approx(p.Jbar_inf));
}

TEST_CASE("transition rows are stochastic and the last stage is absorbing") {
    TippingParams p;
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
        const auto m = transition_matrix(T, p);
        const int n = p.n_states();
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                CHECK(m[i * n + j] >= 0.0);
                s += m[i * n + j];
            }
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
        for (int i = n - 3; i < n; ++i) CHECK(m[i * n + i] == 1.0);
    }
    CHECK(survival_prob(0.9, p) == 1.0);
    CHECK(survival_prob(2.0, p) == doctest::Approx(std::exp(-0.0035)));
}

TEST_CASE("expected stage duration") {
    TippingParams p;
    // Four transient stages of expected length 1 / (1 - stay) each.
    CHECK(4.0 / (1.0 - stage_stay_prob(p)) == doctest::Approx(52.03).epsilon(1e-3));
}

TEST_CASE("invalid tipping parameters") {
    TippingParams p;
    p.q = 0.8;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.q = 0.2;
    p.Dbar = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_THROWS_AS(calibrate_hazard(1.0, 1.0), DomainError);
}

}
