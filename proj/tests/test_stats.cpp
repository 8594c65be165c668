#include "doctest.h"

#include <cmath>
#include <random>

#include "dsice/errors.hpp"
#include "dsice/stats.hpp"

using namespace dsice;

TEST_SUITE("stats") {

TEST_CASE("type-7 quantiles") {
    const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 1.0) == 4.0);
    CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(x, 0.1) == doctest::Approx(1.3));
    CHECK(quantile(x, 0.9) == doctest::Approx(3.7));
    CHECK(quantile({5.0}, 0.3) == 5.0);
    CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
    CHECK_THROWS_AS(quantile(x, 1.5), DomainError);
}

TEST_CASE("fan quantiles are monotone and exact for constant samples") {
    std::mt19937_64 rng(11);
    std::lognormal_distribution<double> ln(0.0, 0.7);
    PathSeries s(500);
    for (auto& p : s)
        for (int t = 0; t < 30; ++t) p.push_back(t == 0 ? 42.0 : ln(rng));
    s[3].resize(12);
    const Fan f = quantile_fan(s);
    REQUIRE(f.q.size() == 30);
    for (int k = 0; k < 7; ++k) CHECK(f.q[0][k] == 42.0);
    CHECK(f.mean[0] == 42.0);
    CHECK(f.sd[0] == 0.0);
    CHECK(f.count[11] == 500);
    CHECK(f.count[12] == 499);
    for (std::size_t t = 0; t < f.q.size(); ++t)
        for (int k = 0; k + 1 < 7; ++k) CHECK(f.q[t][k] <= f.q[t][k + 1]);
}

TEST_CASE("noise-free AR(1) is recovered exactly") {
    PathSeries s;
    for (int p = 0; p < 20; ++p) {
        std::vector<double> x{1.0 + 0.37 * p};
        for (int t = 1; t < 100; ++t) x.push_back(0.7 * x.back());
        s.push_back(x);
    }
    const auto st = ar1_stats(s, 100);
    CHECK(std::abs(st.Lambda_mean - 0.7) <= 1e-12);
    CHECK(st.Lambda_se <= 1e-12);
    CHECK(st.sigma_mean <= 1e-12);
    // The mean path (p = 9.5 equivalent) is not in the sample, so no path is excluded.
    CHECK(st.used == 20);
}

TEST_CASE("random walk gives Lambda near one within three standard errors") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    PathSeries s(400);
    for (auto& p : s) {
        double x = 0.0;
        for (int t = 0; t < 200; ++t) p.push_back(x += n(rng));
    }
    const auto st = ar1_stats(s, 200);
    CHECK(std::abs(st.Lambda_mean - 1.0) <= 3.0 * st.Lambda_se);
    CHECK(st.Lambda_mean > 0.9);
    CHECK(st.sigma_mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("white noise gives Lambda near zero within three standard errors") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 2.0);
    PathSeries s(400);
    for (auto& p : s)
        for (int t = 0; t < 100; ++t) p.push_back(n(rng));
    const auto st = ar1_stats(s, 100);
    CHECK(std::abs(st.Lambda_mean) <= 3.0 * st.Lambda_se);
    CHECK(st.sigma_mean == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("zero-variance paths are excluded") {
    PathSeries s{{1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}};
    const auto st = ar1_stats(s, 4);
    CHECK(st.used == 0);
    CHECK(st.excluded == 2);
    CHECK(std::isnan(st.Lambda_mean));
    CHECK_THROWS_AS(ar1_stats(s, 2), DomainError);
}

TEST_CASE("correlations") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10}, c{5, 4, 3, 2, 1}, k{3, 3, 3, 3, 3};
    const auto r = correlations({a, b, c, k});
    CHECK(r.r[0][0] == 1.0);
    CHECK(r.r[0][1] == doctest::Approx(1.0));
    CHECK(r.r[0][2] == doctest::Approx(-1.0));
    CHECK(r.r[2][0] == r.r[0][2]);
    CHECK(std::isnan(r.r[3][0]));
    CHECK(std::isnan(r.r[3][3]));
    CHECK(r.degenerate == 4);
    CHECK_THROWS_AS(correlations({a, {1.0}}), DomainError);
}

TEST_CASE("growth statistics of an AR(1) growth series") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 0.01);
    PathSeries g(300);
    for (auto& p : g) {
        double x = 0.0;
        for (int t = 0; t < 400; ++t) {
            x = 0.5 * x + n(rng);
            p.push_back(0.02 + x);
        }
    }
    const auto s = growth_stats(g, 400);
    CHECK(s.paths == 300);
    CHECK(s.mean.median == doctest::Approx(0.02).epsilon(0.05));
    CHECK(s.ac1.median == doctest::Approx(0.5).epsilon(0.05));
    CHECK(s.ac2.median == doctest::Approx(0.25).epsilon(0.15));
    CHECK(s.Lambda.median == doctest::Approx(0.5).epsilon(0.05));
    CHECK(s.sigma_eps.median == doctest::Approx(0.01).epsilon(0.05));
    CHECK(s.mean.lo <= s.mean.median);
    CHECK(s.mean.median <= s.mean.hi);
}

}
