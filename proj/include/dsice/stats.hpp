#pragma once

#include <array>
#include <vector>

namespace dsice {

// Series indexed [path][t]. Paths may be shorter than the longest one (aborted).
using PathSeries = std::vector<std::vector<double>>;

inline constexpr std::array<double, 7> kFanLevels{0.01, 0.10, 0.25, 0.50, 0.75, 0.90, 0.99};

// Type-7 quantile of an unsorted sample.
double quantile(std::vector<double> x, double q);

struct Fan {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<std::array<double, 7>> q;  // kFanLevels per year
    std::vector<int> count;
};

// Per-year cross-path mean, standard deviation and quantiles.
Fan quantile_fan(const PathSeries& s);

struct ArStats {
    double Lambda_mean = 0.0, Lambda_se = 0.0;
    double sigma_mean = 0.0, sigma_se = 0.0;
    int used = 0;
    int excluded = 0;  // paths with a zero-variance regressor or too few points
};

// x_{t+1} - xbar_{t+1} = Lambda (x_t - xbar_t) + eps_t per path over the first
// `window` points, xbar being the cross-path mean at each t. Standard errors are
// the cross-path standard deviations of the per-path estimates.
ArStats ar1_stats(const PathSeries& s, int window);

// Correlation matrix of the given variables across paths at one year. Entries
// involving a zero-variance variable are NaN and counted in `degenerate`.
struct Correlation {
    std::vector<std::vector<double>> r;
    int degenerate = 0;
};
Correlation correlations(const std::vector<std::vector<double>>& vars);

// Per-path consumption-growth statistics summarized across paths.
struct Band {
    double median = 0.0, lo = 0.0, hi = 0.0;  // 50%, 5%, 95%
};
struct GrowthStats {
    Band mean, sd, ac1, ac2, Lambda, sigma_eps;
    int paths = 0;
};
GrowthStats growth_stats(const PathSeries& g, int window);

}  // namespace dsice
