#pragma once

#include <string>
#include <vector>

namespace dsice {

// A grid size of 1 switches that dimension off (its value stays at the mean).
struct GrowthParams {
    double varrho = 0.035;   // zeta innovation volatility
    double r = 0.775;        // persistence of chi
    double varsigma = 0.008; // chi innovation volatility
    int n_zeta = 91;
    int n_chi = 19;
    int horizon = 100;

    void validate() const;
    bool chi_on() const { return n_chi > 1; }
    bool zeta_on() const { return n_zeta > 1; }
};

double variance_chi(int t, const GrowthParams& p);
// Uses Upsilon = 0 when the chi dimension is off.
double variance_logzeta(int t, const GrowthParams& p);

// Dense row-major matrix.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

struct ProductivityChain {
    int horizon = 0;
    std::vector<std::vector<double>> zeta_grid;  // [t][i], multipliers
    std::vector<std::vector<double>> chi_grid;   // [t][j]
    std::vector<Matrix> P_chi;                   // [t]: n_chi(t) x n_chi(t+1)
    std::vector<std::vector<Matrix>> P_zeta;     // [t][j]: n_zeta(t) x n_zeta(t+1)
    std::vector<double> Upsilon, Delta;          // [t]
    int degenerate_rows = 0;                     // rows with max probability > 0.999

    int n_zeta(int t) const { return static_cast<int>(zeta_grid[t].size()); }
    int n_chi(int t) const { return static_cast<int>(chi_grid[t].size()); }
};

// Tauchen discretization on equally spaced grids over +-3 standard deviations.
// Time 0 holds the single state (zeta = 1, chi = 0).
ProductivityChain build_chain(const GrowthParams& p);

// Writes `t,from_zeta,from_chi,to_zeta,to_chi,prob` rows.
void write_chain_csv(const ProductivityChain& c, const std::string& path, const std::string& comment = "");

}  // namespace dsice
