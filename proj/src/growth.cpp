#include "dsice/growth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dsice/errors.hpp"

namespace dsice {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::vector<double> symmetric_grid(int n, double half_width) {
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    if (n == 1) return g;
    for (int i = 0; i < n; ++i) g[i] = -half_width + 2.0 * half_width * i / (n - 1);
    // Exact symmetry and an exact zero at the center.
    for (int i = 0; i < n / 2; ++i) g[n - 1 - i] = -g[i];
    g[n / 2] = 0.0;
    return g;
}

// Tauchen row: probabilities of landing in each cell of `next` for N(mean, sd^2).
void tauchen_row(const std::vector<double>& next, double mean, double sd, double* out) {
    const int n = static_cast<int>(next.size());
    if (n == 1) {
        out[0] = 1.0;
        return;
    }
    double prev = 0.0;
    for (int k = 0; k < n - 1; ++k) {
        const double edge = 0.5 * (next[k] + next[k + 1]);
        const double c = normal_cdf((edge - mean) / sd);
        out[k] = c - prev;
        prev = c;
    }
    out[n - 1] = 1.0 - prev;
    for (int k = 0; k < n; ++k) out[k] = std::max(0.0, out[k]);
}

}  // namespace

void GrowthParams::validate() const {
    if (!(r >= 0.0 && r < 1.0)) throw ValidationError("growth.r must lie in [0, 1)");
    if (n_zeta < 1 || n_chi < 1) throw ValidationError("growth grid sizes must be positive");
    if (n_zeta > 1 && (n_zeta < 3 || n_zeta % 2 == 0))
        throw ValidationError("growth.n_zeta must be 1 or an odd number >= 3");
    if (n_chi > 1 && (n_chi < 3 || n_chi % 2 == 0))
        throw ValidationError("growth.n_chi must be 1 or an odd number >= 3");
    if (n_zeta > 1 && !(varrho > 0.0)) throw ValidationError("growth.varrho must be positive");
    if (n_chi > 1 && !(varsigma > 0.0)) throw ValidationError("growth.varsigma must be positive");
    if (n_chi > 1 && n_zeta == 1)
        throw ValidationError("growth: chi shocks require the zeta dimension");
    if (horizon < 1) throw ValidationError("growth.horizon must be positive");
}

double variance_chi(int t, const GrowthParams& p) {
    if (t < 1) return 0.0;
    const double r2 = p.r * p.r;
    if (r2 == 0.0) return p.varsigma * p.varsigma;
    return p.varsigma * p.varsigma * (1.0 - std::pow(r2, t)) / (1.0 - r2);
}

double variance_logzeta(int t, const GrowthParams& p) {
    if (t < 1) return 0.0;
    double d = p.varrho * p.varrho * t;
    if (!p.chi_on()) return d;
    for (int s = 1; s <= t - 1; ++s) d += variance_chi(s, p);
    for (int tau = 2; tau <= t - 1; ++tau)
        for (int s = 1; s <= tau - 1; ++s) d += 2.0 * std::pow(p.r, tau - s) * variance_chi(s, p);
    return d;
}

ProductivityChain build_chain(const GrowthParams& p) {
    p.validate();
    ProductivityChain c;
    const int T = p.horizon;
    c.horizon = T;
    c.Upsilon.resize(T + 1);
    c.Delta.resize(T + 1);
    c.zeta_grid.resize(T + 1);
    c.chi_grid.resize(T + 1);

    for (int t = 0; t <= T; ++t) c.Upsilon[t] = p.chi_on() ? variance_chi(t, p) : 0.0;
    // inner_tau = sum_{s=1}^{tau-1} r^{tau-s} Upsilon_s
    for (int t = 1; t <= T; ++t) {
        double s1 = 0.0, s2 = 0.0, inner = 0.0;
        for (int tau = 1; tau <= t - 1; ++tau) {
            s1 += c.Upsilon[tau];
            if (tau >= 2) {
                inner = p.r * (inner + c.Upsilon[tau - 1]);
                s2 += inner;
            }
        }
        c.Delta[t] = s1 + 2.0 * s2 + p.varrho * p.varrho * t;
    }

    for (int t = 0; t <= T; ++t) {
        const int nz = t == 0 ? 1 : p.n_zeta;
        const int nc = t == 0 ? 1 : p.n_chi;
        c.chi_grid[t] = symmetric_grid(nc, 3.0 * std::sqrt(c.Upsilon[t]));
        auto lz = symmetric_grid(nz, 3.0 * std::sqrt(c.Delta[t]));
        c.zeta_grid[t].resize(lz.size());
        for (std::size_t i = 0; i < lz.size(); ++i) c.zeta_grid[t][i] = std::exp(lz[i]);
    }

    c.P_chi.resize(T);
    c.P_zeta.resize(T);
    auto check = [&](const double* row, int n) {
        if (n > 1 && *std::max_element(row, row + n) > 0.999) ++c.degenerate_rows;
    };
    for (int t = 0; t < T; ++t) {
        const auto& chi0 = c.chi_grid[t];
        const auto& chi1 = c.chi_grid[t + 1];
        const int nc0 = static_cast<int>(chi0.size()), nc1 = static_cast<int>(chi1.size());
        c.P_chi[t] = Matrix(nc0, nc1);
        for (int j = 0; j < nc0; ++j) {
            tauchen_row(chi1, p.r * chi0[j], p.varsigma, &c.P_chi[t](j, 0));
            check(&c.P_chi[t](j, 0), nc1);
        }
        const auto& z0 = c.zeta_grid[t];
        const auto& z1 = c.zeta_grid[t + 1];
        const int nz0 = static_cast<int>(z0.size()), nz1 = static_cast<int>(z1.size());
        std::vector<double> lz1(z1.size());
        for (std::size_t i = 0; i < z1.size(); ++i) lz1[i] = std::log(z1[i]);
        c.P_zeta[t].resize(nc0);
        for (int j = 0; j < nc0; ++j) {
            Matrix& P = c.P_zeta[t][j];
            P = Matrix(nz0, nz1);
            for (int i = 0; i < nz0; ++i) {
                tauchen_row(lz1, std::log(z0[i]) + chi0[j], p.varrho, &P(i, 0));
                check(&P(i, 0), nz1);
            }
        }
    }
    return c;
}

void write_chain_csv(const ProductivityChain& c, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path);
    out.precision(17);
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "t,from_zeta,from_chi,to_zeta,to_chi,prob\n";
    for (int t = 0; t < c.horizon; ++t) {
        const int nz0 = c.n_zeta(t), nc0 = c.n_chi(t), nz1 = c.n_zeta(t + 1), nc1 = c.n_chi(t + 1);
        for (int i = 0; i < nz0; ++i)
            for (int j = 0; j < nc0; ++j)
                for (int i1 = 0; i1 < nz1; ++i1)
                    for (int j1 = 0; j1 < nc1; ++j1) {
                        const double pr = c.P_zeta[t][j](i, i1) * c.P_chi[t](j, j1);
                        if (pr > 0.0) out << t << ',' << i << ',' << j << ',' << i1 << ',' << j1 << ',' << pr << '\n';
                    }
    }
}

}  // namespace dsice
