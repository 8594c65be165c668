#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dsice::opt {

struct Options {
    int max_iterations = 200;
    // Converged when max_i |projected gradient_i| * width_i <= gtol * (|f| + fscale).
    double gtol = 1e-10;
    double fscale = 1.0;
    int max_backtracks = 60;
};

template <int N>
struct SmallResult {
    std::array<double, N> x{};
    double f = 0.0;
    std::array<double, N> gradient{};
    double projected_gradient = 0.0;  // scaled, as in the convergence test
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace detail

// Scaled projected-gradient norm for minimization over [lo, hi].
template <int N>
double projected_gradient_norm(const std::array<double, N>& x, const std::array<double, N>& g,
                               const std::array<double, N>& lo, const std::array<double, N>& hi) {
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        double pg = g[i];
        if (x[i] <= lo[i] && pg > 0.0) pg = 0.0;
        if (x[i] >= hi[i] && pg < 0.0) pg = 0.0;
        worst = std::max(worst, std::abs(pg) * (hi[i] - lo[i]));
    }
    return worst;
}

// Bound-constrained minimization with a dense BFGS inverse-Hessian restricted to
// the free variables and a projected Armijo backtracking search. Intended for a
// handful of variables. `fg(x, g)` returns f(x) and writes the gradient into g.
// A non-finite f is treated as infeasible by the line search.
template <int N, class FG>
SmallResult<N> minimize_box(FG&& fg, std::array<double, N> x, const std::array<double, N>& lo,
                            const std::array<double, N>& hi, const Options& opts = {}) {
    SmallResult<N> r;
    for (int i = 0; i < N; ++i) x[i] = detail::clamp(x[i], lo[i], hi[i]);
    std::array<double, N> g{};
    double f = fg(x, g);
    ++r.evaluations;
    if (!std::isfinite(f)) {
        r.x = x;
        r.f = f;
        return r;
    }

    std::array<std::array<double, N>, N> H{};
    bool have_curvature = false;
    auto reset_H = [&](double scale) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) H[i][j] = (i == j) ? scale : 0.0;
    };
    {
        double gmax = 0.0;
        for (int i = 0; i < N; ++i) gmax = std::max(gmax, std::abs(g[i]) / (hi[i] - lo[i]));
        reset_H(gmax > 0.0 ? 0.05 / gmax : 1.0);
    }

    for (r.iterations = 0; r.iterations < opts.max_iterations; ++r.iterations) {
        const double pgn = projected_gradient_norm<N>(x, g, lo, hi);
        if (pgn <= opts.gtol * (std::abs(f) + opts.fscale)) {
            r.converged = true;
            break;
        }
        std::array<bool, N> free{};
        for (int i = 0; i < N; ++i)
            free[i] = !((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0));

        std::array<double, N> d{};
        for (int i = 0; i < N; ++i) {
            if (!free[i]) continue;
            double s = 0.0;
            for (int j = 0; j < N; ++j)
                if (free[j]) s -= H[i][j] * g[j];
            d[i] = s;
        }
        double slope = 0.0;
        for (int i = 0; i < N; ++i) slope += d[i] * g[i];
        if (!(slope < 0.0)) {
            double gmax = 0.0;
            for (int i = 0; i < N; ++i) gmax = std::max(gmax, std::abs(g[i]) / (hi[i] - lo[i]));
            reset_H(gmax > 0.0 ? 0.05 / gmax : 1.0);
            have_curvature = false;
            for (int i = 0; i < N; ++i) d[i] = free[i] ? -H[i][i] * g[i] : 0.0;
        }

        double step = 1.0;
        bool accepted = false;
        std::array<double, N> xn{}, gn{};
        double fn = f;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            double decrease = 0.0;
            bool moved = false;
            for (int i = 0; i < N; ++i) {
                xn[i] = detail::clamp(x[i] + step * d[i], lo[i], hi[i]);
                decrease += g[i] * (xn[i] - x[i]);
                moved = moved || xn[i] != x[i];
            }
            if (!moved) break;
            fn = fg(xn, gn);
            ++r.evaluations;
            if (std::isfinite(fn) && fn <= f + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            // Near the optimum f is flat to rounding; accept if the gradient drops.
            if (std::isfinite(fn) && fn <= f + 1e-13 * (std::abs(f) + opts.fscale) &&
                projected_gradient_norm<N>(xn, gn, lo, hi) < 0.5 * pgn) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (have_curvature) {
                // Retry once along the steepest-descent direction.
                double gmax = 0.0;
                for (int i = 0; i < N; ++i) gmax = std::max(gmax, std::abs(g[i]) / (hi[i] - lo[i]));
                reset_H(gmax > 0.0 ? 0.05 / gmax : 1.0);
                have_curvature = false;
                continue;
            }
            break;
        }

        std::array<double, N> s{}, y{};
        double sy = 0.0, yy = 0.0;
        for (int i = 0; i < N; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
            sy += s[i] * y[i];
            yy += y[i] * y[i];
        }
        x = xn;
        g = gn;
        f = fn;
        if (sy > 1e-300 && yy > 0.0) {
            if (!have_curvature) {
                reset_H(sy / yy);
                have_curvature = true;
            }
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rho = 1.0 / sy;
            std::array<double, N> Hy{};
            double yHy = 0.0;
            for (int i = 0; i < N; ++i) {
                for (int j = 0; j < N; ++j) Hy[i] += H[i][j] * y[j];
                yHy += y[i] * Hy[i];
            }
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    H[i][j] += (1.0 + rho * yHy) * rho * s[i] * s[j] - rho * (Hy[i] * s[j] + s[i] * Hy[j]);
        }
    }
    r.x = x;
    r.f = f;
    r.gradient = g;
    r.projected_gradient = projected_gradient_norm<N>(x, g, lo, hi);
    if (!r.converged) r.converged = r.projected_gradient <= opts.gtol * (std::abs(f) + opts.fscale);
    return r;
}

// ---------------------------------------------------------------------------

struct Result {
    std::vector<double> x;
    double f = 0.0;
    std::vector<double> gradient;
    double projected_gradient = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

using ValueGradient = std::function<double(std::span<const double>, std::span<double>)>;
using Value = std::function<double(std::span<const double>)>;

struct LbfgsOptions {
    int max_iterations = 5000;
    int memory = 12;
    // Converged when max_i |projected gradient_i| * scale_i <= gtol * (|f| + fscale).
    double gtol = 1e-10;
    double fscale = 1.0;
    // Stop early when the relative objective change stays below ftol for 20 iterations.
    double ftol = 0.0;
};

// Projected limited-memory BFGS for box-constrained minimization.
Result minimize_lbfgs_box(const ValueGradient& fg, std::vector<double> x0,
                          const std::vector<double>& lo, const std::vector<double>& hi,
                          const LbfgsOptions& opts = {});

struct NelderMeadOptions {
    int max_evaluations = 20000;
    double ftol = 1e-22;  // absolute spread of simplex values
    double xtol = 1e-12;  // relative simplex diameter
    int restarts = 4;     // re-initialize the simplex around the best point
};

// Unconstrained Nelder-Mead with adaptive coefficients. `step` sets the initial
// simplex edge per coordinate.
Result nelder_mead(const Value& f, std::vector<double> x0, std::vector<double> step,
                   const NelderMeadOptions& opts = {});

}  // namespace dsice::opt
