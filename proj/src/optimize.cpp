#include "dsice/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace dsice::opt {

namespace {

double projected_norm(const std::vector<double>& x, const std::vector<double>& g,
                      const std::vector<double>& lo, const std::vector<double>& hi) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pg = g[i];
        if (x[i] <= lo[i] && pg > 0.0) pg = 0.0;
        if (x[i] >= hi[i] && pg < 0.0) pg = 0.0;
        const double w = std::isfinite(hi[i] - lo[i]) ? (hi[i] - lo[i]) : 1.0;
        worst = std::max(worst, std::abs(pg) * w);
    }
    return worst;
}

}  // namespace

Result minimize_lbfgs_box(const ValueGradient& fg, std::vector<double> x,
                          const std::vector<double>& lo, const std::vector<double>& hi,
                          const LbfgsOptions& opts) {
    const std::size_t n = x.size();
    Result r;
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    std::vector<double> g(n), xn(n), gn(n), d(n);
    double f = fg(x, g);
    ++r.evaluations;
    if (!std::isfinite(f)) {
        r.x = x;
        r.f = f;
        r.message = "non-finite objective at start";
        return r;
    }

    std::deque<std::vector<double>> S, Y;
    std::deque<double> rho;
    int stalled = 0;

    for (r.iterations = 0; r.iterations < opts.max_iterations; ++r.iterations) {
        const double pgn = projected_norm(x, g, lo, hi);
        if (pgn <= opts.gtol * (std::abs(f) + opts.fscale)) {
            r.converged = true;
            r.message = "gradient tolerance";
            break;
        }
        std::vector<char> fixed(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            fixed[i] = (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0);

        // Two-loop recursion on the free subspace.
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = fixed[i] ? 0.0 : g[i];
        const std::size_t m = S.size();
        std::vector<double> alpha(m);
        for (std::size_t k = m; k-- > 0;) {
            double a = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!fixed[i]) a += S[k][i] * q[i];
            a *= rho[k];
            alpha[k] = a;
            for (std::size_t i = 0; i < n; ++i)
                if (!fixed[i]) q[i] -= a * Y[k][i];
        }
        double gamma;
        if (m > 0) {
            const double yy = std::inner_product(Y.back().begin(), Y.back().end(), Y.back().begin(), 0.0);
            gamma = 1.0 / (rho.back() * yy);
        } else {
            double gmax = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!fixed[i]) gmax = std::max(gmax, std::abs(g[i]));
            gamma = gmax > 0.0 ? 0.01 / gmax : 1.0;
        }
        for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
        for (std::size_t k = 0; k < m; ++k) {
            double b = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!fixed[i]) b += Y[k][i] * q[i];
            b *= rho[k];
            for (std::size_t i = 0; i < n; ++i)
                if (!fixed[i]) q[i] += S[k][i] * (alpha[k] - b);
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = fixed[i] ? 0.0 : -q[i];
            slope += d[i] * g[i];
        }
        if (!(slope < 0.0)) {
            S.clear();
            Y.clear();
            rho.clear();
            double gmax = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!fixed[i]) gmax = std::max(gmax, std::abs(g[i]));
            for (std::size_t i = 0; i < n; ++i) d[i] = fixed[i] ? 0.0 : -g[i] * 0.01 / gmax;
        }

        double step = 1.0;
        bool accepted = false;
        double fn = f;
        for (int bt = 0; bt < 60; ++bt) {
            double decrease = 0.0;
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i) {
                xn[i] = std::clamp(x[i] + step * d[i], lo[i], hi[i]);
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
            step *= 0.5;
        }
        if (!accepted) {
            if (!S.empty()) {
                S.clear();
                Y.clear();
                rho.clear();
                continue;
            }
            r.message = "line search failed";
            break;
        }
        std::vector<double> s(n), y(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
            sy += s[i] * y[i];
        }
        const double fold = f;
        x.swap(xn);
        g.swap(gn);
        f = fn;
        if (sy > 1e-300) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        if (opts.ftol > 0.0) {
            if (std::abs(fold - f) <= opts.ftol * (std::abs(f) + opts.fscale)) {
                if (++stalled >= 20) {
                    r.converged = true;
                    r.message = "objective stalled";
                    break;
                }
            } else {
                stalled = 0;
            }
        }
    }
    if (r.message.empty()) r.message = "iteration limit";
    r.x = x;
    r.f = f;
    r.gradient = g;
    r.projected_gradient = projected_norm(x, g, lo, hi);
    return r;
}

Result nelder_mead(const Value& f, std::vector<double> x0, std::vector<double> step,
                   const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 1.0 / (2.0 * dn),
                 delta = 1.0 - 1.0 / dn;
    Result r;
    std::vector<double> best = x0;
    double fbest = f(best);
    ++r.evaluations;

    for (int round = 0; round <= opts.restarts && r.evaluations < opts.max_evaluations; ++round) {
        std::vector<std::vector<double>> P(n + 1, best);
        std::vector<double> F(n + 1, fbest);
        for (std::size_t i = 0; i < n; ++i) {
            P[i + 1][i] += step[i];
            F[i + 1] = f(P[i + 1]);
            ++r.evaluations;
        }
        std::vector<std::size_t> idx(n + 1);
        bool local_converged = false;
        while (r.evaluations < opts.max_evaluations) {
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                const double fa = std::isfinite(F[a]) ? F[a] : INFINITY;
                const double fb = std::isfinite(F[b]) ? F[b] : INFINITY;
                return fa < fb;
            });
            const std::size_t lo = idx.front(), hi = idx.back(), nh = idx[n - 1];
            double diam = 0.0, scale = 0.0;
            for (std::size_t k = 0; k <= n; ++k)
                for (std::size_t i = 0; i < n; ++i) {
                    diam = std::max(diam, std::abs(P[k][i] - P[lo][i]));
                    scale = std::max(scale, std::abs(P[lo][i]));
                }
            if (std::abs(F[hi] - F[lo]) <= opts.ftol && diam <= opts.xtol * std::max(scale, 1e-300)) {
                local_converged = true;
                break;
            }
            if (diam <= opts.xtol * std::max(scale, 1e-300) * 1e-3) {
                local_converged = true;
                break;
            }
            std::vector<double> c(n, 0.0);
            for (std::size_t k = 0; k <= n; ++k)
                if (k != hi)
                    for (std::size_t i = 0; i < n; ++i) c[i] += P[k][i] / dn;
            auto along = [&](double t) {
                std::vector<double> p(n);
                for (std::size_t i = 0; i < n; ++i) p[i] = c[i] + t * (P[hi][i] - c[i]);
                return p;
            };
            auto eval = [&](const std::vector<double>& p) {
                ++r.evaluations;
                const double v = f(p);
                return std::isfinite(v) ? v : INFINITY;
            };
            std::vector<double> xr = along(-alpha);
            const double fr = eval(xr);
            if (fr < F[lo]) {
                std::vector<double> xe = along(-alpha * beta);
                const double fe = eval(xe);
                if (fe < fr) {
                    P[hi] = xe;
                    F[hi] = fe;
                } else {
                    P[hi] = xr;
                    F[hi] = fr;
                }
                continue;
            }
            if (fr < F[nh]) {
                P[hi] = xr;
                F[hi] = fr;
                continue;
            }
            const bool outside = fr < F[hi];
            std::vector<double> xc = along(outside ? -alpha * gamma : gamma);
            const double fc = eval(xc);
            if (fc < (outside ? fr : F[hi])) {
                P[hi] = xc;
                F[hi] = fc;
                continue;
            }
            for (std::size_t k = 0; k <= n; ++k) {
                if (k == lo) continue;
                for (std::size_t i = 0; i < n; ++i) P[k][i] = P[lo][i] + delta * (P[k][i] - P[lo][i]);
                F[k] = eval(P[k]);
            }
        }
        const std::size_t b =
            static_cast<std::size_t>(std::min_element(F.begin(), F.end()) - F.begin());
        const bool improved = F[b] < fbest;
        if (F[b] <= fbest) {
            best = P[b];
            fbest = F[b];
        }
        r.converged = local_converged;
        if (round > 0 && !improved && local_converged) break;
        // Shrink the restart simplex to the scale of the current solution.
        for (std::size_t i = 0; i < n; ++i)
            step[i] = std::max(std::abs(step[i]) * 0.1, 1e-6 * std::max(std::abs(best[i]), 1e-12));
    }
    r.x = best;
    r.f = fbest;
    r.message = r.converged ? "converged" : "evaluation limit";
    return r;
}

}  // namespace dsice::opt
