#include "dsice/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsice/errors.hpp"

namespace dsice {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? kNaN : s / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

std::size_t max_len(const PathSeries& s) {
    std::size_t n = 0;
    for (const auto& p : s) n = std::max(n, p.size());
    return n;
}

Band band(const std::vector<double>& x) {
    if (x.empty()) return {kNaN, kNaN, kNaN};
    return {quantile(x, 0.5), quantile(x, 0.05), quantile(x, 0.95)};
}

// Lag-1 regression through the origin; false when the regressor has no variance.
bool ar1_fit(const std::vector<double>& d, double& Lambda, double& sigma) {
    const std::size_t n = d.size();
    if (n < 3) return false;
    double sxx = 0.0, sxy = 0.0, scale = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        sxx += d[t] * d[t];
        sxy += d[t] * d[t + 1];
    }
    for (double v : d) scale = std::max(scale, std::abs(v));
    if (!(sxx > 0.0) || !std::isfinite(sxx) || std::sqrt(sxx / static_cast<double>(n - 1)) <= 1e-300 + 1e-15 * scale)
        return false;
    Lambda = sxy / sxx;
    std::vector<double> e(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) e[t] = d[t + 1] - Lambda * d[t];
    sigma = sd_of(e);
    return true;
}

}  // namespace

double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw DomainError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0, 1]");
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double v = x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
    return std::clamp(v, x[lo], x[hi]);
}

Fan quantile_fan(const PathSeries& s) {
    const std::size_t T = max_len(s);
    Fan f;
    f.mean.resize(T);
    f.sd.resize(T);
    f.q.resize(T);
    f.count.resize(T);
    std::vector<double> col;
    for (std::size_t t = 0; t < T; ++t) {
        col.clear();
        for (const auto& p : s)
            if (t < p.size()) col.push_back(p[t]);
        f.count[t] = static_cast<int>(col.size());
        f.mean[t] = mean_of(col);
        f.sd[t] = sd_of(col);
        std::sort(col.begin(), col.end());
        for (std::size_t k = 0; k < kFanLevels.size(); ++k) f.q[t][k] = quantile(col, kFanLevels[k]);
        // All quantiles of a constant sample equal the mean exactly.
        if (col.front() == col.back()) {
            f.mean[t] = col.front();
            f.q[t].fill(col.front());
        }
    }
    return f;
}

ArStats ar1_stats(const PathSeries& s, int window) {
    if (window < 3) throw DomainError("autoregression window needs at least 3 points");
    const std::size_t T = std::min<std::size_t>(max_len(s), static_cast<std::size_t>(window));
    std::vector<double> xbar(T, 0.0);
    std::vector<int> cnt(T, 0);
    for (const auto& p : s)
        for (std::size_t t = 0; t < T && t < p.size(); ++t) {
            xbar[t] += p[t];
            ++cnt[t];
        }
    for (std::size_t t = 0; t < T; ++t) xbar[t] = cnt[t] ? xbar[t] / cnt[t] : 0.0;

    ArStats st;
    std::vector<double> lam, sig, d;
    for (const auto& p : s) {
        const std::size_t n = std::min(T, p.size());
        d.resize(n);
        for (std::size_t t = 0; t < n; ++t) d[t] = p[t] - xbar[t];
        double L = 0.0, sg = 0.0;
        if (ar1_fit(d, L, sg)) {
            lam.push_back(L);
            sig.push_back(sg);
        } else {
            ++st.excluded;
        }
    }
    st.used = static_cast<int>(lam.size());
    if (st.used == 0) {
        st.Lambda_mean = st.Lambda_se = st.sigma_mean = st.sigma_se = kNaN;
        return st;
    }
    st.Lambda_mean = mean_of(lam);
    st.Lambda_se = sd_of(lam);
    st.sigma_mean = mean_of(sig);
    st.sigma_se = sd_of(sig);
    return st;
}

Correlation correlations(const std::vector<std::vector<double>>& vars) {
    const std::size_t k = vars.size();
    Correlation c;
    c.r.assign(k, std::vector<double>(k, kNaN));
    if (k == 0) return c;
    const std::size_t n = vars[0].size();
    for (const auto& v : vars)
        if (v.size() != n) throw DomainError("correlation inputs differ in length");
    if (n < 2) throw DomainError("correlation needs at least 2 observations");
    std::vector<double> m(k), sd(k);
    for (std::size_t i = 0; i < k; ++i) {
        m[i] = mean_of(vars[i]);
        double ss = 0.0;
        for (double x : vars[i]) ss += (x - m[i]) * (x - m[i]);
        sd[i] = std::sqrt(ss);
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (!(sd[i] > 0.0) || !(sd[j] > 0.0)) {
                if (i <= j) ++c.degenerate;
                continue;
            }
            if (i == j) {
                c.r[i][j] = 1.0;
                continue;
            }
            if (j < i) {
                c.r[i][j] = c.r[j][i];
                continue;
            }
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t) s += (vars[i][t] - m[i]) * (vars[j][t] - m[j]);
            c.r[i][j] = std::clamp(s / (sd[i] * sd[j]), -1.0, 1.0);
        }
    }
    return c;
}

GrowthStats growth_stats(const PathSeries& g, int window) {
    std::vector<double> mean, sd, ac1, ac2, lam, sig;
    for (const auto& p : g) {
        const std::size_t n = std::min<std::size_t>(p.size(), static_cast<std::size_t>(window));
        if (n < 4) continue;
        std::vector<double> x(p.begin(), p.begin() + static_cast<long>(n));
        const double m = mean_of(x);
        std::vector<double> d(n);
        double c0 = 0.0, c1 = 0.0, c2 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            d[t] = x[t] - m;
            c0 += d[t] * d[t];
        }
        for (std::size_t t = 0; t + 1 < n; ++t) c1 += d[t] * d[t + 1];
        for (std::size_t t = 0; t + 2 < n; ++t) c2 += d[t] * d[t + 2];
        mean.push_back(m);
        sd.push_back(sd_of(x));
        if (c0 > 0.0) {
            ac1.push_back(c1 / c0);
            ac2.push_back(c2 / c0);
        }
        double L, sg;
        if (ar1_fit(d, L, sg)) {
            lam.push_back(L);
            sig.push_back(sg);
        }
    }
    GrowthStats s;
    s.paths = static_cast<int>(mean.size());
    s.mean = band(mean);
    s.sd = band(sd);
    s.ac1 = band(ac1);
    s.ac2 = band(ac2);
    s.Lambda = band(lam);
    s.sigma_eps = band(sig);
    return s;
}

}  // namespace dsice
