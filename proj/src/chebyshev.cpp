#include "dsice/chebyshev.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dsice/errors.hpp"

namespace dsice {

void Box6::validate() const {
    for (int d = 0; d < kStateDim; ++d)
        if (!(lo[d] < hi[d]))
            throw ValidationError(std::string("box is empty in dimension ") + dim_name(d));
}

bool Box6::contains(const State6& y) const {
    for (int d = 0; d < kStateDim; ++d)
        if (y[d] < lo[d] || y[d] > hi[d]) return false;
    return true;
}

double Box6::excursion(const State6& y, int* dim) const {
    double worst = 0.0;
    for (int d = 0; d < kStateDim; ++d) {
        const double over = std::max({lo[d] - y[d], y[d] - hi[d], 0.0}) / width(d);
        if (over > worst) {
            worst = over;
            if (dim) *dim = d;
        }
    }
    return worst;
}

State6 to_coords(const State6& x) {
    State6 y = x;
    y[Dim::K] = std::log10(x[Dim::K]);
    return y;
}

State6 from_coords(const State6& y) {
    State6 x = y;
    x[Dim::K] = std::pow(10.0, y[Dim::K]);
    return x;
}

State6 normalize(const State6& y, const Box6& box) {
    State6 z{};
    for (int d = 0; d < kStateDim; ++d) z[d] = 2.0 * (y[d] - box.lo[d]) / box.width(d) - 1.0;
    return z;
}

ChebyshevBasis::ChebyshevBasis(int degree) : degree_(degree) {
    if (degree < 0 || degree > 12) throw ValidationError("polynomial degree must lie in [0, 12]");
    // Graded order: total degree ascending, then lexicographic.
    for (int total = 0; total <= degree; ++total) {
        std::array<unsigned char, kStateDim> a{};
        auto rec = [&](auto&& self, int d, int left) -> void {
            if (d == kStateDim - 1) {
                a[d] = static_cast<unsigned char>(left);
                terms_.push_back(a);
                return;
            }
            for (int k = left; k >= 0; --k) {
                a[d] = static_cast<unsigned char>(k);
                self(self, d + 1, left - k);
            }
        };
        rec(rec, 0, total);
    }
}

namespace {

constexpr int kMaxDeg = 13;

void cheb_values(double z, int deg, double* T) {
    T[0] = 1.0;
    if (deg >= 1) T[1] = z;
    for (int k = 2; k <= deg; ++k) T[k] = 2.0 * z * T[k - 1] - T[k - 2];
}

// dT_k/dz via T'_k = 2 T_{k-1} + (k / (k - 2)) T'_{k-2}.
void cheb_derivs(const double* T, int deg, double* dT) {
    dT[0] = 0.0;
    if (deg >= 1) dT[1] = 1.0;
    if (deg >= 2) dT[2] = 4.0 * T[1];
    for (int k = 3; k <= deg; ++k) dT[k] = 2.0 * k * T[k - 1] + k * dT[k - 2] / (k - 2);
}

}  // namespace

void ChebyshevBasis::eval(const State6& z, double* out) const {
    double T[kStateDim][kMaxDeg];
    for (int d = 0; d < kStateDim; ++d) cheb_values(z[d], degree_, T[d]);
    const std::size_t n = terms_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = terms_[k];
        out[k] = T[0][a[0]] * T[1][a[1]] * T[2][a[2]] * T[3][a[3]] * T[4][a[4]] * T[5][a[5]];
    }
}

void ChebyshevBasis::eval_grad(const State6& z, double* out, double* grad) const {
    double T[kStateDim][kMaxDeg], dT[kStateDim][kMaxDeg];
    for (int d = 0; d < kStateDim; ++d) {
        cheb_values(z[d], degree_, T[d]);
        cheb_derivs(T[d], degree_, dT[d]);
    }
    const std::size_t n = terms_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = terms_[k];
        // Prefix and suffix products give each leave-one-out product.
        double pre[kStateDim + 1], suf[kStateDim + 1];
        pre[0] = 1.0;
        for (int d = 0; d < kStateDim; ++d) pre[d + 1] = pre[d] * T[d][a[d]];
        suf[kStateDim] = 1.0;
        for (int d = kStateDim - 1; d >= 0; --d) suf[d] = suf[d + 1] * T[d][a[d]];
        out[k] = pre[kStateDim];
        for (int d = 0; d < kStateDim; ++d) grad[d * n + k] = pre[d] * dT[d][a[d]] * suf[d + 1];
    }
}

void ChebyshevBasis::eval_mixed(const State6& z, int d, double* out) const {
    double T[kStateDim][kMaxDeg], dT[kStateDim][kMaxDeg];
    for (int e = 0; e < kStateDim; ++e) {
        cheb_values(z[e], degree_, T[e]);
        cheb_derivs(T[e], degree_, dT[e]);
    }
    const std::size_t n = terms_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = terms_[k];
        out[d * n + k] = 0.0;
        for (int e = 0; e < kStateDim; ++e) {
            if (e == d) continue;
            double p = 1.0;
            for (int f = 0; f < kStateDim; ++f) p *= (f == d || f == e) ? dT[f][a[f]] : T[f][a[f]];
            out[e * n + k] = p;
        }
    }
}

std::vector<double> chebyshev_extrema(int n) {
    if (n < 1) throw ValidationError("node count must be positive");
    if (n == 1) return {0.0};
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) x[k] = -std::cos(std::numbers::pi * k / (n - 1));
    for (int k = 0; k < n / 2; ++k) x[n - 1 - k] = -x[k];
    if (n % 2 == 1) x[n / 2] = 0.0;
    return x;
}

Fitter::Fitter(const ChebyshevBasis& basis, const std::array<int, kStateDim>& counts) : basis_(&basis) {
    std::array<std::vector<double>, kStateDim> axes;
    for (int d = 0; d < kStateDim; ++d) {
        if (counts[d] < basis.degree() + 1)
            throw ValidationError(std::string("node count in ") + dim_name(d) + " must be at least degree + 1");
        axes[d] = chebyshev_extrema(counts[d]);
    }
    std::array<int, kStateDim> idx{};
    while (true) {
        State6 z{};
        for (int d = 0; d < kStateDim; ++d) z[d] = axes[d][idx[d]];
        nodes_.push_back(z);
        int d = kStateDim - 1;
        while (d >= 0 && ++idx[d] == counts[d]) idx[d--] = 0;
        if (d < 0) break;
    }
    const int m = node_count(), n = basis.size();
    design_.resize(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i) basis.eval(nodes_[i], &design_[static_cast<std::size_t>(i) * n]);

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        design_.data(), m, n);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < n) throw NumericalError("fitting design matrix is rank deficient");
    // A Pi = Q R, so the projector is Pi R^{-1} Q^T with the thin Q.
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd RinvQt = R.triangularView<Eigen::Upper>().solve(Q.transpose());
    const Eigen::MatrixXd P = qr.colsPermutation() * RinvQt;
    projector_.resize(static_cast<std::size_t>(n) * m);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m; ++i) projector_[static_cast<std::size_t>(k) * m + i] = P(k, i);
}

std::vector<double> Fitter::fit(const std::vector<double>& values) const {
    const int m = node_count(), n = basis_->size();
    if (static_cast<int>(values.size()) != m) throw NumericalError("fit: value count mismatch");
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        const double* row = &projector_[static_cast<std::size_t>(k) * m];
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += row[i] * values[i];
        c[k] = s;
    }
    return c;
}

double Fitter::max_residual(const std::vector<double>& coeffs, const std::vector<double>& values) const {
    const int m = node_count(), n = basis_->size();
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        const double* row = &design_[static_cast<std::size_t>(i) * n];
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += row[k] * coeffs[k];
        worst = std::max(worst, std::abs(s - values[i]));
    }
    return worst;
}

double eval_surface(const ChebyshevBasis& basis, const Box6& box, const double* coeffs, const State6& y,
                    State6* grad) {
    State6 z = normalize(y, box);
    State6 off{};
    bool outside = false;
    for (int d = 0; d < kStateDim; ++d) {
        const double c = std::clamp(z[d], -1.0, 1.0);
        off[d] = z[d] - c;
        outside = outside || off[d] != 0.0;
        z[d] = c;
    }
    const int n = basis.size();
    thread_local std::vector<double> B, G;
    B.resize(n);
    if (!outside && grad == nullptr) {
        basis.eval(z, B.data());
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += B[k] * coeffs[k];
        return v;
    }
    G.resize(static_cast<std::size_t>(n) * kStateDim);
    basis.eval_grad(z, B.data(), G.data());
    double v = 0.0;
    for (int k = 0; k < n; ++k) v += B[k] * coeffs[k];
    State6 gz{};
    for (int d = 0; d < kStateDim; ++d) {
        double s = 0.0;
        const double* g = &G[static_cast<std::size_t>(d) * n];
        for (int k = 0; k < n; ++k) s += g[k] * coeffs[k];
        gz[d] = s;
        v += s * off[d];
    }
    if (grad) {
        // Unclamped directions also move the extrapolation slopes.
        thread_local std::vector<double> Hm;
        Hm.resize(static_cast<std::size_t>(n) * kStateDim);
        for (int d = 0; d < kStateDim; ++d) {
            if (off[d] == 0.0) continue;
            basis.eval_mixed(z, d, Hm.data());
            for (int e = 0; e < kStateDim; ++e) {
                if (off[e] != 0.0) continue;
                const double* h = &Hm[static_cast<std::size_t>(e) * n];
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += h[k] * coeffs[k];
                gz[e] += off[d] * s;
            }
        }
        for (int d = 0; d < kStateDim; ++d) (*grad)[d] = gz[d] * 2.0 / box.width(d);
    }
    return v;
}

}  // namespace dsice
