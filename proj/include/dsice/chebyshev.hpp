#pragma once

#include <array>
#include <memory>
#include <vector>

#include "dsice/dynamics.hpp"

namespace dsice {

// Approximation box in coordinates (log10 K, M_AT, M_UO, M_LO, T_AT, T_OC).
struct Box6 {
    State6 lo{};
    State6 hi{};

    void validate() const;
    double width(int d) const { return hi[d] - lo[d]; }
    bool contains(const State6& y) const;
    bool operator==(const Box6&) const = default;
    // Largest overshoot beyond the box as a fraction of the width; dimension in `dim`.
    double excursion(const State6& y, int* dim = nullptr) const;
};

// Maps a state to box coordinates and back.
State6 to_coords(const State6& x);
State6 from_coords(const State6& y);

// Complete total-degree Chebyshev basis on [-1, 1]^6.
class ChebyshevBasis {
public:
    explicit ChebyshevBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(terms_.size()); }
    const std::vector<std::array<unsigned char, kStateDim>>& terms() const { return terms_; }

    // Basis values at z in [-1, 1]^6.
    void eval(const State6& z, double* out) const;
    // Values and derivatives; grad is row-major [dim][term].
    void eval_grad(const State6& z, double* out, double* grad) const;
    // Mixed partials d2/dz_d dz_e for every e != d, row-major [e][term]; row d is zero.
    void eval_mixed(const State6& z, int d, double* out) const;

private:
    int degree_;
    std::vector<std::array<unsigned char, kStateDim>> terms_;
};

// Box-normalized coordinate of y in [-1, 1] per dimension (unclamped).
State6 normalize(const State6& y, const Box6& box);

// Chebyshev extrema, cos(pi k / (n-1)), sorted ascending; n = 1 gives {0}.
std::vector<double> chebyshev_extrema(int n);

// Tensor grid of normalized nodes with the given count per dimension, and the
// least-squares projector onto the basis (coefficients = projector * values).
class Fitter {
public:
    Fitter(const ChebyshevBasis& basis, const std::array<int, kStateDim>& counts);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<State6>& nodes() const { return nodes_; }
    const ChebyshevBasis& basis() const { return *basis_; }

    // Least-squares coefficients for node values (size node_count()).
    std::vector<double> fit(const std::vector<double>& values) const;
    // Max absolute residual of a fit at the nodes.
    double max_residual(const std::vector<double>& coeffs, const std::vector<double>& values) const;

private:
    const ChebyshevBasis* basis_;
    std::vector<State6> nodes_;
    std::vector<double> design_;     // node-major, nodes x terms
    std::vector<double> projector_;  // term-major, terms x nodes
};

// Value and box-coordinate gradient of a fitted surface, extended linearly
// outside the box. `grad` (optional) is d/dy in box coordinates (not normalized).
double eval_surface(const ChebyshevBasis& basis, const Box6& box, const double* coeffs, const State6& y,
                    State6* grad = nullptr);

}  // namespace dsice
