#pragma once

#include <cstddef>
#include <vector>

#include "mterm/vec.hpp"

namespace mterm {

// Orthonormal basis of a linear subspace of R^{ambient_dim}.
struct Subspace {
    std::size_t ambient_dim = 0;
    std::vector<Vec> basis;  // orthonormal

    std::size_t dim() const { return basis.size(); }
};

struct LstsqResult {
    double distance = 0.0;           // |x - sum_j coeffs[j] * v_j|
    std::vector<double> coeffs;      // one per input vector
    std::size_t rank = 0;            // numerical rank of the span
};

// Distance from x to span{vectors} together with minimizing coefficients.
// Solved by modified Gram-Schmidt with reorthogonalization; on rank
// deficiency (relative tolerance 1e-12) the coefficients are recomputed as
// the minimum-norm solution via SVD.  An empty vector list gives
// distance = |x|.
LstsqResult dist_to_span(const Vec& x, const std::vector<Vec>& vectors);

// Distance only, no coefficients; same algorithm, allocation-light.
double dist_to_span_value(const Vec& x, const std::vector<const Vec*>& vectors);

// Orthonormal basis of span{vectors}; near-dependent directions (relative
// tolerance 1e-12) are dropped.
Subspace orthonormalize(std::size_t ambient_dim, const std::vector<Vec>& vectors);

// sin of the largest principal angle between two subspaces of equal
// dimension; 0 iff they coincide, 1 iff some direction of U is orthogonal
// to all of V.  Throws on unequal dimensions or ambient mismatch.
double subspace_gap(const Subspace& U, const Subspace& V);

// Thin dense matrix in column-major order, used by the SVD.
struct ColMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // rows*cols, column j at a[j*rows]

    ColMatrix() = default;
    ColMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double* col(std::size_t j) { return a.data() + j * rows; }
    const double* col(std::size_t j) const { return a.data() + j * rows; }
    double& at(std::size_t i, std::size_t j) { return a[j * rows + i]; }
    double at(std::size_t i, std::size_t j) const { return a[j * rows + i]; }
};

struct SvdResult {
    // A = U * diag(sigma) * V^T with sigma sorted descending.
    ColMatrix u;                 // rows x k
    ColMatrix v;                 // cols x k
    std::vector<double> sigma;   // k = min(rows, cols)
};

// One-sided Jacobi SVD.  Intended for the small dense problems in this
// project (dimensions up to a few dozen); accurate to ~eps * sigma_max.
SvdResult svd(const ColMatrix& A);

// Singular values only, descending.
std::vector<double> singular_values(const ColMatrix& A);

}  // namespace mterm
