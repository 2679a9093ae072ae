#include "mterm/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mterm/kernels.hpp"

namespace mterm {

namespace {

constexpr double kRankTol = 1e-12;  // relative to the largest column norm

// Two-pass modified Gram-Schmidt of v against the orthonormal columns in q
// (nq columns of length n, stored contiguously).  Writes the projection
// coefficients gamma (accumulated over both passes) when gamma != nullptr.
void mgs_project(const double* q, std::size_t nq, std::size_t n, double* v,
                 double* gamma) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < nq; ++j) {
            const double* qj = q + j * n;
            double c = kernels::dot(qj, v, n);
            kernels::axpy(-c, qj, v, n);
            if (gamma) gamma[j] += c;
        }
    }
}

}  // namespace

double dist_to_span_value(const Vec& x, const std::vector<const Vec*>& vectors) {
    const std::size_t n = x.dim();
    const std::size_t k = vectors.size();
    std::vector<double> q;  // orthonormal columns
    q.reserve(n * k);
    std::vector<double> work(n);
    double max_norm = 0.0;
    std::size_t nq = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const Vec& vj = *vectors[j];
        if (vj.dim() != n)
            throw std::invalid_argument("dist_to_span: dimension mismatch");
        std::copy(vj.data(), vj.data() + n, work.begin());
        double col_norm = std::sqrt(kernels::nrm2sq(work.data(), n));
        max_norm = std::max(max_norm, col_norm);
        mgs_project(q.data(), nq, n, work.data(), nullptr);
        double rnorm = std::sqrt(kernels::nrm2sq(work.data(), n));
        if (rnorm > kRankTol * std::max(max_norm, 1e-300)) {
            kernels::scal(1.0 / rnorm, work.data(), n);
            q.insert(q.end(), work.begin(), work.begin() + n);
            ++nq;
        }
    }
    std::vector<double> r(x.data(), x.data() + n);
    mgs_project(q.data(), nq, n, r.data(), nullptr);
    return std::sqrt(kernels::nrm2sq(r.data(), n));
}

LstsqResult dist_to_span(const Vec& x, const std::vector<Vec>& vectors) {
    const std::size_t n = x.dim();
    const std::size_t k = vectors.size();
    LstsqResult out;
    out.coeffs.assign(k, 0.0);

    // MGS with column tracking: R upper triangular over surviving columns.
    std::vector<double> q;
    std::vector<std::vector<double>> rcols(k);  // R entries per input column
    std::vector<bool> survived(k, false);
    std::vector<std::size_t> pivot;             // input index per Q column
    std::vector<double> work(n);
    double max_norm = 0.0;
    std::size_t nq = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const Vec& vj = vectors[j];
        if (vj.dim() != n)
            throw std::invalid_argument("dist_to_span: dimension mismatch");
        std::copy(vj.data(), vj.data() + n, work.begin());
        double col_norm = std::sqrt(kernels::nrm2sq(work.data(), n));
        max_norm = std::max(max_norm, col_norm);
        rcols[j].assign(nq, 0.0);
        mgs_project(q.data(), nq, n, work.data(), rcols[j].data());
        double rnorm = std::sqrt(kernels::nrm2sq(work.data(), n));
        if (rnorm > kRankTol * std::max(max_norm, 1e-300)) {
            kernels::scal(1.0 / rnorm, work.data(), n);
            q.insert(q.end(), work.begin(), work.begin() + n);
            rcols[j].push_back(rnorm);
            survived[j] = true;
            pivot.push_back(j);
            ++nq;
        }
    }
    out.rank = nq;

    std::vector<double> gamma(nq, 0.0);
    std::vector<double> r(x.data(), x.data() + n);
    mgs_project(q.data(), nq, n, r.data(), gamma.data());
    out.distance = std::sqrt(kernels::nrm2sq(r.data(), n));

    if (nq == k) {
        // Full rank: back-substitute R c = gamma.
        for (std::size_t jj = k; jj-- > 0;) {
            double s = gamma[jj];
            for (std::size_t j2 = jj + 1; j2 < k; ++j2)
                s -= rcols[j2][jj] * out.coeffs[j2];
            out.coeffs[jj] = s / rcols[jj][jj];
        }
        return out;
    }

    // Rank deficient: minimum-norm coefficients via SVD pseudo-inverse.
    if (k > 0) {
        ColMatrix A(n, k);
        for (std::size_t j = 0; j < k; ++j)
            std::copy(vectors[j].data(), vectors[j].data() + n, A.col(j));
        SvdResult s = svd(A);
        double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
        for (std::size_t t = 0; t < s.sigma.size(); ++t) {
            if (s.sigma[t] <= kRankTol * std::max(smax, 1e-300)) continue;
            double c = kernels::dot(s.u.col(t), x.data(), n) / s.sigma[t];
            kernels::axpy(c, s.v.col(t), out.coeffs.data(), k);
        }
        // Recompute the residual from the coefficients for consistency.
        std::vector<double> res(x.data(), x.data() + n);
        for (std::size_t j = 0; j < k; ++j)
            kernels::axpy(-out.coeffs[j], vectors[j].data(), res.data(), n);
        out.distance = std::min(out.distance,
                                std::sqrt(kernels::nrm2sq(res.data(), n)));
    }
    return out;
}

Subspace orthonormalize(std::size_t ambient_dim, const std::vector<Vec>& vectors) {
    Subspace s;
    s.ambient_dim = ambient_dim;
    std::vector<double> q;
    std::vector<double> work(ambient_dim);
    double max_norm = 0.0;
    std::size_t nq = 0;
    for (const Vec& v : vectors) {
        if (v.dim() != ambient_dim)
            throw std::invalid_argument("orthonormalize: dimension mismatch");
        std::copy(v.data(), v.data() + ambient_dim, work.begin());
        double col_norm = std::sqrt(kernels::nrm2sq(work.data(), ambient_dim));
        max_norm = std::max(max_norm, col_norm);
        mgs_project(q.data(), nq, ambient_dim, work.data(), nullptr);
        double rnorm = std::sqrt(kernels::nrm2sq(work.data(), ambient_dim));
        if (rnorm > kRankTol * std::max(max_norm, 1e-300)) {
            kernels::scal(1.0 / rnorm, work.data(), ambient_dim);
            q.insert(q.end(), work.begin(), work.begin() + ambient_dim);
            ++nq;
        }
    }
    s.basis.reserve(nq);
    for (std::size_t j = 0; j < nq; ++j) {
        Vec b(ambient_dim);
        std::copy(q.begin() + j * ambient_dim, q.begin() + (j + 1) * ambient_dim,
                  b.data());
        s.basis.push_back(std::move(b));
    }
    return s;
}

double subspace_gap(const Subspace& U, const Subspace& V) {
    if (U.ambient_dim != V.ambient_dim)
        throw std::invalid_argument("subspace_gap: ambient dimension mismatch");
    if (U.dim() != V.dim())
        throw std::invalid_argument("subspace_gap: subspace dimensions differ");
    const std::size_t n = U.ambient_dim;
    const std::size_t p = U.dim();
    if (p == 0) return 0.0;

    // Residual of U's basis after projecting onto V; its largest singular
    // value is sin of the largest principal angle.  Stable near 0, where the
    // cos-based route loses all accuracy.
    ColMatrix B(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        std::copy(U.basis[j].data(), U.basis[j].data() + n, B.col(j));
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < p; ++i) {
                double c = kernels::dot(V.basis[i].data(), B.col(j), n);
                kernels::axpy(-c, V.basis[i].data(), B.col(j), n);
            }
        }
    }
    std::vector<double> sig = singular_values(B);
    double g = sig.empty() ? 0.0 : sig.front();
    return std::clamp(g, 0.0, 1.0);
}

SvdResult svd(const ColMatrix& A) {
    // Work on the taller orientation so columns are the short side.
    const bool transposed = A.rows < A.cols;
    const std::size_t n = transposed ? A.cols : A.rows;  // rows of W
    const std::size_t k = transposed ? A.rows : A.cols;  // cols of W
    ColMatrix W(n, k);
    for (std::size_t j = 0; j < A.cols; ++j)
        for (std::size_t i = 0; i < A.rows; ++i) {
            if (transposed)
                W.at(j, i) = A.at(i, j);
            else
                W.at(i, j) = A.at(i, j);
        }

    ColMatrix V(k, k);
    for (std::size_t j = 0; j < k; ++j) V.at(j, j) = 1.0;

    // One-sided Jacobi: rotate column pairs until all are orthogonal.
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q2 = p + 1; q2 < k; ++q2) {
                double app = kernels::nrm2sq(W.col(p), n);
                double aqq = kernels::nrm2sq(W.col(q2), n);
                double apq = kernels::dot(W.col(p), W.col(q2), n);
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) ||
                    apq == 0.0)
                    continue;
                rotated = true;
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0)
                               ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                               : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    double wp = W.at(i, p), wq = W.at(i, q2);
                    W.at(i, p) = c * wp - s * wq;
                    W.at(i, q2) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    double vp = V.at(i, p), vq = V.at(i, q2);
                    V.at(i, p) = c * vp - s * vq;
                    V.at(i, q2) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    // Singular values = column norms; sort descending.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> norms(k);
    for (std::size_t j = 0; j < k; ++j)
        norms[j] = std::sqrt(kernels::nrm2sq(W.col(j), n));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    SvdResult out;
    out.sigma.resize(k);
    ColMatrix Us(n, k), Vs(k, k);
    for (std::size_t t = 0; t < k; ++t) {
        std::size_t j = order[t];
        out.sigma[t] = norms[j];
        if (norms[j] > 0.0) {
            for (std::size_t i = 0; i < n; ++i) Us.at(i, t) = W.at(i, j) / norms[j];
        }
        for (std::size_t i = 0; i < k; ++i) Vs.at(i, t) = V.at(i, j);
    }
    if (transposed) {
        out.u = std::move(Vs);  // rows(A) x k
        out.v = std::move(Us);  // cols(A) x k
    } else {
        out.u = std::move(Us);
        out.v = std::move(Vs);
    }
    return out;
}

std::vector<double> singular_values(const ColMatrix& A) {
    return svd(A).sigma;
}

}  // namespace mterm
