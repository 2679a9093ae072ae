#include "mterm/builders.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mterm/combos.hpp"
#include "mterm/numcore.hpp"
#include "mterm/rng.hpp"

namespace mterm {

namespace {

std::string subset_name(const std::vector<std::size_t>& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out;
}

}  // namespace

Dictionary standard_basis(std::size_t n) {
    if (n == 0) throw std::invalid_argument("standard_basis: n must be positive");
    Dictionary d;
    d.ambient_dim = n;
    for (std::size_t i = 0; i < n; ++i) {
        d.atoms.push_back(Vec::axis(n, i));
        d.labels.push_back("e" + std::to_string(i));
    }
    d.spanning = true;
    d.meta = {{"builder", "std"}, {"n", n}};
    return d;
}

ExactRealization exact_deviation_dict(const std::vector<double>& d) {
    if (d.empty())
        throw std::invalid_argument("exact_deviation_dict: empty target");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0))
            throw std::invalid_argument(
                "exact_deviation_dict: entries must be positive");
        if (i > 0 && !(d[i] < d[i - 1]))
            throw std::invalid_argument(
                "exact_deviation_dict: entries must be strictly decreasing");
    }
    const std::size_t n1 = d.size();  // N+1 values d_0..d_N
    // u_n = sqrt(d_n^2 - d_{n+1}^2), d_{N+1} = 0.
    std::vector<double> u(n1);
    for (std::size_t n = 0; n < n1; ++n) {
        double next = (n + 1 < n1) ? d[n + 1] : 0.0;
        u[n] = std::sqrt(d[n] * d[n] - next * next);
    }

    ExactRealization out;
    out.prescribed = d;
    out.dict.ambient_dim = n1;
    out.dict.atoms.push_back(Vec::axis(n1, 0));
    out.dict.labels.push_back("g0");
    for (std::size_t n = 1; n < n1; ++n) {
        Vec g(n1);
        g[n - 1] = u[n];
        g[n] = -u[n - 1];
        out.dict.atoms.push_back(g.normalized());
        out.dict.labels.push_back("g" + std::to_string(n));
    }
    out.dict.spanning = true;
    out.dict.meta = {{"builder", "exact"}, {"target", d}};

    Vec x(n1);
    for (std::size_t n = 0; n < n1; ++n) x[n] = u[n];
    out.target = std::move(x);
    return out;
}

std::vector<Vec> block_atoms(const Vec& s, const std::vector<Vec>& h_basis,
                             double eps) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("block_atoms: eps must be in (0, 1/2)");
    if (std::abs(s.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("block_atoms: s must be unit");
    const std::size_t n = h_basis.size();
    if (n == 0) throw std::invalid_argument("block_atoms: empty h_basis");
    for (const Vec& h : h_basis) {
        if (std::abs(h.norm() - 1.0) > 1e-10 || std::abs(inner(h, s)) > 1e-10)
            throw std::invalid_argument(
                "block_atoms: h_basis must be orthonormal and orthogonal to s");
    }
    std::vector<Vec> g;
    g.reserve(n + 1);
    Vec sum(s.dim());
    for (const Vec& h : h_basis) sum += h;
    double c = std::sqrt(static_cast<double>(n) * (1.0 - eps * eps) + eps * eps);
    Vec g0 = std::sqrt(1.0 - eps * eps) * sum + eps * s;
    g0 *= 1.0 / c;
    g.push_back(std::move(g0));
    for (const Vec& h : h_basis) g.push_back(h);
    return g;
}

std::vector<Vec> block_basis(std::size_t m, double eps, const Vec& s) {
    if (m == 0) throw std::invalid_argument("block_basis: m must be positive");
    if (s.dim() != m + 1)
        throw std::invalid_argument("block_basis: s must live in R^{m+1}");
    // Orthonormal basis of the complement of s: Gram-Schmidt the coordinate
    // axes against s, skipping the axis most collinear with s.
    std::size_t skip = 0;
    for (std::size_t i = 1; i < m + 1; ++i)
        if (std::abs(s[i]) > std::abs(s[skip])) skip = i;
    std::vector<Vec> gen;
    gen.push_back(s);
    for (std::size_t i = 0; i < m + 1; ++i)
        if (i != skip) gen.push_back(Vec::axis(m + 1, i));
    Subspace full = orthonormalize(m + 1, gen);
    if (full.dim() != m + 1)
        throw std::invalid_argument("block_basis: degenerate s");
    std::vector<Vec> h(full.basis.begin() + 1, full.basis.end());

    std::vector<Vec> g = block_atoms(s, h, eps);

    // Build-time spot check: combinations omitting one index must have
    // correlation with s at most eps times their norm.
    Rng rng(0x9e3779b97f4a7c15ULL ^ (m * 1315423911ULL));
    for (int it = 0; it < 100; ++it) {
        std::size_t omit = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(m)));
        Vec w(m + 1);
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (j == omit) continue;
            w += rng.normal() * g[j];
        }
        double wn = w.norm();
        if (wn < 1e-9) continue;
        if (std::abs(inner(w, s)) > eps * wn + 1e-12)
            throw std::logic_error("block_basis: omit-one correlation check failed");
    }
    return g;
}

Dictionary triangular_basis(std::size_t n, double eps, double ball,
                            std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("triangular_basis: n must be positive");
    if (!(eps > 0.0) || !(ball > 0.0))
        throw std::invalid_argument("triangular_basis: eps and ball must be positive");
    const std::size_t dim = n + 1;
    Rng rng(seed);

    // Sample a lower triangular matrix whose every (row subset) x (leading
    // columns) minor is nonzero; entries stay away from zero.
    std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
    auto sample_matrix = [&]() {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 1000)
                throw std::runtime_error("triangular_basis: could not sample a matrix "
                                         "with nonzero minors");
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    double mag = rng.uniform(0.05, 1.0);
                    A[i][j] = (rng.uniform() < 0.5) ? -mag : mag;
                }
            // Check all minors: choose k rows, take their first k columns.
            bool ok = true;
            for (std::size_t k = 1; k <= dim && ok; ++k) {
                std::vector<std::size_t> idx(k);
                std::iota(idx.begin(), idx.end(), 0);
                do {
                    // Determinant by Gaussian elimination on a k x k copy.
                    std::vector<std::vector<double>> M(k, std::vector<double>(k));
                    for (std::size_t r = 0; r < k; ++r)
                        for (std::size_t c = 0; c < k; ++c) M[r][c] = A[idx[r]][c];
                    double det = 1.0;
                    for (std::size_t c = 0; c < k; ++c) {
                        std::size_t piv = c;
                        for (std::size_t r = c + 1; r < k; ++r)
                            if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
                        if (piv != c) { std::swap(M[piv], M[c]); det = -det; }
                        det *= M[c][c];
                        if (M[c][c] == 0.0) break;
                        for (std::size_t r = c + 1; r < k; ++r) {
                            double f = M[r][c] / M[c][c];
                            for (std::size_t c2 = c; c2 < k; ++c2) M[r][c2] -= f * M[c][c2];
                        }
                    }
                    if (std::abs(det) <= 1e-9) { ok = false; break; }
                } while (next_subset(idx, dim));
            }
            if (ok) return;
        }
    };

    // Shrink trailing columns until every n-subset span sits within
    // eps/ball of the leading-n-coordinates subspace.
    auto make_atoms = [&]() {
        std::vector<Vec> atoms;
        atoms.reserve(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            Vec v(dim);
            for (std::size_t j = 0; j < dim; ++j) v[j] = A[i][j];
            atoms.push_back(v.normalized());
        }
        return atoms;
    };
    auto prefix_subspace = [&](std::size_t k) {
        Subspace s;
        s.ambient_dim = dim;
        for (std::size_t j = 0; j < k; ++j) s.basis.push_back(Vec::axis(dim, j));
        return s;
    };
    const double gap_limit = eps / ball;
    // Shrinking can numerically collapse a subset's rank; such a draw is
    // discarded and the matrix resampled rather than shipped degenerate.
    bool built = false;
    for (int rebuild = 0; rebuild < 50 && !built; ++rebuild) {
        sample_matrix();
        bool degenerate = false;
        for (std::size_t stage = 1; stage <= n && !degenerate; ++stage) {
            for (int round = 0;; ++round) {
                std::vector<Vec> atoms = make_atoms();
                // Audit all subset sizes up to the current stage.
                std::vector<std::size_t> bad;
                double bad_gap = 0.0;
                for (std::size_t k = 1; k <= stage && bad.empty() && !degenerate; ++k) {
                    Subspace prefix = prefix_subspace(k);
                    std::vector<std::size_t> idx(k);
                    std::iota(idx.begin(), idx.end(), 0);
                    do {
                        std::vector<Vec> sub;
                        for (std::size_t r : idx) sub.push_back(atoms[r]);
                        Subspace u = orthonormalize(dim, sub);
                        if (u.dim() != k) { degenerate = true; break; }
                        double g = subspace_gap(u, prefix);
                        if (!(g < gap_limit)) { bad = idx; bad_gap = g; break; }
                    } while (next_subset(idx, dim));
                }
                if (degenerate || bad.empty()) break;
                if (round >= 200)
                    throw std::runtime_error(
                        "triangular_basis: gap audit stuck at stage " +
                        std::to_string(stage) + ", subset {" + subset_name(bad) +
                        "} gap " + std::to_string(bad_gap));
                for (std::size_t i = 0; i < dim; ++i)
                    for (std::size_t j = stage; j < dim; ++j) A[i][j] *= 0.25;
            }
        }
        built = !degenerate;
    }
    if (!built)
        throw std::runtime_error(
            "triangular_basis: every sampled matrix degenerated under shrinking");

    Dictionary d;
    d.ambient_dim = dim;
    d.atoms = make_atoms();
    for (std::size_t i = 0; i < dim; ++i)
        d.labels.push_back("g" + std::to_string(i + 1));
    d.spanning = true;
    d.meta = {{"builder", "tri"},
              {"n", n},
              {"epsilon", eps},
              {"ball", ball},
              {"seed", seed}};
    return d;
}

Multiblock multiblock_dict(std::size_t m, std::size_t blocks,
                           const std::vector<double>& epsilons,
                           std::size_t samples, std::uint64_t seed) {
    if (m == 0 || blocks == 0)
        throw std::invalid_argument("multiblock_dict: m and blocks must be positive");
    if (epsilons.size() != blocks)
        throw std::invalid_argument("multiblock_dict: need one epsilon per block");
    for (std::size_t b = 0; b < blocks; ++b) {
        if (!(epsilons[b] > 0.0 && epsilons[b] < 0.5))
            throw std::invalid_argument("multiblock_dict: epsilons must be in (0, 1/2)");
        if (b > 0 && epsilons[b] > epsilons[b - 1])
            throw std::invalid_argument("multiblock_dict: epsilons must be non-increasing");
    }
    const std::size_t bdim = m + 1;
    const std::size_t dim = blocks * bdim;

    Multiblock out;
    out.m = m;
    out.blocks = blocks;
    out.epsilons = epsilons;
    out.dict.ambient_dim = dim;

    // Local construction in R^{m+1} with the marker on the last axis,
    // embedded into block b's coordinate range.
    for (std::size_t b = 0; b < blocks; ++b) {
        Vec s_local = Vec::axis(bdim, m);
        std::vector<Vec> local = block_basis(m, epsilons[b], s_local);
        Vec s_global(dim);
        s_global[b * bdim + m] = 1.0;
        out.markers.push_back(std::move(s_global));
        for (std::size_t j = 0; j < local.size(); ++j) {
            Vec g(dim);
            for (std::size_t i = 0; i < bdim; ++i) g[b * bdim + i] = local[j][i];
            out.dict.atoms.push_back(std::move(g));
            out.dict.labels.push_back("b" + std::to_string(b) + ".g" +
                                      std::to_string(j));
        }
    }

    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        for (;;) {
            Vec w(dim);
            for (std::size_t b = 0; b < blocks; ++b) {
                std::size_t j = static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(m)));
                double a = rng.normal();
                const Vec& g = out.dict.atoms[b * (m + 1) + j];
                w += a * g;
            }
            double wn = w.norm();
            if (wn > 1e-9) {
                w *= 1.0 / wn;
                out.dict.atoms.push_back(std::move(w));
                out.dict.labels.push_back("mix" + std::to_string(i));
                break;
            }
        }
    }
    out.dict.spanning = true;
    out.dict.meta = {{"builder", "multiblock"}, {"m", m},
                     {"blocks", blocks},       {"epsilons", epsilons},
                     {"samples", samples},     {"seed", seed}};
    return out;
}

double multiblock_projection_ratio_max(const Multiblock& mb, std::size_t terms,
                                       std::size_t samples, std::uint64_t seed) {
    const std::size_t bdim = mb.m + 1;
    const std::size_t single = mb.blocks * bdim;
    if (terms == 0 || terms > single)
        throw std::invalid_argument("multiblock_projection_ratio_max: bad term count");
    Rng rng(seed);
    const double eps_max = mb.epsilons.front();
    double worst = 0.0;
    for (std::size_t it = 0; it < samples; ++it) {
        std::vector<std::size_t> idx = rng.subset(single, terms);
        Vec w(mb.dict.ambient_dim);
        for (std::size_t j : idx) w += rng.normal() * mb.dict.atoms[j];
        // P projects onto the span of the (orthonormal) markers.
        Vec pw(mb.dict.ambient_dim);
        for (const Vec& s : mb.markers) pw += inner(w, s) * s;
        double p = pw.norm();
        Vec rest = w - pw;
        double r = rest.norm();
        if (r < 1e-12) continue;
        double ratio = p / (eps_max * std::sqrt(static_cast<double>(terms)) * r);
        worst = std::max(worst, ratio);
    }
    return worst;
}

double multiblock_marker_corr_max(const Multiblock& mb, std::size_t terms,
                                  std::size_t samples, std::uint64_t seed) {
    if (terms == 0 || terms > mb.dict.size())
        throw std::invalid_argument("multiblock_marker_corr_max: bad term count");
    Rng rng(seed);
    const Vec& s_last = mb.markers.back();
    double worst = 0.0;
    for (std::size_t it = 0; it < samples; ++it) {
        std::vector<std::size_t> idx = rng.subset(mb.dict.size(), terms);
        Vec w(mb.dict.ambient_dim);
        for (std::size_t j : idx) w += rng.normal() * mb.dict.atoms[j];
        double wn = w.norm();
        if (wn < 1e-12) continue;
        worst = std::max(worst, std::abs(inner(w, s_last)) / wn);
    }
    return worst;
}

}  // namespace mterm
