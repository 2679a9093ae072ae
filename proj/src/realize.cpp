#include "mterm/realize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mterm/builders.hpp"
#include "mterm/deviations.hpp"
#include "mterm/rng.hpp"

namespace mterm {

namespace {

void check_strictly_decreasing(const std::vector<double>& d) {
    if (d.empty()) throw std::invalid_argument("target sequence is empty");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0))
            throw std::invalid_argument("target sequence must be positive");
        if (i > 0 && !(d[i] < d[i - 1]))
            throw std::invalid_argument("target sequence must be strictly decreasing");
    }
}

}  // namespace

Vec x_of_t(const std::vector<double>& t, const std::vector<double>& d) {
    check_strictly_decreasing(d);
    const std::size_t n = d.size() - 1;  // N
    if (t.size() != n)
        throw std::invalid_argument("x_of_t: t must have one entry per gap");
    Vec x(n + 1);
    if (n == 0) {
        x[0] = d[0];
        return x;
    }
    auto dt = [&](std::size_t i) { return d[i] + t[i - 1]; };  // d_i + t_i
    for (std::size_t k = 1; k <= n; ++k) {
        double hi = (k == 1) ? d[0] : dt(k - 1);
        double lo = dt(k);
        double rad = hi * hi - lo * lo;
        if (!(rad > 0.0))
            throw std::invalid_argument(
                "x_of_t: perturbed sequence not decreasing at position " +
                std::to_string(k));
        x[k - 1] = std::sqrt(rad);
    }
    x[n] = dt(n);
    return x;
}

RealizeResult realize_fixed_point(const std::vector<double>& d, double eps,
                                  double ball, std::uint64_t seed, double tol,
                                  double lambda, std::size_t max_iters,
                                  unsigned threads) {
    check_strictly_decreasing(d);
    const std::size_t n = d.size() - 1;  // N
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < d.size(); ++i)
        min_gap = std::min(min_gap, d[i - 1] - d[i]);
    if (n > 0 && !(eps > 0.0 && eps < min_gap))
        throw std::invalid_argument(
            "realize_fixed_point: eps must lie in (0, min gap)");
    if (!(ball > d[0]))
        throw std::invalid_argument("realize_fixed_point: ball must exceed d_0");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("realize_fixed_point: lambda must be in (0, 1]");

    RealizeResult out;
    if (n == 0) {
        // Single-entry target: x = d_0 e_1 over any spanning dictionary.
        out.dict = triangular_basis(1, 0.5, ball, seed);
        out.dict.meta["note"] = "degenerate single-entry target";
        Vec x(2);
        x[0] = d[0];
        out.x = x;
        out.t = {};
        out.sigma = {d[0], sigma_brute(x, out.dict, 1).value};
        out.residuals_per_n = {0.0};
        out.residual = 0.0;
        return out;
    }

    out.dict = triangular_basis(n, eps, ball, seed);

    std::vector<double> t(n, 0.0);
    FixedPointTrace trace;
    auto sigmas = [&](const Vec& x) {
        std::vector<double> s(n + 1);
        s[0] = x.norm();
        for (std::size_t m = 1; m <= n; ++m)
            s[m] = sigma_brute(x, out.dict, m, kDefaultSubsetBudget, threads).value;
        return s;
    };

    double residual = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    std::vector<double> sig;
    for (; it < max_iters; ++it) {
        Vec x = x_of_t(t, d);
        sig = sigmas(x);
        residual = 0.0;
        for (std::size_t m = 0; m <= n; ++m)
            residual = std::max(residual, std::abs(sig[m] - d[m]));
        trace.iterates.push_back(t);
        trace.residuals.push_back(residual);
        if (residual < tol) break;
        for (std::size_t m = 1; m <= n; ++m) {
            double f = d[m] + t[m - 1] - sig[m];
            double clamped = std::clamp(f, 0.0, eps);
            if (clamped != f) ++trace.clamp_activations;
            t[m - 1] = (1.0 - lambda) * t[m - 1] + lambda * clamped;
        }
    }
    out.trace = std::move(trace);
    out.iterations = it < max_iters ? it + 1 : max_iters;
    if (!(residual < tol)) {
        FixedPointTrace tr = std::move(out.trace);
        throw ConvergenceError(
            "realize_fixed_point: residual " + std::to_string(residual) +
                " after " + std::to_string(max_iters) + " iterations (tol " +
                std::to_string(tol) + ")",
            std::move(tr));
    }

    // Fresh certification pass.
    out.x = x_of_t(t, d);
    out.t = t;
    out.sigma.assign(n + 1, 0.0);
    out.residuals_per_n.assign(n + 1, 0.0);
    out.residual = 0.0;
    for (std::size_t m = 0; m <= n; ++m) {
        out.sigma[m] =
            sigma_brute(out.x, out.dict, m, kDefaultSubsetBudget, threads).value;
        out.residuals_per_n[m] = std::abs(out.sigma[m] - d[m]);
        out.residual = std::max(out.residual, out.residuals_per_n[m]);
    }
    return out;
}

TailBoundDemo tail_bound_demo(const std::vector<double>& alpha,
                              const std::vector<std::size_t>& k,
                              std::size_t extra_markers, std::uint64_t seed) {
    if (alpha.size() < 2)
        throw std::invalid_argument("tail_bound_demo: need alpha_0..alpha_L, L >= 1");
    const std::size_t L = alpha.size() - 1;
    if (k.size() != L)
        throw std::invalid_argument("tail_bound_demo: need one k per level");
    for (double a : alpha)
        if (!(a > 0.0))
            throw std::invalid_argument("tail_bound_demo: alpha must be positive");
    for (std::size_t i = 0; i < L; ++i) {
        if (k[i] < 3)
            throw std::invalid_argument("tail_bound_demo: k entries must be >= 3");
        if (i > 0 && k[i] <= k[i - 1])
            throw std::invalid_argument("tail_bound_demo: k must be strictly increasing");
    }
    const std::size_t kmax = k.back();

    // Coordinate layout: [0] = e_0; grid e(n, kk) at 1 + (n-1)*kmax + (kk-1);
    // block axes appended after the grid.
    const std::size_t grid_end = 1 + L * kmax;
    auto grid_index = [&](std::size_t n, std::size_t kk) {
        return 1 + (n - 1) * kmax + (kk - 1);
    };

    // Marker supports in the (e_0, grid) part, plus block sizes.
    struct MarkerSpec {
        std::vector<std::pair<std::size_t, double>> support;  // (coord, value)
        std::size_t n = 0;   // largest grid level in the support
        std::size_t kk = 0;  // largest grid column in the support
    };
    std::vector<MarkerSpec> specs;

    // Canonical prefix markers secure the upper bound: for m = 2..L the
    // marker is proportional to the m-term prefix of x.
    for (std::size_t m = 2; m <= L; ++m) {
        MarkerSpec s;
        s.support.push_back({0, alpha[0]});
        for (std::size_t n = 1; n < m; ++n) {
            s.support.push_back({grid_index(n, k[n - 1]), alpha[n]});
            s.n = n;
            s.kk = std::max(s.kk, k[n - 1]);
        }
        specs.push_back(std::move(s));
    }
    Rng rng(seed);
    for (std::size_t e = 0; e < extra_markers; ++e) {
        MarkerSpec s;
        s.n = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(L)));
        s.support.push_back({0, rng.normal()});
        for (std::size_t n = 1; n <= s.n; ++n) {
            // One guaranteed coordinate with column >= 3 keeps eps < 1/2.
            std::size_t col = (n == s.n)
                                  ? static_cast<std::size_t>(rng.uniform_int(
                                        3, static_cast<std::int64_t>(kmax)))
                                  : static_cast<std::size_t>(rng.uniform_int(
                                        1, static_cast<std::int64_t>(kmax)));
            s.support.push_back({grid_index(n, col), rng.normal()});
            s.kk = std::max(s.kk, col);
        }
        specs.push_back(std::move(s));
    }

    std::size_t dim = grid_end;
    for (const MarkerSpec& s : specs) dim += s.n;  // fresh block axes

    TailBoundDemo demo;
    demo.dict.ambient_dim = dim;
    demo.dict.atoms.push_back(Vec::axis(dim, 0));
    demo.dict.labels.push_back("e0");

    std::size_t next_axis = grid_end;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        const MarkerSpec& spec = specs[si];
        Vec s(dim);
        for (auto [c, v] : spec.support) s[c] = v;
        s = s.normalized();
        std::vector<Vec> h;
        for (std::size_t j = 0; j < spec.n; ++j)
            h.push_back(Vec::axis(dim, next_axis++));
        double eps = 1.0 / static_cast<double>(spec.kk);
        std::vector<Vec> atoms = block_atoms(s, h, eps);
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            demo.dict.atoms.push_back(atoms[j]);
            demo.dict.labels.push_back("blk" + std::to_string(si) + ".g" +
                                       std::to_string(j));
        }
    }
    demo.dict.meta = {{"builder", "taildemo"},
                      {"alpha", alpha},
                      {"k", k},
                      {"extra_markers", extra_markers},
                      {"seed", seed}};

    Vec x(dim);
    x[0] = alpha[0];
    for (std::size_t n = 1; n <= L; ++n) x[grid_index(n, k[n - 1])] = alpha[n];
    demo.x = x;

    demo.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= L; ++m) {
        TailBoundRow row;
        row.m = m;
        double tail_sq = 0.0;
        for (std::size_t n = m; n <= L; ++n) tail_sq += alpha[n] * alpha[n];
        double tail = std::sqrt(tail_sq);
        row.upper = tail;
        double shrink = 1.0;
        if (m >= 1) {
            double km = static_cast<double>(k[m - 1]);
            shrink = std::sqrt(std::max(0.0, 1.0 - static_cast<double>(m) / (km * km)));
        }
        row.lower = shrink * tail;
        row.sigma = sigma_brute(x, demo.dict, m).value;
        row.lower_margin = row.sigma - row.lower;
        row.upper_margin = row.upper - row.sigma;
        demo.min_margin = std::min({demo.min_margin, row.lower_margin,
                                    row.upper_margin});
        demo.rows.push_back(row);
    }
    return demo;
}

}  // namespace mterm
