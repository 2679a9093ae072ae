#include "mterm/slimness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "mterm/deviations.hpp"
#include "mterm/kernels.hpp"
#include "mterm/numcore.hpp"
#include "mterm/rng.hpp"

namespace mterm {

namespace {

double max_abs_corr(const Vec& x, const std::vector<Vec>& dirs) {
    double best = 0.0;
    for (const Vec& d : dirs)
        best = std::max(best, std::abs(inner(x, d)));
    return best;
}

// Projected subgradient descent (500 iterations, 0.9-decay step) followed by
// a smoothed 2p-norm polish with backtracking line search.  Returns the best
// point seen, evaluated under the exact objective.
std::pair<double, Vec> local_descent(Vec x, const std::vector<Vec>& dirs) {
    const std::size_t n = x.dim();
    double best_val = max_abs_corr(x, dirs);
    Vec best_x = x;

    double step = 0.5;
    for (int it = 0; it < 500; ++it) {
        // Steepest active direction.
        double top = 0.0;
        std::size_t arg = 0;
        double sign = 1.0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            double c = inner(x, dirs[i]);
            if (std::abs(c) > top) {
                top = std::abs(c);
                arg = i;
                sign = (c >= 0.0) ? 1.0 : -1.0;
            }
        }
        if (top < best_val) {
            best_val = top;
            best_x = x;
        }
        x -= (step * sign) * dirs[arg];
        double nn = x.norm();
        if (nn < 1e-12) {
            x = best_x;
        } else {
            x *= 1.0 / nn;
        }
        step *= 0.9;
    }
    {
        double v = max_abs_corr(x, dirs);
        if (v < best_val) {
            best_val = v;
            best_x = x;
        }
    }

    // Smoothed polish: minimize the 2p-norm of the correlation vector for
    // increasing p.  Correlations are rescaled by their max to keep the
    // powers in range.
    x = best_x;
    auto pnorm_val = [&](const Vec& y, int p) {
        double m = max_abs_corr(y, dirs);
        if (m == 0.0) return 0.0;
        double s = 0.0;
        for (const Vec& d : dirs) {
            double t = inner(y, d) / m;
            s += std::pow(t * t, p);
        }
        return m * std::pow(s, 0.5 / p);
    };
    for (int p : {4, 16, 64, 256}) {
        double eta = 0.1;
        for (int it = 0; it < 80; ++it) {
            double m = max_abs_corr(x, dirs);
            if (m == 0.0) break;
            Vec grad(n);
            for (const Vec& d : dirs) {
                double t = inner(x, d) / m;
                double w = std::pow(t * t, p - 1) * t;
                grad += w * d;
            }
            // Tangent component.
            grad -= inner(grad, x) * x;
            double gn = grad.norm();
            if (gn < 1e-15) break;
            grad *= 1.0 / gn;
            double cur = pnorm_val(x, p);
            bool accepted = false;
            while (eta > 1e-14) {
                Vec cand = x - eta * grad;
                cand *= 1.0 / cand.norm();
                if (pnorm_val(cand, p) < cur) {
                    x = cand;
                    accepted = true;
                    eta *= 1.5;
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted) break;
        }
        double v = max_abs_corr(x, dirs);
        if (v < best_val) {
            best_val = v;
            best_x = x;
        }
    }
    return {best_val, best_x};
}

}  // namespace

RhoEstimate minimize_max_corr(std::size_t ambient_dim,
                              const std::vector<Vec>& directions,
                              unsigned restarts, std::uint64_t seed) {
    if (directions.empty())
        throw std::invalid_argument("minimize_max_corr: no directions");
    for (const Vec& d : directions)
        if (d.dim() != ambient_dim)
            throw std::invalid_argument("minimize_max_corr: dimension mismatch");
    if (restarts == 0) restarts = 1;

    RhoEstimate out;
    out.restarts = restarts;

    // If the directions do not span, any unit vector in their complement is
    // an exact minimizer with value 0.
    Subspace span = orthonormalize(ambient_dim, directions);
    if (span.dim() < ambient_dim) {
        Vec w(ambient_dim);
        for (std::size_t i = 0; i < ambient_dim; ++i) {
            Vec cand = Vec::axis(ambient_dim, i);
            for (int pass = 0; pass < 2; ++pass)
                for (const Vec& b : span.basis) cand -= inner(cand, b) * b;
            if (cand.norm() > 1e-8) {
                w = cand.normalized();
                break;
            }
        }
        out.value = max_abs_corr(w, directions);
        out.witness = std::move(w);
        out.converged = true;
        return out;
    }

    // Deterministic smart starts: directions of smallest variation, i.e.
    // right singular vectors for the smallest singular values.
    std::vector<Vec> starts;
    {
        ColMatrix A(directions.size(), ambient_dim);
        for (std::size_t i = 0; i < directions.size(); ++i)
            for (std::size_t j = 0; j < ambient_dim; ++j)
                A.at(i, j) = directions[i][j];
        SvdResult s = svd(A);
        std::size_t k = s.sigma.size();
        for (std::size_t t = 0; t < std::min<std::size_t>(3, k); ++t) {
            Vec v(ambient_dim);
            for (std::size_t i = 0; i < ambient_dim; ++i)
                v[i] = s.v.at(i, k - 1 - t);
            double nn = v.norm();
            if (nn > 1e-12) starts.push_back(v * (1.0 / nn));
        }
    }
    Rng rng(seed);
    while (starts.size() < restarts) starts.push_back(rng.unit_vec(ambient_dim));
    starts.resize(restarts);

    double best = std::numeric_limits<double>::infinity();
    Vec best_x;
    unsigned agreeing = 0;
    std::vector<double> finals;
    finals.reserve(restarts);
    for (const Vec& s0 : starts) {
        auto [v, xv] = local_descent(s0, directions);
        finals.push_back(v);
        if (v < best) {
            best = v;
            best_x = xv;
        }
    }
    for (double v : finals)
        if (v <= best + 1e-6) ++agreeing;

    out.value = best;
    out.witness = std::move(best_x);
    out.converged = (restarts == 1) || (agreeing >= 2);
    return out;
}

RhoEstimate rho_estimate(const Dictionary& d, unsigned restarts,
                         std::uint64_t seed) {
    return minimize_max_corr(d.ambient_dim, d.atoms, restarts, seed);
}

Dictionary sample_combination_sphere(const Dictionary& d, std::size_t m,
                                     std::size_t count, std::uint64_t seed) {
    if (m == 0 || m > d.size())
        throw std::invalid_argument("sample_combination_sphere: bad m");
    Dictionary out;
    out.ambient_dim = d.ambient_dim;
    out.meta = {{"builder", "sample_sphere"},
                {"m", m},
                {"count", count},
                {"seed", seed},
                {"source", d.meta.is_null() ? nlohmann::json::object() : d.meta}};
    Rng rng(seed);
    out.atoms.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (;;) {
            std::vector<std::size_t> idx = rng.subset(d.size(), m);
            Vec w(d.ambient_dim);
            for (std::size_t j : idx) w += rng.normal() * d.atoms[j];
            double nn = w.norm();
            if (nn <= 1e-9) continue;
            w *= 1.0 / nn;
            std::string label = "S";
            for (std::size_t t = 0; t < idx.size(); ++t)
                label += (t ? "," : "") + std::to_string(idx[t]);
            out.atoms.push_back(std::move(w));
            out.labels.push_back(std::move(label));
            break;
        }
    }
    return out;
}

ThinBoardResult thin_board_estimate(const Dictionary& d_next,
                                    const Dictionary& d_cur) {
    if (d_next.ambient_dim != d_cur.ambient_dim)
        throw std::invalid_argument("thin_board_estimate: dimension mismatch");
    if (d_next.size() == 0 || d_cur.size() == 0)
        throw std::invalid_argument("thin_board_estimate: empty dictionary");
    ThinBoardResult out;
    out.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d_next.size(); ++i) {
        double worst = 0.0;
        for (const Vec& g : d_cur.atoms)
            worst = std::max(worst, std::abs(inner(d_next.atoms[i], g)));
        if (worst < out.value) {
            out.value = worst;
            out.witness_index = i;
        }
    }
    return out;
}

RateReport exp_rate_check(const Vec& x, const Dictionary& d, std::size_t k,
                          double rho_lower, std::uint64_t budget) {
    if (k == 0) throw std::invalid_argument("exp_rate_check: k must be positive");
    if (!(rho_lower > 0.0 && rho_lower <= 1.0))
        throw std::invalid_argument("exp_rate_check: rho_lower must be in (0, 1]");
    RateReport rep;
    const double xnorm = x.norm();
    const double q = 1.0 - rho_lower * rho_lower;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= d.ambient_dim; ++m) {
        RateRow row;
        row.m = m;
        row.sigma = sigma_brute(x, d, m, budget).value;
        row.bound = xnorm * std::pow(q, static_cast<double>(m / k) / 2.0);
        row.margin = row.bound - row.sigma;
        rep.min_margin = std::min(rep.min_margin, row.margin);
        rep.rows.push_back(row);
    }
    return rep;
}

double certified_rho_lower(const Dictionary& d) {
    if (d.size() != d.ambient_dim)
        throw std::invalid_argument(
            "certified_rho_lower: needs exactly ambient_dim atoms");
    ColMatrix A(d.size(), d.ambient_dim);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.ambient_dim; ++j) A.at(i, j) = d.atoms[i][j];
    std::vector<double> s = singular_values(A);
    return s.back() / std::sqrt(static_cast<double>(d.ambient_dim));
}

HullBallAudit hull_ball_audit(const Dictionary& d, const Vec& v, double r,
                              std::size_t samples, std::uint64_t seed,
                              unsigned rho_restarts) {
    if (d.size() != d.ambient_dim)
        throw std::invalid_argument("hull_ball_audit: needs exactly ambient_dim atoms");
    if (v.dim() != d.ambient_dim)
        throw std::invalid_argument("hull_ball_audit: center dimension mismatch");
    if (!(r > 0.0)) throw std::invalid_argument("hull_ball_audit: r must be positive");

    // Pseudo-inverse of the atom matrix transposed: y -> unique lambda with
    // sum lambda_i g_i = y.  Membership in the symmetric hull of the atoms
    // is |lambda|_1 <= 1.
    const std::size_t n = d.ambient_dim;
    ColMatrix Gt(n, n);  // column i = atom i
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Gt.at(j, i) = d.atoms[i][j];
    SvdResult s = svd(Gt);
    auto solve = [&](const Vec& y) {
        std::vector<double> lam(n, 0.0);
        for (std::size_t t = 0; t < s.sigma.size(); ++t) {
            if (s.sigma[t] <= 1e-14 * s.sigma.front()) continue;
            double c = kernels::dot(s.u.col(t), y.data(), n) / s.sigma[t];
            kernels::axpy(c, s.v.col(t), lam.data(), n);
        }
        double l1 = 0.0;
        for (double t : lam) l1 += std::abs(t);
        return l1;
    };

    HullBallAudit out;
    Rng rng(seed);
    for (std::size_t it = 0; it < samples; ++it) {
        Vec x = rng.unit_vec(n);
        for (double sgn : {1.0, -1.0}) {
            Vec y = v + (sgn * r) * x;
            double l1 = solve(y);
            out.max_coeff_l1 = std::max(out.max_coeff_l1, l1);
            if (l1 > 1.0 + 1e-9) out.contained = false;
        }
    }
    RhoEstimate est = rho_estimate(d, rho_restarts, seed ^ 0x5bd1e995ULL);
    out.rho_upper = est.value;
    out.consistent = (est.value >= r - 1e-6);
    return out;
}

SlowElementResult slow_element(const std::vector<Dictionary>& sampled_family,
                               const std::vector<double>& alpha,
                               unsigned restarts, std::uint64_t seed) {
    const std::size_t L = alpha.size();
    if (L == 0) throw std::invalid_argument("slow_element: empty alpha");
    if (sampled_family.size() != L)
        throw std::invalid_argument("slow_element: need one sampled dictionary per level");
    if (!(alpha[0] > 0.0 && alpha[0] <= 1.0 / 12.0 + 1e-15))
        throw std::invalid_argument("slow_element: alpha_0 must be in (0, 1/12]");
    for (std::size_t i = 0; i + 1 < L; ++i)
        if (!(alpha[i + 1] > 0.0 && alpha[i + 1] < alpha[i]))
            throw std::invalid_argument("slow_element: alpha must be strictly decreasing");
    const std::size_t dim = sampled_family[0].ambient_dim;
    for (const Dictionary& d : sampled_family)
        if (d.ambient_dim != dim)
            throw std::invalid_argument("slow_element: mixed ambient dimensions");
    if (dim < L + 1)
        throw std::invalid_argument("slow_element: ambient dimension too small");

    // beta_n = 4 sqrt(alpha_n^2 - alpha_{n+1}^2), alpha_L = 0.
    std::vector<double> beta(L);
    for (std::size_t nn = 0; nn < L; ++nn) {
        double next = (nn + 1 < L) ? alpha[nn + 1] : 0.0;
        beta[nn] = 4.0 * std::sqrt(alpha[nn] * alpha[nn] - next * next);
    }

    SlowElementResult out;
    out.alpha = alpha;
    std::vector<Vec> w;  // w_1 .. w_L

    std::vector<Vec> union_dirs;
    for (std::size_t k = 1; k <= L; ++k) {
        for (const Vec& g : sampled_family[k - 1].atoms) union_dirs.push_back(g);

        // Orthonormal basis q of the complement of span{w_1..w_{k-1}}.
        std::vector<Vec> gens = w;
        for (std::size_t i = 0; i < dim; ++i) gens.push_back(Vec::axis(dim, i));
        Subspace all = orthonormalize(dim, gens);
        std::vector<Vec> q(all.basis.begin() + static_cast<std::ptrdiff_t>(w.size()),
                           all.basis.end());

        // Union directions expressed in complement coordinates.
        std::vector<Vec> proj;
        proj.reserve(union_dirs.size());
        for (const Vec& g : union_dirs) {
            Vec t(q.size());
            for (std::size_t j = 0; j < q.size(); ++j) t[j] = inner(q[j], g);
            proj.push_back(std::move(t));
        }
        RhoEstimate est = minimize_max_corr(q.size(), proj, restarts,
                                            seed + 0x1000 * k);
        Vec wk(dim);
        for (std::size_t j = 0; j < q.size(); ++j) wk += est.witness[j] * q[j];
        wk = wk.normalized();

        SlowElementRow row;
        row.n = k;
        row.beta = beta[k - 1];
        row.corr = est.value;
        row.corr_budget = beta[k - 1] / 2.0;
        if (row.corr > row.corr_budget) out.certificate_valid = false;
        out.rows.push_back(row);
        w.push_back(std::move(wk));
    }

    Vec x(dim);
    for (std::size_t nn = 0; nn < L; ++nn) x += beta[nn] * w[nn];
    out.x = std::move(x);
    out.w = std::move(w);

    // Certificate chain with measured correlations: testing x - y against the
    // unit tail direction (1 / 4 alpha_m) sum_{n>=m} beta_n w_{n+1} gives
    //   sigma_m(x) >= (1/2)(4 alpha_m - (y_max / 4 alpha_m) sum_{n>=m} beta_n c_{n+1})
    // where y_max = 12 alpha_0 bounds the norm of a 2 sigma_m-near m-term
    // approximant y.
    const double y_max = 12.0 * alpha[0];
    out.bound.resize(L);
    out.slack.resize(L);
    for (std::size_t m = 0; m < L; ++m) {
        double corr_sum = 0.0;
        for (std::size_t nn = m; nn < L; ++nn)
            corr_sum += beta[nn] * out.rows[nn].corr;
        out.bound[m] =
            0.5 * (4.0 * alpha[m] - y_max * corr_sum / (4.0 * alpha[m]));
        out.slack[m] = alpha[m] - out.bound[m];
    }
    return out;
}

}  // namespace mterm
