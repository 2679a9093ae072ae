#include "mterm/deviations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "mterm/combos.hpp"
#include "mterm/kernels.hpp"

namespace mterm {

namespace {

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> subset;

    // Smaller value wins; exact value ties go to the lexicographically
    // smaller subset, which makes the reduction associative and the result
    // independent of the enumeration partitioning.
    bool better_than(const Candidate& o) const {
        if (value != o.value) return value < o.value;
        return subset < o.subset;
    }
};

// Scan combinations [first_rank, last_rank) in lexicographic order.
Candidate scan_range(const Vec& x, const Dictionary& d, std::size_t k,
                     std::uint64_t first_rank, std::uint64_t last_rank) {
    Candidate best;
    if (first_rank >= last_rank) return best;
    std::vector<std::size_t> idx = unrank_subset(d.size(), k, first_rank);
    std::vector<const Vec*> sub(k);
    for (std::uint64_t r = first_rank; r < last_rank; ++r) {
        for (std::size_t j = 0; j < k; ++j) sub[j] = &d.atoms[idx[j]];
        double dist = dist_to_span_value(x, sub);
        if (dist < best.value ||
            (dist == best.value && idx < best.subset)) {
            best.value = dist;
            best.subset = idx;
        }
        if (r + 1 < last_rank) next_subset(idx, d.size());
    }
    return best;
}

}  // namespace

SigmaResult sigma_brute(const Vec& x, const Dictionary& d, std::size_t m,
                        std::uint64_t budget, unsigned threads) {
    if (x.dim() != d.ambient_dim)
        throw std::invalid_argument("sigma_brute: target dimension mismatch");
    SigmaResult out;
    if (m == 0) {
        out.value = x.norm();
        return out;
    }
    const std::size_t k = std::min(m, d.size());
    const std::uint64_t total = binomial(d.size(), k);
    if (total > budget)
        throw BudgetError("sigma_brute: enumeration needs a budget of " +
                              std::to_string(total) + " subsets (" +
                              std::to_string(d.size()) + " choose " +
                              std::to_string(k) + "), limit is " +
                              std::to_string(budget),
                          total);

    unsigned nthreads = threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : threads;
    nthreads = static_cast<unsigned>(
        std::min<std::uint64_t>(nthreads, std::max<std::uint64_t>(total, 1)));

    Candidate best;
    if (nthreads <= 1) {
        best = scan_range(x, d, k, 0, total);
    } else {
        std::vector<Candidate> parts(nthreads);
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) {
            std::uint64_t lo = total * t / nthreads;
            std::uint64_t hi = total * (t + 1) / nthreads;
            pool.emplace_back([&, t, lo, hi] {
                parts[t] = scan_range(x, d, k, lo, hi);
            });
        }
        for (auto& th : pool) th.join();
        for (const Candidate& c : parts)
            if (c.better_than(best)) best = c;
    }

    out.value = best.value;
    out.best_subset = best.subset;
    std::vector<Vec> cols;
    cols.reserve(best.subset.size());
    for (std::size_t j : best.subset) cols.push_back(d.atoms[j]);
    LstsqResult ls = dist_to_span(x, cols);
    out.coeffs = std::move(ls.coeffs);
    return out;
}

DeviationSeq sigma_sequence(const Vec& x, const Dictionary& d,
                            std::uint64_t budget, unsigned threads) {
    std::vector<double> v;
    v.reserve(d.ambient_dim + 1);
    for (std::size_t m = 0; m <= d.ambient_dim; ++m)
        v.push_back(sigma_brute(x, d, m, budget, threads).value);
    return DeviationSeq(std::move(v));
}

std::vector<double> sigma_onbasis_closed(const Vec& x) {
    std::vector<double> a(x.coords());
    for (double& t : a) t = t * t;
    std::sort(a.begin(), a.end(), std::greater<>());
    // Suffix sums accumulate from the smallest magnitudes up.
    std::vector<double> out(a.size() + 1, 0.0);
    double s = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) {
        s += a[i];
        out[i] = std::sqrt(s);
    }
    return out;
}

std::vector<double> sigma_rankone_closed(const ColMatrix& f) {
    std::vector<double> s = singular_values(f);
    std::vector<double> out(s.size() + 1, 0.0);
    double acc = 0.0;
    for (std::size_t i = s.size(); i-- > 0;) {
        acc += s[i] * s[i];
        out[i] = std::sqrt(acc);
    }
    return out;
}

}  // namespace mterm
