#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace mterm {

// Binomial coefficient, saturating at UINT64_MAX on overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        std::uint64_t q = r / i;
        std::uint64_t rem = r % i;
        std::uint64_t add = n - k + i;
        if (q > UINT64_MAX / add) return UINT64_MAX;
        std::uint64_t t = q * add;
        std::uint64_t t2 = rem * add / i;
        if (t > UINT64_MAX - t2) return UINT64_MAX;
        r = t + t2;
    }
    return r;
}

// Advance idx (sorted k-subset of {0..n-1}) to its lexicographic successor.
// Returns false when idx was the last subset.
inline bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    std::size_t t = k;
    while (t-- > 0) {
        if (idx[t] + 1 <= n - (k - t)) {
            ++idx[t];
            for (std::size_t u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
            return true;
        }
    }
    return false;
}

// Subset of {0..n-1} with lexicographic rank `rank` (0-based) among all
// k-subsets.
inline std::vector<std::size_t> unrank_subset(std::size_t n, std::size_t k,
                                              std::uint64_t rank) {
    std::vector<std::size_t> idx(k);
    std::size_t next = 0;
    for (std::size_t pos = 0; pos < k; ++pos) {
        for (std::size_t v = next;; ++v) {
            std::uint64_t c = binomial(n - 1 - v, k - 1 - pos);
            if (rank < c) {
                idx[pos] = v;
                next = v + 1;
                break;
            }
            rank -= c;
        }
    }
    return idx;
}

}  // namespace mterm
