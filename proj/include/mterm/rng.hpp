#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mterm/vec.hpp"

namespace mterm {

// Deterministic random source.  Only the raw mt19937_64 stream (which the
// standard pins down bit-exactly) is consumed; the distributions are written
// out here instead of using std::*_distribution, whose output is
// implementation-defined.  Identical seeds therefore reproduce identical
// streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(eng_());  // full range
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return lo + static_cast<std::int64_t>(v % span);
    }

    Vec gaussian_vec(std::size_t dim) {
        Vec v(dim);
        for (std::size_t i = 0; i < dim; ++i) v[i] = normal();
        return v;
    }

    // Uniform point on the unit sphere.
    Vec unit_vec(std::size_t dim) {
        for (;;) {
            Vec v = gaussian_vec(dim);
            double n = v.norm();
            if (n > 1e-12) return v * (1.0 / n);
        }
    }

    // Sorted k distinct indices from {0, ..., n-1}.
    std::vector<std::size_t> subset(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("Rng::subset: k > n");
        // Floyd's algorithm.
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t j = n - k; j < n; ++j) {
            std::size_t t = static_cast<std::size_t>(
                uniform_int(0, static_cast<std::int64_t>(j)));
            bool dup = false;
            for (std::size_t s : out) {
                if (s == t) { dup = true; break; }
            }
            out.push_back(dup ? j : t);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mterm
