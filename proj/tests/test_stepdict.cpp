#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mterm/numcore.hpp"
#include "mterm/rng.hpp"
#include "mterm/stepdict.hpp"

using namespace mterm;

namespace {

StepElement random_step(std::size_t pieces, Rng& rng, bool unit) {
    StepElement h;
    for (;;) {
        std::vector<double> cuts(pieces - 1);
        for (double& c : cuts) c = 0.05 + 0.9 * rng.uniform();
        std::sort(cuts.begin(), cuts.end());
        h.breakpoints.assign(1, 0.0);
        for (double c : cuts)
            if (c > h.breakpoints.back() + 1e-6) h.breakpoints.push_back(c);
        h.breakpoints.push_back(1.0);
        if (h.breakpoints.size() != pieces + 1) continue;
        h.values.assign(pieces, 0.0);
        for (double& v : h.values) v = rng.normal();
        if (h.norm() > 1e-3) break;
    }
    if (unit) {
        double n = h.norm();
        for (double& v : h.values) v /= n;
    }
    return h;
}

// Midpoint-rule quadrature oracle for the L2 inner product.
double quad_inner(const StepElement& f, const StepElement& g, std::size_t points) {
    double s = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
        auto eval = [&](const StepElement& h) {
            std::size_t j = 0;
            while (j + 1 < h.values.size() && t >= h.breakpoints[j + 1]) ++j;
            return h.values[j];
        };
        s += eval(f) * eval(g);
    }
    return s / static_cast<double>(points);
}

}  // namespace

TEST_CASE("step inner products on exact examples") {
    StepElement full = step_indicator(0.0, 1.0, 1.0);
    StepElement half = step_indicator(0.0, 0.5, std::sqrt(2.0));
    CHECK(half.is_unit());
    CHECK(full.is_unit());
    CHECK(step_inner(half, full) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    StepElement left = step_indicator(0.0, 0.25, 2.0);
    StepElement right = step_indicator(0.75, 1.0, 2.0);
    CHECK(step_inner(left, right) == doctest::Approx(0.0));
    CHECK(left.is_unit());
    CHECK(step_inner(left, left) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("step inner products match quadrature on random pairs") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        StepElement f = random_step(2 + trial % 5, rng, false);
        StepElement g = random_step(2 + (trial / 2) % 5, rng, false);
        // Quadrature with breakpoints snapped to the grid is only accurate
        // to O(1/points) here, so use many points and a loose tolerance.
        double q = quad_inner(f, g, 200000);
        CHECK(std::abs(step_inner(f, g) - q) <= 2e-4 * (1.0 + f.norm() * g.norm()));
    }
}

TEST_CASE("validation rejects malformed elements") {
    StepElement bad;
    bad.breakpoints = {0.0, 0.4, 0.4, 1.0};
    bad.values = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.breakpoints = {0.1, 0.5, 1.0};
    bad.values = {1.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.breakpoints = {0.0, 0.5, 0.9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sup correlation is bounded by the norm, equality for two pieces") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        StepElement h = random_step(2 + trial % 6, rng, true);
        SupCorrResult r = sup_corr_step(h);
        CHECK(r.value <= 1.0 + 1e-9);
        CHECK(r.s_star > 0.0);
        CHECK(r.s_star < 1.0);
    }
    // A two-piece unit element is itself in the dictionary's span family:
    // the sup over split points reaches 1 at its own breakpoint.
    StepElement two;
    two.breakpoints = {0.0, 0.3, 1.0};
    two.values = {2.0, -0.5};
    double n = two.norm();
    for (double& v : two.values) v /= n;
    SupCorrResult r = sup_corr_step(two);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.s_star == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("spike family: small correlation against two-piece spans") {
    double prev = 1e9;
    for (std::size_t n : {4u, 9u, 16u, 25u, 36u}) {
        StepElement sp = step_spike(n);
        CHECK(sp.is_unit(1e-12));
        SupCorrResult r = sup_corr_step(sp);
        CHECK(r.value <= 2.0 / std::sqrt(static_cast<double>(n)) + 1e-12);
        CHECK(r.value < prev);
        prev = r.value;
    }
    SupCorrResult r16 = sup_corr_step(step_spike(16));
    // Exact value at the optimal split s = 1/2: sqrt(1/8).
    CHECK(r16.value == doctest::Approx(std::sqrt(0.125)).epsilon(1e-9));
    CHECK(r16.s_star == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("pigeonhole certificate for unit step elements") {
    SUBCASE("equality case: the constant element") {
        StepElement c;
        c.breakpoints = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
        c.values = {1.0, 1.0, 1.0};
        PigeonholeCertificate cert = pigeonhole_certificate(c);
        CHECK(cert.value == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
        CHECK(cert.bound == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(cert.bound_holds);
    }
    SUBCASE("random unit elements") {
        Rng rng(11);
        for (int trial = 0; trial < 300; ++trial) {
            StepElement h = random_step(2 + trial % 6, rng, true);
            PigeonholeCertificate cert = pigeonhole_certificate(h);
            CHECK(cert.bound_holds);
            CHECK(cert.value >= cert.bound - 1e-12);
            CHECK(cert.bound ==
                  doctest::Approx(1.0 / std::sqrt(static_cast<double>(h.pieces())))
                      .epsilon(1e-15));
            CHECK(cert.witness.is_unit(1e-9));
            // The witness really achieves the reported correlation.
            CHECK(std::abs(step_inner(h, cert.witness) - cert.value) <= 1e-12);
        }
    }
    SUBCASE("non-unit input is rejected") {
        StepElement h = step_indicator(0.0, 0.5, 1.0);
        CHECK_THROWS_AS((void)pigeonhole_certificate(h), std::invalid_argument);
    }
}

TEST_CASE("step sigma by dynamic programming") {
    StepElement f;
    f.breakpoints = {0.0, 0.25, 0.5, 0.75, 1.0};
    f.values = {0.0, 1.0, 0.0, 1.0};
    // Optimal single split keeps cells {0} | {1,2,3}: cost 0 + (2 - 4/3)/4
    // per the within-group variance, total 1/6.
    CHECK(step_sigma_brute(f, 1) == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-12));
    CHECK(step_sigma_brute(f, 0) ==
          doctest::Approx(std::sqrt(0.5 - 0.25)).epsilon(1e-12));  // mean 1/2
    CHECK(step_sigma_brute(f, 3) <= 1e-12);
    CHECK(step_sigma_brute(f, 9) <= 1e-12);
    for (std::size_t m = 0; m + 1 <= 3; ++m)
        CHECK(step_sigma_brute(f, m) >= step_sigma_brute(f, m + 1) - 1e-15);
}

TEST_CASE("step sigma matches span enumeration on the weighted coordinates") {
    Rng rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t p = 2 + trial % 6;
        StepElement f = random_step(p, rng, false);
        // Isometry: the element maps to the vector (v_j sqrt(l_j)); a step
        // with breakpoints inside subset S of the interior cuts maps into the
        // span of the merged-cell indicators.  Enumerate all subsets.
        std::vector<double> len(p);
        for (std::size_t j = 0; j < p; ++j)
            len[j] = f.breakpoints[j + 1] - f.breakpoints[j];
        Vec x(p);
        for (std::size_t j = 0; j < p; ++j)
            x[j] = f.values[j] * std::sqrt(len[j]);
        for (std::size_t m = 0; m < p; ++m) {
            double best = x.norm();
            std::size_t cuts = p - 1;
            for (std::uint64_t mask = 0; mask < (1ull << cuts); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcountll(mask)) > m) continue;
                // Merged-group indicators: cut c kept iff bit c set.
                std::vector<Vec> spans;
                std::size_t start = 0;
                std::vector<std::size_t> ends;
                for (std::size_t c = 0; c < cuts; ++c)
                    if ((mask >> c) & 1) ends.push_back(c + 1);
                ends.push_back(p);
                start = 0;
                for (std::size_t e : ends) {
                    Vec ind(p);
                    for (std::size_t j = start; j < e; ++j) ind[j] = std::sqrt(len[j]);
                    spans.push_back(ind);
                    start = e;
                }
                best = std::min(best, dist_to_span(x, spans).distance);
            }
            CHECK(step_sigma_brute(f, m) == doctest::Approx(best).epsilon(1e-10));
        }
    }
}

TEST_CASE("step JSON round-trip") {
    StepElement f;
    f.breakpoints = {0.0, 0.3, 0.7, 1.0};
    f.values = {1.5, -0.25, 0.125};
    StepElement back = step_from_json(step_to_json(f));
    REQUIRE(back.values.size() == 3);
    for (std::size_t i = 0; i < 4; ++i) CHECK(back.breakpoints[i] == f.breakpoints[i]);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.values[i] == f.values[i]);
}
