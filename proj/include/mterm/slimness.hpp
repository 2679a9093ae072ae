#pragma once

#include <cstdint>
#include <vector>

#include "mterm/dictionary.hpp"
#include "mterm/vec.hpp"

namespace mterm {

// Result of minimizing max_g |<x, g>| over the unit sphere.  The value is a
// certified upper bound for the true infimum: it is the objective evaluated
// at the returned witness.  `converged` means at least two restarts agreed
// to 1e-6.
struct RhoEstimate {
    double value = 0.0;
    Vec witness;
    unsigned restarts = 0;
    bool converged = false;
};

// Minimize max_g |<x, g>| over unit x by multistart local search:
// projected subgradient (500 iterations, 0.9-decay step) followed by a
// smoothed polish.  Deterministic for a fixed seed.
RhoEstimate rho_estimate(const Dictionary& d, unsigned restarts,
                         std::uint64_t seed);

// Same search over arbitrary direction vectors (not necessarily unit atoms);
// used against sampled iterated dictionaries and inside orthogonal
// complements.
RhoEstimate minimize_max_corr(std::size_t ambient_dim,
                              const std::vector<Vec>& directions,
                              unsigned restarts, std::uint64_t seed);

// `count` random unit m-term combinations of atoms of d; labels record the
// atom subset of each sample.
Dictionary sample_combination_sphere(const Dictionary& d, std::size_t m,
                                     std::size_t count, std::uint64_t seed);

// min over atoms h of d_next of max over atoms g of d_cur of |<h, g>|,
// with the index of the minimizing h.
struct ThinBoardResult {
    double value = 0.0;
    std::size_t witness_index = 0;
};
ThinBoardResult thin_board_estimate(const Dictionary& d_next,
                                    const Dictionary& d_cur);

// Margin table for the exponential decay bound
//   sigma_m(x) <= |x| * (1 - rho_lower^2)^(floor(m/k)/2).
// margin = bound - sigma_m; nonnegative margins (to tolerance) certify the
// bound on this sample.
struct RateRow {
    std::size_t m = 0;
    double sigma = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};
struct RateReport {
    std::vector<RateRow> rows;
    double min_margin = 0.0;
};
RateReport exp_rate_check(const Vec& x, const Dictionary& d, std::size_t k,
                          double rho_lower,
                          std::uint64_t budget = 2'000'000);

// Analytic lower bound on the sphere minimax value for an exactly spanning
// dictionary (|d| == ambient_dim): smallest singular value of the atom
// matrix divided by sqrt(dim).  Every unit x then satisfies
// max_g |<x, g>| >= this bound.
double certified_rho_lower(const Dictionary& d);

// Checks that the ball of radius r around v lies in the symmetric convex
// hull of the atoms, by expressing v + r*x and v - r*x as convex
// combinations for `samples` random unit x (membership is decided by the
// unique coefficient solve; requires |d| == ambient_dim).  Also verifies
// rho_estimate(d) >= r - 1e-6.
struct HullBallAudit {
    bool contained = true;        // all sampled points inside the hull
    double max_coeff_l1 = 0.0;    // worst coefficient l1 norm seen (<= 1)
    double rho_upper = 0.0;       // rho_estimate value
    bool consistent = true;       // rho_upper >= r - 1e-6
};
HullBallAudit hull_ball_audit(const Dictionary& d, const Vec& v, double r,
                              std::size_t samples, std::uint64_t seed,
                              unsigned rho_restarts = 20);

// Element with slowly decaying deviations, assembled from a family of
// sampled iterated dictionaries.  For targets alpha_0 >= ... >= alpha_{L-1}
// (alpha_L := 0, alpha_0 <= 1/12) set beta_n = 4*sqrt(alpha_n^2 -
// alpha_{n+1}^2).  Unit vectors w_1..w_L are built sequentially: w_k
// minimizes the max correlation against the union of the first k sampled
// dictionaries, within the orthogonal complement of the earlier w's.  The
// element is x = sum_n beta_n w_{n+1}.
//
// The slack report replays the certificate chain with the measured
// correlations c_k in place of the design bound beta_k/2: when every
// c_k <= beta_k/2 it yields sigma_m(x) >= alpha_m - slack_m against the
// sampled dictionaries.
struct SlowElementRow {
    std::size_t n = 0;       // 1-based index of w_n
    double beta = 0.0;       // beta_{n-1}, the coefficient of w_n
    double corr = 0.0;       // measured c_n
    double corr_budget = 0.0;  // beta_{n-1}/2
};
struct SlowElementResult {
    Vec x;
    std::vector<Vec> w;               // w_1 .. w_L
    std::vector<SlowElementRow> rows;
    std::vector<double> alpha;        // targets
    std::vector<double> bound;        // certified lower bound per m
    std::vector<double> slack;        // alpha_m - bound_m
    bool certificate_valid = true;    // all c_k <= beta_k/2
};
SlowElementResult slow_element(const std::vector<Dictionary>& sampled_family,
                               const std::vector<double>& alpha,
                               unsigned restarts, std::uint64_t seed);

}  // namespace mterm
