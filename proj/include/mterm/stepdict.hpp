#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace mterm {

// Piecewise-constant function on [0,1]: values[j] on [breakpoints[j], breakpoints[j+1]).
struct StepElement {
    std::vector<double> breakpoints;  // 0 = t_0 < t_1 < ... < t_p = 1
    std::vector<double> values;       // p entries

    std::size_t pieces() const { return values.size(); }
    void validate() const;  // throws std::invalid_argument on a malformed element
    double integral() const;
    double norm_sq() const;
    double norm() const;
    bool is_unit(double tol = 1e-12) const;
};

// Indicator of [lo, hi] scaled by v, as a StepElement on [0,1].
StepElement step_indicator(double lo, double hi, double v);

// sqrt(n) * indicator of [1/2, 1/2 + 1/n]; unit norm; requires n >= 2.
StepElement step_spike(std::size_t n);

// Exact L2[0,1] inner product over the merged breakpoint partition.
double step_inner(const StepElement& h1, const StepElement& h2);

// max over s in (0,1) of |P_{V_s} h| where V_s = span{ind[0,s], ind[s,1]}.
// Per cell of h the squared projection A(s)^2/s + B(s)^2/(1-s) is smooth
// (A, B are the integrals of h left and right of s); each cell is scanned
// on a 1000-point grid and the best point refined by golden section to 1e-10.
// Always <= |h|, with equality exactly when h has at most two pieces.
struct SupCorrResult {
    double value;
    double s_star;
};
SupCorrResult sup_corr_step(const StepElement& h);

// For a unit h with p = m+1 pieces: the piece with maximal values[j]^2 * len_j
// has values[j]^2 * len_j >= 1/(m+1) by pigeonhole, so the normalized
// indicator g of that piece gives |<h,g>| = |values[j]| * sqrt(len_j) >= 1/sqrt(m+1).
struct PigeonholeCertificate {
    std::size_t m;
    std::size_t piece;       // index of the selected piece
    double value;            // |<h, witness>|
    double bound;            // 1/sqrt(m+1)
    bool bound_holds;
    StepElement witness;
};
PigeonholeCertificate pigeonhole_certificate(const StepElement& h);

// Distance from f to the set of step functions with at most m+1 pieces and
// free breakpoints.  For piecewise-constant f the optimum places breakpoints
// on f's own breakpoint set (moving a breakpoint inside a constant cell never
// helps), so the value is computed exactly by dynamic programming over
// contiguous groupings of f's cells with weighted-mean group values.
double step_sigma_brute(const StepElement& f, std::size_t m);

nlohmann::json step_to_json(const StepElement& h);
StepElement step_from_json(const nlohmann::json& j);

}  // namespace mterm
