#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mterm/dictionary.hpp"
#include "mterm/numcore.hpp"
#include "mterm/vec.hpp"

namespace mterm {

// Thrown when a brute-force enumeration would exceed its subset budget.
// `required` names the budget that would be needed.
class BudgetError : public std::runtime_error {
public:
    BudgetError(std::string msg, std::uint64_t required_budget)
        : std::runtime_error(std::move(msg)), required(required_budget) {}
    std::uint64_t required;
};

struct SigmaResult {
    double value = 0.0;
    std::vector<std::size_t> best_subset;  // atom indices, sorted
    std::vector<double> coeffs;            // one per best_subset entry
};

inline constexpr std::uint64_t kDefaultSubsetBudget = 2'000'000;

// Best m-term approximation error of x over dictionary d: minimum distance
// from x to the span of any min(m, |d|) atoms, by exhaustive enumeration.
// m = 0 gives |x| and the empty subset.  Ties are resolved toward the
// lexicographically smallest subset.  Enumeration may be split over
// `threads` workers (0 = hardware default); the result is identical for
// every thread count.  Throws BudgetError if C(|d|, m) exceeds `budget`.
SigmaResult sigma_brute(const Vec& x, const Dictionary& d, std::size_t m,
                        std::uint64_t budget = kDefaultSubsetBudget,
                        unsigned threads = 1);

// sigma_brute for m = 0 .. ambient_dim.
DeviationSeq sigma_sequence(const Vec& x, const Dictionary& d,
                            std::uint64_t budget = kDefaultSubsetBudget,
                            unsigned threads = 1);

// Deviations of x with respect to an orthonormal basis dictionary in closed
// form: sigma_m = sqrt(sum of the squares of all but the m largest |coords|).
// Returns entries m = 0 .. dim.
std::vector<double> sigma_onbasis_closed(const Vec& x);

// Deviations of a p x q matrix with respect to the rank-one dictionary in
// closed form: sigma_m = sqrt(sum_{n > m} s_n^2) over singular values s,
// entries m = 0 .. min(p, q).
std::vector<double> sigma_rankone_closed(const ColMatrix& f);

}  // namespace mterm
