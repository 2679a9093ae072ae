#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mterm/dictionary.hpp"
#include "mterm/vec.hpp"

namespace mterm {

// Target vector parametrized by a perturbation t of the prescribed sequence
// d (length N+1, strictly decreasing positive).  With e_1..e_{N+1} the
// coordinate axes of R^{N+1}:
//   x_1     = sqrt(d_0^2 - (d_1+t_1)^2)
//   x_k     = sqrt((d_{k-1}+t_{k-1})^2 - (d_k+t_k)^2),  k = 2..N
//   x_{N+1} = d_N + t_N
// so that |x| = d_0 and the coordinate tail sums telescope to
// (d_n + t_n)^2.  Requires every radicand to stay positive.
Vec x_of_t(const std::vector<double>& t, const std::vector<double>& d);

struct FixedPointTrace {
    std::vector<std::vector<double>> iterates;  // t per iteration
    std::vector<double> residuals;              // max_n |sigma_n - d_n|
    std::size_t clamp_activations = 0;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(std::string msg, FixedPointTrace tr)
        : std::runtime_error(std::move(msg)), trace(std::move(tr)) {}
    FixedPointTrace trace;
};

struct RealizeResult {
    Vec x;
    Dictionary dict;
    std::vector<double> t;
    std::vector<double> sigma;       // from the final certification pass
    std::vector<double> residuals_per_n;  // |sigma_n - d_n|
    double residual = 0.0;           // max over n
    FixedPointTrace trace;
    std::size_t iterations = 0;
};

// Realize a prescribed strictly decreasing deviation sequence d over a
// freshly built triangular dictionary, by the damped fixed-point iteration
//   t <- (1-lambda) t + lambda clamp(F(t), [0, eps]),
//   F(t)_n = d_n + t_n - sigma_n(x(t)),
// starting at t = 0.  Converged when max_n |sigma_n(x(t)) - d_n| < tol;
// the returned sigma values come from a fresh exhaustive recomputation.
// Throws ConvergenceError (carrying the trace) after max_iters.
RealizeResult realize_fixed_point(const std::vector<double>& d, double eps,
                                  double ball, std::uint64_t seed,
                                  double tol = 1e-6, double lambda = 0.5,
                                  std::size_t max_iters = 500,
                                  unsigned threads = 1);

// Finite two-sided tail estimate demo.  The target
//   x = alpha_0 e_0 + sum_{n=1..L} alpha_n e(n, k_n)
// lives in a coordinate space indexed by e_0 and a grid e(n, k); the
// dictionary consists of e_0 plus one block per marker: for each m = 2..L a
// canonical marker proportional to the prefix of x (securing the upper
// bound), plus optional random extra markers.  Each marker s carries a
// block of n(s)+1 atoms built by block_atoms with eps(s) = 1/k(s), where
// n(s) and k(s) are the largest grid indices in s's support.
//
// The demo checks, for m = 0..L,
//   sqrt(1 - m/k_m^2) * tail_m  <=  sigma_m(x)  <=  tail_m,
// tail_m = sqrt(sum_{n>=m} alpha_n^2).
struct TailBoundRow {
    std::size_t m = 0;
    double sigma = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double lower_margin = 0.0;  // sigma - lower
    double upper_margin = 0.0;  // upper - sigma
};
struct TailBoundDemo {
    Dictionary dict;
    Vec x;
    std::vector<TailBoundRow> rows;
    double min_margin = 0.0;  // min over rows of both margins
};
TailBoundDemo tail_bound_demo(const std::vector<double>& alpha,
                              const std::vector<std::size_t>& k,
                              std::size_t extra_markers, std::uint64_t seed);

}  // namespace mterm
