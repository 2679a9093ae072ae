#pragma once

#include <cstddef>
#include <vector>

#include "mterm/dictionary.hpp"
#include "mterm/vec.hpp"

namespace mterm {

// Orthonormal coordinate dictionary {e_0, ..., e_{N-1}} in R^N.
Dictionary standard_basis(std::size_t n);

// Dictionary plus target realizing a prescribed strictly decreasing
// deviation sequence exactly.
//
// For d_0 > d_1 > ... > d_N > 0 (with d_{N+1} := 0) set
// u_n = sqrt(d_n^2 - d_{n+1}^2).  The target is x = sum_n u_n e_n and the
// atoms are g_0 = e_0, g_n = normalize(u_n e_{n-1} - u_{n-1} e_n); the
// best m-term distance of x is then d_m for every m.
struct ExactRealization {
    Dictionary dict;
    Vec target;
    std::vector<double> prescribed;  // d_0 ... d_N
};
ExactRealization exact_deviation_dict(const std::vector<double>& d);

// Atoms g_0..g_n spanning span{s} (+) span{h_basis}: g_j = h_basis[j-1] for
// j >= 1 and g_0 = (sqrt(1-eps^2) * (g_1+...+g_n) + eps*s) / c with
// c = sqrt(n(1-eps^2)+eps^2).  Any combination that omits at least one g_j
// has correlation with s at most eps times its norm.  Requires unit s,
// orthonormal h_basis orthogonal to s, and 0 < eps < 1/2.
std::vector<Vec> block_atoms(const Vec& s, const std::vector<Vec>& h_basis,
                             double eps);

// block_atoms in R^{m+1} with h_basis a computed orthonormal basis of the
// orthogonal complement of s.  Spot-checks the omit-one correlation bound
// on 100 random combinations at build time.
std::vector<Vec> block_basis(std::size_t m, double eps, const Vec& s);

// Spanning dictionary of N+1 atoms in R^{N+1} whose size-n sub-spans all lie
// within gap < eps/M of the first-n-coordinates subspace, while every n of
// them still span an n-dimensional space (all leading minors of the
// generating triangular matrix are nonzero).  Built by sampling a lower
// triangular matrix with entries in [-1,-0.05] u [0.05,1], verifying the
// minors, then repeatedly shrinking trailing columns by 1/4 until the gap
// audit passes (at most 200 rounds per stage).
Dictionary triangular_basis(std::size_t n, double eps, double ball,
                            std::uint64_t seed);

// B orthogonal (m+1)-dimensional blocks; block b carries a marker s_b (its
// last coordinate axis), a block_basis with parameter epsilons[b], plus
// `samples` random normalized cross-block mixtures of one atom per block.
struct Multiblock {
    Dictionary dict;              // single-block atoms then mixtures
    std::vector<Vec> markers;     // s_1 ... s_B, orthonormal
    std::size_t m = 0;            // block parameter
    std::size_t blocks = 0;
    std::vector<double> epsilons; // non-increasing
};
Multiblock multiblock_dict(std::size_t m, std::size_t blocks,
                           const std::vector<double>& epsilons,
                           std::size_t samples, std::uint64_t seed);

// Worst ratio |Pw| / (eps_max * sqrt(terms) * |(Id-P)w|) over random
// `terms`-term combinations of distinct single-block atoms, where P projects
// onto the span of the markers.  The construction guarantees ratios <= ~1.
double multiblock_projection_ratio_max(const Multiblock& mb, std::size_t terms,
                                       std::size_t samples, std::uint64_t seed);

// Worst |<w, s_B>| / |w| over random `terms`-term combinations of arbitrary
// dictionary atoms (mixtures included), against the last marker.  Bounded by
// 2 * epsilons.back().
double multiblock_marker_corr_max(const Multiblock& mb, std::size_t terms,
                                  std::size_t samples, std::uint64_t seed);

}  // namespace mterm
