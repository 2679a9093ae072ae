#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>

namespace mterm {

// Unit-norm atom g(z) = e^{i phase} * sqrt(|Im pole| / pi) / (z - pole) on the
// upper half-plane; the pole lies strictly below the real axis.
struct RationalAtom {
    std::complex<double> pole;
    double phase = 0.0;
    void validate() const;  // throws std::invalid_argument unless Im pole < 0
};

// g(z) at a point z of the upper half-plane.
std::complex<double> atom_eval(const RationalAtom& g, std::complex<double> z);

// <g1, g2> = e^{i(phase1 - phase2)} * 2i * sqrt(|Im a||Im b|) / (conj(b) - a),
// the inner product being linear in the first argument.  <g, g> = 1 exactly.
std::complex<double> rational_inner(const RationalAtom& g1, const RationalAtom& g2);

// Normalized pair of atoms: g1 has pole -i*alpha and phase 0, g2 has pole
// gamma - i*beta and phase theta, with alpha >= beta > 0 and gamma >= 0.
// Derived quantities for r = g1 - g2:
//   delta   = |a - b| / |conj(a) - b|  in [0, 1),
//   phi     = atan2(gamma, alpha + beta), so sin(phi) in [0, delta],
//   r_norm2 = 2 (1 - sqrt(1 - delta^2) cos(theta - phi)),
// the last evaluated in the cancellation-free form
//   4 sin^2((theta-phi)/2) + 2 cos(theta-phi) delta^2 / (1 + sqrt(1-delta^2))
// and cross-checked against 2 - 2 Re<g1,g2> to 1e-12 on the squared scale.
struct PairGeometry {
    double alpha = 0.0, beta = 0.0, gamma = 0.0, theta = 0.0;  // theta wrapped to (-pi, pi]
    double delta = 0.0, phi = 0.0, r_norm = 0.0;
    RationalAtom g1() const { return {{0.0, -alpha}, 0.0}; }
    RationalAtom g2() const { return {{gamma, -beta}, theta}; }
};
PairGeometry pair_geometry(double alpha, double beta, double gamma, double theta);

// r(z) = g1(z) - g2(z), evaluated as
//   sqrt(alpha/pi) * ((z - a) q + (a - b)) / ((z - a)(z - b)),
//   q = 1 - sqrt(beta/alpha) e^{i theta},
// with q built from expm1/log1p and half-angle pieces so near-coincident
// atoms keep full relative accuracy.
std::complex<double> r_eval(const PairGeometry& geom, std::complex<double> z);

// f(z) = 4 pi Im(z) |r(z)|^2 / |r|^2; equals |<r/|r|, g>|^2 for the atom g
// with pole conj(z).  Requires Im z > 0 and r_norm > 0.
double f_value(std::complex<double> z, const PairGeometry& geom);

// Certification of sup_g |<r/|r|, g>| > 1e-2 for any distinct atom pair.
// Decision tree:
//   large-norm:  |r| > 2e-2; one of g1, -g2 correlates at least |r|/2.
//   z = 3 alpha i when |sin theta| >= delta        (f >= pi/600),
//   z =   alpha i when also |1 - sqrt(beta/alpha) e^{i theta}| <= delta/3
//                                                  (f >= pi/162),
//   z = 8 alpha i otherwise                        (f >= 16 pi / 164025).
// The witness phase is chosen to make the correlation real and positive.
enum class CertBranch { LargeNorm, Z3, Z1, Z8 };
const char* branch_name(CertBranch b);

struct CertResult {
    bool passes = false;       // chain_ok and value > 1e-2
    CertBranch branch = CertBranch::LargeNorm;
    RationalAtom witness;
    double value = 0.0;        // |<r/|r|, witness>|
    double bound_value = 0.0;  // branch lower bound on the correlation
    std::complex<double> z;    // evaluation point (conj of the witness pole)
    bool chain_ok = false;     // value >= bound_value - tolerance
};
CertResult pair_corr_certify(const PairGeometry& geom);

// Plain lattice scan of sqrt(f) over poles; an uncertified estimate of the
// supremum used only for demonstration output.
double grid_sup_estimate(const PairGeometry& geom, std::size_t n);

}  // namespace mterm
