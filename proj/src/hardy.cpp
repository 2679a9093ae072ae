#include "mterm/hardy.hpp"

#include <algorithm>
#include <cmath>

namespace mterm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double wrap_angle(double t) {
    t = std::remainder(t, 2.0 * kPi);
    if (t <= -kPi) t += 2.0 * kPi;
    return t;
}

// 1 - sqrt(beta/alpha) e^{i theta} without cancellation: the real part is
// (1 - rho) + rho (1 - cos theta) with 1 - rho from expm1/log1p.
std::complex<double> one_minus_ratio(double alpha, double beta, double theta) {
    double one_minus_rho = -std::expm1(0.5 * std::log1p((beta - alpha) / alpha));
    double rho = 1.0 - one_minus_rho;
    double s = std::sin(0.5 * theta);
    return {one_minus_rho + rho * 2.0 * s * s, -rho * std::sin(theta)};
}

}  // namespace

void RationalAtom::validate() const {
    if (!(pole.imag() < 0.0))
        throw std::invalid_argument("RationalAtom: pole must lie strictly below the real axis");
}

std::complex<double> atom_eval(const RationalAtom& g, std::complex<double> z) {
    g.validate();
    return std::polar(std::sqrt(-g.pole.imag() / kPi), g.phase) / (z - g.pole);
}

std::complex<double> rational_inner(const RationalAtom& g1, const RationalAtom& g2) {
    g1.validate();
    g2.validate();
    std::complex<double> num(0.0, 2.0 * std::sqrt(g1.pole.imag() * g2.pole.imag()));
    return std::polar(1.0, g1.phase - g2.phase) * num / (std::conj(g2.pole) - g1.pole);
}

PairGeometry pair_geometry(double alpha, double beta, double gamma, double theta) {
    if (!(beta > 0.0) || !(alpha >= beta))
        throw std::invalid_argument("pair_geometry: need alpha >= beta > 0");
    if (!(gamma >= 0.0))
        throw std::invalid_argument("pair_geometry: need gamma >= 0");
    PairGeometry g;
    g.alpha = alpha;
    g.beta = beta;
    g.gamma = gamma;
    g.theta = wrap_angle(theta);
    double near = std::hypot(gamma, alpha - beta);   // |a - b|
    double far = std::hypot(gamma, alpha + beta);    // |conj(a) - b|
    g.delta = near / far;
    g.phi = std::atan2(gamma, alpha + beta);
    double psi = g.theta - g.phi;
    // 1 - delta^2 = ((a+b)^2 - (a-b)^2) / far^2 = 4 a b / far^2, which avoids
    // the cancellation of 1 - delta^2 when the poles sit far apart.
    double root = 2.0 * std::sqrt(alpha * beta) / far;
    double s = std::sin(0.5 * psi);
    double sq = 4.0 * s * s +
                2.0 * std::cos(psi) * g.delta * g.delta / (1.0 + root);
    sq = std::max(0.0, sq);
    double gram_sq = 2.0 - 2.0 * rational_inner(g.g1(), g.g2()).real();
    if (std::abs(sq - gram_sq) > 1e-12)
        throw std::logic_error("pair_geometry: norm routes disagree");
    g.r_norm = std::sqrt(sq);
    return g;
}

std::complex<double> r_eval(const PairGeometry& geom, std::complex<double> z) {
    std::complex<double> a(0.0, -geom.alpha);
    std::complex<double> b(geom.gamma, -geom.beta);
    std::complex<double> q = one_minus_ratio(geom.alpha, geom.beta, geom.theta);
    return std::sqrt(geom.alpha / kPi) * ((z - a) * q + (a - b)) /
           ((z - a) * (z - b));
}

double f_value(std::complex<double> z, const PairGeometry& geom) {
    if (!(z.imag() > 0.0))
        throw std::invalid_argument("f_value: z must lie in the upper half-plane");
    if (!(geom.r_norm > 0.0))
        throw std::invalid_argument("f_value: degenerate pair, r = 0");
    double m = std::abs(r_eval(geom, z));
    return 4.0 * kPi * z.imag() * m * m / (geom.r_norm * geom.r_norm);
}

const char* branch_name(CertBranch b) {
    switch (b) {
        case CertBranch::LargeNorm: return "large-norm";
        case CertBranch::Z3: return "z=3ai";
        case CertBranch::Z1: return "z=ai";
        case CertBranch::Z8: return "z=8ai";
    }
    return "?";
}

CertResult pair_corr_certify(const PairGeometry& geom) {
    if (!(geom.r_norm > 0.0))
        throw std::invalid_argument("pair_corr_certify: degenerate pair, r = 0");
    CertResult out;
    if (geom.r_norm > 2e-2) {
        out.branch = CertBranch::LargeNorm;
        std::complex<double> gram = rational_inner(geom.g1(), geom.g2());
        // <r, g1> = 1 - conj(gram); <r, -g2> = 1 - gram.
        std::complex<double> c1 = (1.0 - std::conj(gram)) / geom.r_norm;
        std::complex<double> c2 = (1.0 - gram) / geom.r_norm;
        bool use_first = std::abs(c1) >= std::abs(c2);
        std::complex<double> c = use_first ? c1 : c2;
        RationalAtom base = use_first ? geom.g1() : geom.g2();
        if (!use_first) base.phase = wrap_angle(base.phase + kPi);  // -g2
        out.witness = {base.pole, wrap_angle(base.phase + std::arg(c))};
        out.value = std::abs(c);
        out.z = std::conj(base.pole);
        out.bound_value = 0.5 * geom.r_norm;
        out.chain_ok = out.value >= out.bound_value - 1e-12;
        out.passes = out.chain_ok && out.value > 1e-2;
        return out;
    }
    double ratio_dev = std::abs(one_minus_ratio(geom.alpha, geom.beta, geom.theta));
    double f_lower;
    if (std::abs(std::sin(geom.theta)) >= geom.delta) {
        out.branch = CertBranch::Z3;
        out.z = {0.0, 3.0 * geom.alpha};
        f_lower = kPi / 600.0;
    } else if (ratio_dev <= geom.delta / 3.0) {
        out.branch = CertBranch::Z1;
        out.z = {0.0, geom.alpha};
        f_lower = kPi / 162.0;
    } else {
        out.branch = CertBranch::Z8;
        out.z = {0.0, 8.0 * geom.alpha};
        f_lower = 16.0 * kPi / 164025.0;
    }
    double f = f_value(out.z, geom);
    out.value = std::sqrt(f);
    out.bound_value = std::sqrt(std::max(0.0, f_lower - 1e-9));
    out.chain_ok = f >= f_lower - 1e-9;
    std::complex<double> rz = r_eval(geom, out.z);
    std::complex<double> i_unit(0.0, 1.0);
    out.witness = {std::conj(out.z), wrap_angle(std::arg(i_unit * rz))};
    out.passes = out.chain_ok && out.value > 1e-2;
    return out;
}

double grid_sup_estimate(const PairGeometry& geom, std::size_t n) {
    if (n < 2) throw std::invalid_argument("grid_sup_estimate: need n >= 2");
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Real part scanned through tan to cover the whole line.
        double u = -0.5 * kPi + kPi * (static_cast<double>(i) + 0.5) / n;
        double x = geom.alpha * std::tan(u);
        for (std::size_t j = 0; j < n; ++j) {
            double v = -7.0 + 14.0 * static_cast<double>(j) / (n - 1);
            double y = geom.alpha * std::exp(v);
            best = std::max(best, f_value({x, y}, geom));
        }
    }
    return std::sqrt(best);
}

}  // namespace mterm
