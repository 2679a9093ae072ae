#include "mterm/stepdict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mterm {

void StepElement::validate() const {
    if (values.empty() || breakpoints.size() != values.size() + 1)
        throw std::invalid_argument("StepElement: need p values and p+1 breakpoints");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw std::invalid_argument("StepElement: breakpoints must run from 0 to 1");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("StepElement: breakpoints must be strictly increasing");
}

double StepElement::integral() const {
    double s = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        s += values[j] * (breakpoints[j + 1] - breakpoints[j]);
    return s;
}

double StepElement::norm_sq() const {
    double s = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        s += values[j] * values[j] * (breakpoints[j + 1] - breakpoints[j]);
    return s;
}

double StepElement::norm() const { return std::sqrt(norm_sq()); }

bool StepElement::is_unit(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StepElement step_indicator(double lo, double hi, double v) {
    if (!(0.0 <= lo && lo < hi && hi <= 1.0))
        throw std::invalid_argument("step_indicator: need 0 <= lo < hi <= 1");
    StepElement h;
    h.breakpoints.push_back(0.0);
    if (lo > 0.0) {
        h.breakpoints.push_back(lo);
        h.values.push_back(0.0);
    }
    h.values.push_back(v);
    if (hi < 1.0) {
        h.breakpoints.push_back(hi);
        h.values.push_back(0.0);
    }
    h.breakpoints.push_back(1.0);
    h.validate();
    return h;
}

StepElement step_spike(std::size_t n) {
    if (n < 2)
        throw std::invalid_argument("step_spike: need n >= 2 so the support fits in [0,1]");
    double w = 1.0 / static_cast<double>(n);
    return step_indicator(0.5, 0.5 + w, std::sqrt(static_cast<double>(n)));
}

double step_inner(const StepElement& h1, const StepElement& h2) {
    h1.validate();
    h2.validate();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    double pos = 0.0;
    while (pos < 1.0) {
        double next = std::min(h1.breakpoints[i + 1], h2.breakpoints[j + 1]);
        acc += h1.values[i] * h2.values[j] * (next - pos);
        pos = next;
        if (h1.breakpoints[i + 1] == pos && i + 1 < h1.values.size()) ++i;
        if (h2.breakpoints[j + 1] == pos && j + 1 < h2.values.size()) ++j;
    }
    return acc;
}

namespace {

// Golden-section maximization of q on [a, b] to width tol.
double golden_max(double a, double b, double tol, const auto& q, double& arg) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = q(x1), f2 = q(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = q(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = q(x1);
        }
    }
    arg = 0.5 * (a + b);
    return q(arg);
}

}  // namespace

SupCorrResult sup_corr_step(const StepElement& h) {
    h.validate();
    if (!(h.norm() > 0.0))
        throw std::invalid_argument("sup_corr_step: h must be nonzero");
    const std::size_t p = h.pieces();
    std::vector<double> cum(p + 1, 0.0);  // cum[j] = integral of h over [0, t_j]
    for (std::size_t j = 0; j < p; ++j)
        cum[j + 1] = cum[j] + h.values[j] * (h.breakpoints[j + 1] - h.breakpoints[j]);
    const double total = cum[p];

    double best_q = -std::numeric_limits<double>::infinity();
    double best_s = 0.5;
    for (std::size_t j = 0; j < p; ++j) {
        auto q = [&](double s) {
            double a = cum[j] + h.values[j] * (s - h.breakpoints[j]);
            double b = total - a;
            return a * a / s + b * b / (1.0 - s);
        };
        // Clamp away from 0 and 1: q extends continuously there with value
        // total^2, which q already attains in every cell, so nothing is lost.
        double lo = std::max(h.breakpoints[j], 1e-12);
        double hi = std::min(h.breakpoints[j + 1], 1.0 - 1e-12);
        if (!(lo < hi)) continue;
        const int grid = 1000;
        int best_i = 0;
        double best_cell = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= grid; ++i) {
            double s = lo + (hi - lo) * i / grid;
            double v = q(s);
            if (v > best_cell) {
                best_cell = v;
                best_i = i;
            }
        }
        double a = lo + (hi - lo) * std::max(0, best_i - 1) / grid;
        double b = lo + (hi - lo) * std::min(grid, best_i + 1) / grid;
        double arg;
        double v = golden_max(a, b, 1e-10, q, arg);
        if (v < best_cell) {
            v = best_cell;
            arg = lo + (hi - lo) * best_i / grid;
        }
        if (v > best_q) {
            best_q = v;
            best_s = arg;
        }
    }
    return {std::sqrt(best_q), best_s};
}

PigeonholeCertificate pigeonhole_certificate(const StepElement& h) {
    h.validate();
    if (!h.is_unit(1e-9))
        throw std::invalid_argument("pigeonhole_certificate: h must have unit norm");
    const std::size_t p = h.pieces();
    std::size_t jstar = 0;
    double mass = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
        double len = h.breakpoints[j + 1] - h.breakpoints[j];
        double m = h.values[j] * h.values[j] * len;
        if (m > mass) {
            mass = m;
            jstar = j;
        }
    }
    PigeonholeCertificate cert;
    cert.m = p - 1;
    cert.piece = jstar;
    double len = h.breakpoints[jstar + 1] - h.breakpoints[jstar];
    // Sign the witness along the selected piece so the correlation itself,
    // not just its modulus, equals the certified value.
    cert.witness = step_indicator(
        h.breakpoints[jstar], h.breakpoints[jstar + 1],
        std::copysign(1.0 / std::sqrt(len), h.values[jstar]));
    cert.value = std::abs(h.values[jstar]) * std::sqrt(len);
    double direct = step_inner(h, cert.witness);
    if (std::abs(direct - cert.value) > 1e-12)
        throw std::logic_error("pigeonhole_certificate: witness correlation mismatch");
    cert.bound = 1.0 / std::sqrt(static_cast<double>(p));
    cert.bound_holds = cert.value >= cert.bound - 1e-12;
    return cert;
}

double step_sigma_brute(const StepElement& f, std::size_t m) {
    f.validate();
    const std::size_t p = f.pieces();
    if (m + 1 >= p) return 0.0;
    // Prefix sums of len, value*len, value^2*len over f's cells.
    std::vector<double> sl(p + 1, 0.0), s1(p + 1, 0.0), s2(p + 1, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double len = f.breakpoints[j + 1] - f.breakpoints[j];
        sl[j + 1] = sl[j] + len;
        s1[j + 1] = s1[j] + f.values[j] * len;
        s2[j + 1] = s2[j] + f.values[j] * f.values[j] * len;
    }
    // Weighted squared error of the best constant on cells [i, j).
    auto cost = [&](std::size_t i, std::size_t j) {
        double len = sl[j] - sl[i];
        double lin = s1[j] - s1[i];
        double sq = s2[j] - s2[i];
        return std::max(0.0, sq - lin * lin / len);
    };
    const std::size_t groups = m + 1;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(p + 1, inf), cur(p + 1, inf);
    prev[0] = 0.0;
    for (std::size_t g = 1; g <= groups; ++g) {
        std::fill(cur.begin(), cur.end(), inf);
        for (std::size_t i = g; i <= p; ++i) {
            double best = inf;
            for (std::size_t j = g - 1; j < i; ++j)
                if (prev[j] < inf) best = std::min(best, prev[j] + cost(j, i));
            cur[i] = best;
        }
        std::swap(prev, cur);
    }
    return std::sqrt(std::max(0.0, prev[p]));
}

nlohmann::json step_to_json(const StepElement& h) {
    return {{"breakpoints", h.breakpoints}, {"values", h.values}};
}

StepElement step_from_json(const nlohmann::json& j) {
    StepElement h;
    h.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    h.values = j.at("values").get<std::vector<double>>();
    h.validate();
    return h;
}

}  // namespace mterm
