#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "mterm/kernels.hpp"

namespace mterm {

// Dense vector in a fixed-dimension Euclidean space.  Dimension mismatches
// in binary operations throw std::invalid_argument.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t dim) : c_(dim, 0.0) {}
    Vec(std::initializer_list<double> xs) : c_(xs) {}
    explicit Vec(std::vector<double> xs) : c_(std::move(xs)) {}

    static Vec axis(std::size_t dim, std::size_t i) {
        if (i >= dim) throw std::invalid_argument("Vec::axis: index out of range");
        Vec e(dim);
        e.c_[i] = 1.0;
        return e;
    }

    std::size_t dim() const { return c_.size(); }
    double& operator[](std::size_t i) { return c_[i]; }
    double operator[](std::size_t i) const { return c_[i]; }
    double* data() { return c_.data(); }
    const double* data() const { return c_.data(); }
    const std::vector<double>& coords() const { return c_; }

    Vec& operator+=(const Vec& o) {
        check_dim(o);
        kernels::axpy(1.0, o.data(), data(), dim());
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        check_dim(o);
        kernels::axpy(-1.0, o.data(), data(), dim());
        return *this;
    }
    Vec& operator*=(double a) {
        kernels::scal(a, data(), dim());
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double a, Vec v) { return v *= a; }
    friend Vec operator*(Vec v, double a) { return v *= a; }

    double norm_sq() const { return kernels::nrm2sq(data(), dim()); }
    double norm() const { return std::sqrt(norm_sq()); }

    // Returns *this / |*this|; throws on (near-)zero input.
    Vec normalized() const {
        double n = norm();
        if (!(n > 0.0)) throw std::invalid_argument("Vec::normalized: zero vector");
        Vec v = *this;
        v *= 1.0 / n;
        return v;
    }

    void check_dim(const Vec& o) const {
        if (dim() != o.dim())
            throw std::invalid_argument("Vec: dimension mismatch");
    }

private:
    std::vector<double> c_;
};

inline double inner(const Vec& x, const Vec& y) {
    x.check_dim(y);
    return kernels::dot(x.data(), y.data(), x.dim());
}

}  // namespace mterm
