#include "mterm/kernels.hpp"

// Reference kernels.  Plain loops, one accumulator, no manual unrolling:
// this is the semantics the SIMD variants are tested against.

namespace mterm::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{"scalar", dot_scalar, nrm2sq_scalar, axpy_scalar,
                         scal_scalar};
    return ops;
}

}  // namespace mterm::kernels
