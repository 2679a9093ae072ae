#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Low-level dense kernels used by every numeric module.  A scalar reference
// implementation always exists; SIMD variants (AVX2+FMA on x86-64, NEON on
// aarch64) are compiled when the target supports them and selected at runtime
// after a CPU probe.  The active variant can be overridden with select(),
// e.g. to force the reference path in equivalence tests.
//
// SIMD variants reassociate additions, so results may differ from the scalar
// path in the last bits.  All consumers treat kernel output as approximate to
// ~n*eps and never rely on bit-identical cross-variant results.

namespace mterm::kernels {

struct Ops {
    const char* name;
    // sum_i x[i]*y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i x[i]*x[i]
    double (*nrm2sq)(const double* x, std::size_t n);
    // y[i] += a*x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x[i] *= a
    void (*scal)(double a, double* x, std::size_t n);
};

// Reference implementation; always available.
const Ops& scalar_ops();

// All variants usable on this machine (scalar first).
std::vector<const Ops*> available_ops();

// Currently selected variant.  Defaults to the widest supported one.
const Ops& active();

// Force a variant by name ("scalar", "avx2", "neon", "auto").
// Returns false and leaves the selection unchanged if the name is unknown
// or unsupported on this machine.
bool select(std::string_view name);

inline double dot(const double* x, const double* y, std::size_t n) {
    return active().dot(x, y, n);
}
inline double nrm2sq(const double* x, std::size_t n) {
    return active().nrm2sq(x, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
    active().axpy(a, x, y, n);
}
inline void scal(double a, double* x, std::size_t n) {
    active().scal(a, x, n);
}

}  // namespace mterm::kernels
