#include "mterm/kernels.hpp"

#include <atomic>

namespace mterm::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* widest_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2_fma()) return &avx2_ops();
#endif
#if defined(__aarch64__)
    return &neon_ops();
#endif
    return &scalar_ops();
}

std::atomic<const Ops*>& selection() {
    static std::atomic<const Ops*> sel{widest_supported()};
    return sel;
}

}  // namespace

std::vector<const Ops*> available_ops() {
    std::vector<const Ops*> v{&scalar_ops()};
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2_fma()) v.push_back(&avx2_ops());
#endif
#if defined(__aarch64__)
    v.push_back(&neon_ops());
#endif
    return v;
}

const Ops& active() { return *selection().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
    if (name == "auto") {
        selection().store(widest_supported(), std::memory_order_relaxed);
        return true;
    }
    for (const Ops* ops : available_ops()) {
        if (name == ops->name) {
            selection().store(ops, std::memory_order_relaxed);
            return true;
        }
    }
    return false;
}

}  // namespace mterm::kernels
