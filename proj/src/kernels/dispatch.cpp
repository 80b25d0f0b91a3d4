// Runtime backend selection.
#include "plr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace plr::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(PLR_WITH_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* detect() {
    const char* env = std::getenv("PLREFINE_KERNELS");
    const std::string want = env ? env : "auto";
    if (want == "scalar") return &scalar_ops();
#if defined(PLR_WITH_AVX2)
    if (want == "avx2") {
        if (!cpu_has_avx2())
            throw std::runtime_error("PLREFINE_KERNELS=avx2 but the CPU lacks AVX2/FMA");
        return &avx2_ops();
    }
    if (want == "auto" && cpu_has_avx2()) return &avx2_ops();
#else
    if (want == "avx2")
        throw std::runtime_error("PLREFINE_KERNELS=avx2 but this build has no AVX2 backend");
#endif
    if (want != "auto" && want != "scalar")
        throw std::runtime_error("unknown PLREFINE_KERNELS value: " + want);
    return &scalar_ops();
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

std::vector<const Ops*> available_backends() {
    std::vector<const Ops*> out{&scalar_ops()};
#if defined(PLR_WITH_AVX2)
    if (cpu_has_avx2()) out.push_back(&avx2_ops());
#endif
    return out;
}

const Ops& active() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = detect();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

void force_backend(const Ops& ops) { g_active.store(&ops, std::memory_order_release); }

void reset_backend() { g_active.store(detect(), std::memory_order_release); }

}  // namespace plr::kernels
