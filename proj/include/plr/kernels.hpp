// Low-level arithmetic kernels with runtime backend dispatch.
//
// Every hot inner loop of the engine (batch-vs-centroid scoring, accumulator
// updates, normalization) goes through the active kernel table. A scalar
// reference backend is always available; an AVX2+FMA backend is compiled on
// x86-64 and selected at runtime when the CPU supports it. Backends are
// interchangeable: the test suite asserts their outputs agree.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace plr::kernels {

struct Ops {
    const char* name;

    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i x[i]^2
    double (*sum_sq)(const double* x, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x[i] *= a
    void (*scale)(double* x, std::size_t n, double a);
    // argmax_k ( dot(q, rows + k*d) + bias[k] ), ties to the lowest k.
    // bias may be null (treated as zero). *best_dot receives the raw dot
    // product of the winning row, without the bias term.
    std::size_t (*best_scored_row)(const double* q, const double* rows,
                                   const double* bias, std::size_t k,
                                   std::size_t d, double* best_dot);
};

const Ops& scalar_ops();

#if defined(PLR_WITH_AVX2)
// Defined only when the AVX2 translation unit is part of the build.
const Ops& avx2_ops();
#endif

// Backends usable on this machine (compiled in and supported by the CPU).
std::vector<const Ops*> available_backends();

// Active table. First call resolves via cpu detection, honoring the
// PLREFINE_KERNELS environment variable ("scalar", "avx2" or "auto").
const Ops& active();

// Test hooks.
void force_backend(const Ops& ops);
void reset_backend();

}  // namespace plr::kernels
