// AVX2 + FMA kernels. Compiled with -mavx2 -mfma on x86-64 only; callers
// must check cpu support through available_backends()/active().
#include "plr/kernels.hpp"

#if defined(PLR_WITH_AVX2)

#include <immintrin.h>

#include <limits>

namespace plr::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_sq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double* x, std::size_t n, double a) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    }
    for (; i < n; ++i) x[i] *= a;
}

std::size_t best_scored_row_avx2(const double* q, const double* rows,
                                 const double* bias, std::size_t k,
                                 std::size_t d, double* best_dot) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    double best_raw = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double raw = dot_avx2(q, rows + j * d, d);
        const double score = raw + (bias ? bias[j] : 0.0);
        if (score > best_score) {
            best_score = score;
            best_raw = raw;
            best = j;
        }
    }
    if (best_dot) *best_dot = best_raw;
    return best;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{
        "avx2",         dot_avx2,   sum_sq_avx2,
        axpy_avx2,      scale_avx2, best_scored_row_avx2,
    };
    return ops;
}

}  // namespace plr::kernels

#endif  // PLR_WITH_AVX2
