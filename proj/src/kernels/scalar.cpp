// Reference kernels. Plain loops, sequential accumulation order.
#include "plr/kernels.hpp"

#include <limits>

namespace plr::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, std::size_t n, double a) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

std::size_t best_scored_row_scalar(const double* q, const double* rows,
                                   const double* bias, std::size_t k,
                                   std::size_t d, double* best_dot) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    double best_raw = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double raw = dot_scalar(q, rows + j * d, d);
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

const Ops& scalar_ops() {
    static const Ops ops{
        "scalar",         dot_scalar,   sum_sq_scalar,
        axpy_scalar,      scale_scalar, best_scored_row_scalar,
    };
    return ops;
}

}  // namespace plr::kernels
