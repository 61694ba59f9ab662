#if defined(__aarch64__)

#include <arm_neon.h>

#include "smid/kernels.hpp"

namespace smid::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_neon(double* y, double alpha, const double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double* x, double alpha, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
    for (; i < n; ++i) x[i] *= alpha;
}

void gemv_neon(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
               const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(A + r * lda, x, cols);
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable t{Isa::neon, dot_neon, axpy_neon, scale_neon, gemv_neon};
    return t;
}

}  // namespace smid::kernels

#endif
