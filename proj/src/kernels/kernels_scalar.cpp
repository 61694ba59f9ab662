#include "smid/kernels.hpp"

namespace smid::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemv_scalar(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                 const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(A + r * lda, x, cols);
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{Isa::scalar, dot_scalar, axpy_scalar, scale_scalar, gemv_scalar};
    return t;
}

}  // namespace smid::kernels
