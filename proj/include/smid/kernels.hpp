#pragma once

// Dense double-precision inner loops used by the simplex tableau and the
// regression code. Each kernel has a scalar reference implementation and,
// where the target supports it, a SIMD variant selected at runtime.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace smid::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// Function table for one instruction set. All pointers are non-null.
struct KernelTable {
    Isa isa;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
    /// x[i] *= alpha
    void (*scale)(double* x, double alpha, std::size_t n);
    /// y[r] = sum_c A[r * lda + c] * x[c] for r < rows, row-major A
    void (*gemv)(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                 const double* x, double* y);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

/// Instruction sets usable on this machine, scalar first.
std::vector<Isa> available_isas();

const KernelTable& table(Isa isa);

/// The table picked at first use: best available ISA unless the
/// SMID_SIMD environment variable names another one ("scalar", "avx2", "neon").
const KernelTable& active();

// Span convenience wrappers over active().

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(std::span<double> y, double alpha, std::span<const double> x) {
    active().axpy(y.data(), alpha, x.data(), y.size());
}

inline void scale(std::span<double> x, double alpha) { active().scale(x.data(), alpha, x.size()); }

}  // namespace smid::kernels
