#pragma once
// Data-parallel inner loops used by the simplex pivots, the kernel-regression
// recursions and dense prediction. Every kernel has a scalar reference
// implementation; wider variants are selected once at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace osar::simd {

enum class Isa { Scalar, Avx2 };

// Function table for one instruction-set variant.
struct KernelTable {
    Isa isa;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    void (*scal)(double a, double* x, std::size_t n);
    // y[r] = sum_c A[r * ld + c] * x[c] for r < rows
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y);
    // out[p] = sum_d ((pts[p * dim + d] - q[d]) * inv_ls[d])^2
    void (*scaled_sq_dist)(const double* pts, std::size_t n, std::size_t dim, const double* q,
                           const double* inv_ls, double* out);
};

const KernelTable& scalar_table();
// Null when the translation unit was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table currently in use. Chosen on first call from CPU features.
const KernelTable& active();

// Overrides the runtime choice; used by the equivalence tests and the CLI.
// Returns false when the requested variant is unavailable.
bool force(Isa isa);

std::string_view name(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}
inline void scal(double a, std::span<double> x) { active().scal(a, x.data(), x.size()); }

}  // namespace osar::simd
