#include "osar/simd.hpp"

namespace osar::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * ld, x, cols);
}

void scaled_sq_dist_scalar(const double* pts, std::size_t n, std::size_t dim, const double* q,
                           const double* inv_ls, double* out) {
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double z = (pts[p * dim + d] - q[d]) * inv_ls[d];
            s += z * z;
        }
        out[p] = s;
    }
}

constexpr KernelTable kScalar{Isa::Scalar, dot_scalar, axpy_scalar, scal_scalar, gemv_scalar,
                              scaled_sq_dist_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace osar::simd
