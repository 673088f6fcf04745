#include "osar/simd.hpp"

#if defined(OSAR_HAVE_AVX2_TU)
#include <immintrin.h>

namespace osar::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
               const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * ld, x, cols);
}

void scaled_sq_dist_avx2(const double* pts, std::size_t n, std::size_t dim, const double* q,
                         const double* inv_ls, double* out) {
    // Four points per step; coordinates are gathered from the row-major layout.
    const __m256i stride = _mm256_set_epi64x(3 * static_cast<long long>(dim),
                                             2 * static_cast<long long>(dim),
                                             static_cast<long long>(dim), 0);
    std::size_t p = 0;
    for (; p + 4 <= n; p += 4) {
        __m256d acc = _mm256_setzero_pd();
        const double* base = pts + p * dim;
        for (std::size_t d = 0; d < dim; ++d) {
            const __m256d v = _mm256_i64gather_pd(base + d, stride, 8);
            const __m256d z = _mm256_mul_pd(_mm256_sub_pd(v, _mm256_set1_pd(q[d])),
                                            _mm256_set1_pd(inv_ls[d]));
            acc = _mm256_fmadd_pd(z, z, acc);
        }
        _mm256_storeu_pd(out + p, acc);
    }
    for (; p < n; ++p) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double z = (pts[p * dim + d] - q[d]) * inv_ls[d];
            s += z * z;
        }
        out[p] = s;
    }
}

constexpr KernelTable kAvx2{Isa::Avx2, dot_avx2, axpy_avx2, scal_avx2, gemv_avx2,
                            scaled_sq_dist_avx2};

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
}

}  // namespace osar::simd

#else

namespace osar::simd {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace osar::simd

#endif
