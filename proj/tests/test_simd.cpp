#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "osar/simd.hpp"
#include "osar/validation.hpp"

using namespace osar;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels against direct loops") {
    const auto& s = simd::scalar_table();
    std::mt19937_64 rng(1);
    const auto x = random_vec(rng, 13), y = random_vec(rng, 13);
    double d = 0.0;
    for (int i = 0; i < 13; ++i) d += x[i] * y[i];
    CHECK(s.dot(x.data(), y.data(), 13) == doctest::Approx(d).epsilon(1e-14));
    auto z = y;
    s.axpy(0.5, x.data(), z.data(), 13);
    for (int i = 0; i < 13; ++i) CHECK(z[i] == doctest::Approx(y[i] + 0.5 * x[i]));
    s.scal(2.0, z.data(), 13);
    for (int i = 0; i < 13; ++i) CHECK(z[i] == doctest::Approx(2.0 * (y[i] + 0.5 * x[i])));
}

TEST_CASE("AVX2 kernels match the scalar reference, tails included") {
    const simd::KernelTable* v = simd::avx2_table();
    if (!v) {
        MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
        return;
    }
    const auto& s = simd::scalar_table();
    std::mt19937_64 rng(2);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 101u}) {
        const auto x = random_vec(rng, n), y = random_vec(rng, n);
        CHECK(std::abs(s.dot(x.data(), y.data(), n) - v->dot(x.data(), y.data(), n)) < 1e-12);
        auto a = y, b = y;
        s.axpy(-0.3, x.data(), a.data(), n);
        v->axpy(-0.3, x.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
        s.scal(1.7, a.data(), n);
        v->scal(1.7, b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);

        // gemv with a padded leading dimension
        const std::size_t rows = 5, ld = n + 3;
        const auto m = random_vec(rng, rows * ld);
        std::vector<double> o1(rows), o2(rows);
        s.gemv(m.data(), rows, n, ld, x.data(), o1.data());
        v->gemv(m.data(), rows, n, ld, x.data(), o2.data());
        for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(o1[r] - o2[r]) < 1e-12);
    }
    for (std::size_t dim : {1u, 2u, 3u, 10u}) {
        const std::size_t n = 37;
        const auto pts = random_vec(rng, n * dim), q = random_vec(rng, dim);
        std::vector<double> inv(dim, 1.3), o1(n), o2(n);
        s.scaled_sq_dist(pts.data(), n, dim, q.data(), inv.data(), o1.data());
        v->scaled_sq_dist(pts.data(), n, dim, q.data(), inv.data(), o2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-12);
    }
    CHECK(suite_simd(200, 3).passed());
}

TEST_CASE("forcing the kernel table") {
    const simd::Isa before = simd::active().isa;
    CHECK(simd::force(simd::Isa::Scalar));
    CHECK(simd::active().isa == simd::Isa::Scalar);
    CHECK(simd::force(simd::Isa::Avx2) == (simd::avx2_table() != nullptr));
    simd::force(before);
    CHECK(simd::name(simd::Isa::Scalar) == "scalar");
}
