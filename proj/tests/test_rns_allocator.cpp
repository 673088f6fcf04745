#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "osar/common.hpp"
#include "osar/rates.hpp"
#include "osar/rns_allocator.hpp"

using namespace osar;

TEST_CASE("empty batch") {
    DeficitGreedyAllocator a;
    PointAllocatorState s{{3, 4}, {0, 1}, {1, 1}};
    CHECK(a.allocate_batch(s, 0) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("deficit-greedy fills the starved arm") {
    DeficitGreedyAllocator a;
    PointAllocatorState s{{10, 0}, {0, 1}, {1, 1}};
    CHECK(a.allocate_batch(s, 10) == std::vector<std::size_t>{0, 10});
}

TEST_CASE("tied plug-in best splits uniformly") {
    PointAllocatorState s{{5, 5, 5}, {1, 1, 2}, {1, 1, 1}};
    const auto t = DeficitGreedyAllocator::target(s);
    for (double v : t) CHECK(v == doctest::Approx(1.0 / 3));
    DeficitGreedyAllocator a;
    const auto out = a.allocate_batch(s, 9);
    CHECK(out == std::vector<std::size_t>{3, 3, 3});
}

TEST_CASE("batch counts always sum to the batch") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    DeficitGreedyAllocator a;
    for (int rep = 0; rep < 50; ++rep) {
        PointAllocatorState s;
        for (int i = 0; i < 5; ++i) {
            s.counts.push_back(rng() % 20);
            s.means.push_back(u(rng));
            s.stds.push_back(0.5 + u(rng));
        }
        const auto out = a.allocate_batch(s, 37);
        CHECK(std::accumulate(out.begin(), out.end(), std::size_t{0}) == 37);
    }
}

TEST_CASE("long run tracks the optimal static fractions") {
    const std::vector<double> m{0, 1, 1}, sd{1, 1, 1};
    const auto opt = optimal_point_rate(m, sd, 0);
    DeficitGreedyAllocator a;
    PointAllocatorState s{{0, 0, 0}, m, sd};
    std::size_t total = 0;
    while (total < 100000) {
        const auto out = a.allocate_batch(s, 50);
        for (std::size_t i = 0; i < 3; ++i) s.counts[i] += out[i];
        total += 50;
    }
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(static_cast<double>(s.counts[i]) / static_cast<double>(total) - opt.alpha[i]) <= 0.02);
}

TEST_CASE("every arm keeps growing at least logarithmically") {
    // Far arm with a tiny optimal share still passes log(total).
    const std::vector<double> m{0, 0.5, 50}, sd{1, 1, 1};
    DeficitGreedyAllocator a;
    PointAllocatorState s{{1, 1, 1}, m, sd};
    std::size_t total = 3;
    while (total < 20003) {
        const auto out = a.allocate_batch(s, 50);
        for (std::size_t i = 0; i < 3; ++i) s.counts[i] += out[i];
        total += 50;
    }
    CHECK(static_cast<double>(s.counts[2]) >= std::floor(std::log(static_cast<double>(total) - 50)));
}

TEST_CASE("equal allocator and the factory") {
    EqualAllocator e;
    PointAllocatorState s{{2, 0, 1}, {0, 0, 0}, {1, 1, 1}};
    CHECK(e.allocate_batch(s, 3) == std::vector<std::size_t>{0, 2, 1});
    CHECK(make_allocator("deficit_greedy")->name() == "deficit_greedy");
    CHECK(make_allocator("equal")->name() == "equal");
    CHECK_THROWS_AS(make_allocator("bold"), ConfigError);
    DeficitGreedyAllocator a;
    PointAllocatorState bad{{1, 1}, {0}, {1, 1}};
    CHECK_THROWS_AS(a.allocate_batch(bad, 3), InputError);
}
