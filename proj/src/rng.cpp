#include "osar/rng.hpp"

namespace osar {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t base_seed, std::uint64_t stream) {
    const std::uint64_t a = splitmix64(base_seed + stream);
    const std::uint64_t b = splitmix64(a ^ 0x5851f42d4c957f2dULL);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

}  // namespace osar
