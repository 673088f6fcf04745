#pragma once
#include <cstdint>
#include <random>

namespace osar {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Stream for macrorun `stream` under `base_seed`. Independent of worker count
// and of the order in which runs are scheduled.
Rng make_rng(std::uint64_t base_seed, std::uint64_t stream);

}  // namespace osar
