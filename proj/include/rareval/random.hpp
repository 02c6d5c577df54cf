#pragma once

// Counter-based random streams: every trial draws from a generator seeded by
// (seed, stream, substream), so results do not depend on which thread runs a
// trial or in what order.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace rareval {

inline constexpr std::uint64_t kDefaultSeed = 20230402;

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

// k distinct values from [0, population), in draw order.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t population,
                                                    std::size_t k);

}  // namespace rareval
