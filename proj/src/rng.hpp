#pragma once

#include <cstdint>
#include <random>

namespace lgsim {

/// Generator for one independent sampling task. The seed is scrambled with
/// SplitMix64 so neighbouring seeds (base + grid index) give unrelated streams.
std::mt19937_64 make_rng(std::uint64_t seed);

} // namespace lgsim
