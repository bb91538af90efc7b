#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace faqrank::detail {

/// Uniform integer in [0, bound) by rejection sampling on raw mt19937_64
/// output, so sequences do not depend on the standard library's distributions.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = kMax - kMax % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace faqrank::detail
