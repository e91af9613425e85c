#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bssdim {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche,
// which makes it safe for turning structured indices into seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a master seed and a tuple of indices (replicate number, hypothesis,
// repetition, ...) into one stream seed. The result depends only on the
// values passed, never on which thread asks, so parallel schedules cannot
// change any random draw.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t p : parts) {
        h = mix64(h ^ mix64(p));
    }
    return h;
}

inline Rng make_stream(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> parts = {}) {
    return Rng(derive_seed(seed, parts));
}

}  // namespace bssdim
