#pragma once

#include <cstdint>
#include <random>

namespace fairsel {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent, reproducible seeds
// from a master seed so that adding streams does not reshuffle others.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag1,
                                    std::uint64_t tag2) {
    return derive_seed(derive_seed(seed, tag1), tag2);
}

// Stream tags for the independent RNG streams of a run.
inline constexpr std::uint64_t kStreamInit = 0x494e4954;     // population init + variation
inline constexpr std::uint64_t kStreamFolds = 0x464f4c44;    // internal CV fold plan
inline constexpr std::uint64_t kStreamEval = 0x4556414c;     // per-mask fitness evaluation
inline constexpr std::uint64_t kStreamFinalFit = 0x46494e46; // final model retraining
inline constexpr std::uint64_t kStreamSplit = 0x53504c54;    // outer train/test split

// Uniform double in [0, 1) built from the generator's top 53 bits.
// Implemented by hand so scripted generators in tests have exact control.
template <class URBG>
double uniform01(URBG& g) {
    return static_cast<double>(static_cast<std::uint64_t>(g()) >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n). Requires a full-range 64-bit generator.
template <class URBG>
std::size_t uniform_below(URBG& g, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (UINT64_MAX / bound) * bound;
    std::uint64_t r;
    do {
        r = static_cast<std::uint64_t>(g());
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

template <class URBG>
bool bernoulli(URBG& g, double p) {
    return uniform01(g) < p;
}

} // namespace fairsel
