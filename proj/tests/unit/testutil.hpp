#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/rng.hpp"

namespace testutil {

// Generator whose outputs are scripted, for driving randomised operators
// through exact traces. Values >= 2^63 read as "keep", < 2^63 as "take/swap"
// under the library's uniform01 (< 0.5) convention.
struct ScriptedRng {
    using result_type = std::uint64_t;
    std::vector<std::uint64_t> values;
    std::size_t next = 0;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }
    result_type operator()() {
        if (next >= values.size()) throw std::runtime_error("scripted rng exhausted");
        return values[next++];
    }
};

inline constexpr std::uint64_t kLow = 0;                      // uniform01 -> 0.0
inline constexpr std::uint64_t kHigh = ~std::uint64_t{0};     // uniform01 -> ~1.0

// Random dataset with both classes and both groups guaranteed.
inline fairsel::Dataset random_dataset(std::size_t n, std::size_t f, std::uint64_t seed) {
    fairsel::Dataset d;
    d.x = fairsel::Matrix(n, f);
    d.y.resize(n);
    d.s.resize(n);
    fairsel::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) d.x(i, j) = fairsel::uniform01(rng);
        d.y[i] = fairsel::bernoulli(rng, 0.5) ? 1 : 0;
        d.s[i] = fairsel::bernoulli(rng, 0.5) ? 1 : 0;
    }
    // force both values of y and s to appear
    d.y[0] = 0;
    d.y[1] = 1;
    d.s[0] = 1;
    d.s[1] = 0;
    for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("f" + std::to_string(j));
    return d;
}

// Planted instance: y is a clean threshold of feature 0, independent of s;
// remaining features are noise.
inline fairsel::Dataset planted_dataset(std::size_t n, std::size_t f, std::uint64_t seed) {
    fairsel::Dataset d = random_dataset(n, f, seed);
    for (std::size_t i = 0; i < n; ++i) d.y[i] = d.x(i, 0) > 0.5 ? 1 : 0;
    // keep both classes present even on tiny n
    if (n >= 2) {
        d.x(0, 0) = 0.1;
        d.y[0] = 0;
        d.x(1, 0) = 0.9;
        d.y[1] = 1;
    }
    return d;
}

} // namespace testutil
