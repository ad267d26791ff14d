#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairsel/rng.hpp"

namespace fairsel {

// GA genotype: one byte per feature, 1 = selected.
using FeatureMask = std::vector<std::uint8_t>;

inline std::size_t mask_popcount(const FeatureMask& m) {
    return std::accumulate(m.begin(), m.end(), std::size_t{0},
                           [](std::size_t acc, std::uint8_t b) { return acc + (b != 0); });
}

inline std::string mask_to_string(const FeatureMask& m) {
    std::string s(m.size(), '0');
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) s[i] = '1';
    return s;
}

inline FeatureMask mask_from_string(const std::string& s) {
    FeatureMask m(s.size(), 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1')
            throw std::invalid_argument("mask string must contain only 0/1");
        m[i] = s[i] == '1';
    }
    return m;
}

inline std::uint64_t mask_hash(const FeatureMask& m) {
    std::uint64_t h = splitmix64(m.size());
    std::uint64_t word = 0;
    int nbits = 0;
    for (std::uint8_t b : m) {
        word = (word << 1) | (b != 0);
        if (++nbits == 64) {
            h = splitmix64(h ^ word);
            word = 0;
            nbits = 0;
        }
    }
    if (nbits > 0) h = splitmix64(h ^ word);
    return h;
}

} // namespace fairsel
