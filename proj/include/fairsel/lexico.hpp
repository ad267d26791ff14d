#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairsel/mask.hpp"
#include "fairsel/metrics.hpp"
#include "fairsel/rng.hpp"

namespace fairsel {

struct LexicoParams {
    double accuracy_eps = 0.01;
    double fairness_eps = 0.01;
    int fair_rank_eps = 1; // minimum permutation-win margin that decides
    int fair_test_eps = 1; // accepted and stored; inert in this ranking
};

struct Individual {
    FeatureMask mask;
    FitnessVector fitness;
    bool evaluated = false;
};

enum class Ordering { First, Second, Tie };

inline Ordering eps_compare(double v1, double v2, double eps) {
    if (v1 - v2 > eps) return Ordering::First;
    if (v2 - v1 > eps) return Ordering::Second;
    return Ordering::Tie;
}

struct VoteResult {
    int wins_a = 0;
    int wins_b = 0;
    int ties = 0;
};

// All 24 priority orders of the four fairness measures; each order is
// walked with eps_compare until a measure decides it.
VoteResult permutation_vote(const FitnessVector& a, const FitnessVector& b,
                            const LexicoParams& p);

// Accuracy first (gm within accuracy_eps), then the 24-permutation fairness
// vote, then raw gm as the final tie break.
Ordering lex_compare(const FitnessVector& a, const FitnessVector& b,
                     const LexicoParams& p);

inline Ordering lex_compare(const Individual& a, const Individual& b,
                            const LexicoParams& p) {
    return lex_compare(a.fitness, b.fitness, p);
}

// Linear champion scan; deterministic for a fixed population order.
std::size_t lexicographic_top_index(std::span<const Individual> pop,
                                    const LexicoParams& p);

inline const Individual& lexicographic_top(std::span<const Individual> pop,
                                           const LexicoParams& p) {
    return pop[lexicographic_top_index(pop, p)];
}

// Sample `size` distinct individuals uniformly and return the lex_compare
// winner; on a tie the earlier-sampled contender stands.
template <class URBG>
std::size_t tournament_select_index(std::span<const Individual> pop,
                                    const LexicoParams& p, int size, URBG& rng) {
    if (pop.empty()) throw std::invalid_argument("tournament on empty population");
    const std::size_t n = pop.size();
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(size), n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + uniform_below(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    std::size_t champion = idx[0];
    for (std::size_t i = 1; i < m; ++i)
        if (lex_compare(pop[idx[i]], pop[champion], p) == Ordering::First)
            champion = idx[i];
    return champion;
}

template <class URBG>
const Individual& tournament_select(std::span<const Individual> pop,
                                    const LexicoParams& p, int size, URBG& rng) {
    return pop[tournament_select_index(pop, p, size, rng)];
}

} // namespace fairsel
