#include "fairsel/lexico.hpp"

#include <algorithm>

namespace fairsel {

namespace {

const std::array<std::array<int, 4>, 24>& fairness_permutations() {
    static const auto table = [] {
        std::array<std::array<int, 4>, 24> t{};
        std::array<int, 4> perm{0, 1, 2, 3};
        std::size_t i = 0;
        do {
            t[i++] = perm;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return t;
    }();
    return table;
}

} // namespace

VoteResult permutation_vote(const FitnessVector& a, const FitnessVector& b,
                            const LexicoParams& p) {
    const auto fa = a.fairness();
    const auto fb = b.fairness();
    VoteResult v;
    for (const auto& perm : fairness_permutations()) {
        Ordering result = Ordering::Tie;
        for (int m : perm) {
            result = eps_compare(fa[m], fb[m], p.fairness_eps);
            if (result != Ordering::Tie) break;
        }
        switch (result) {
            case Ordering::First: ++v.wins_a; break;
            case Ordering::Second: ++v.wins_b; break;
            case Ordering::Tie: ++v.ties; break;
        }
    }
    return v;
}

Ordering lex_compare(const FitnessVector& a, const FitnessVector& b,
                     const LexicoParams& p) {
    const Ordering acc = eps_compare(a.gm, b.gm, p.accuracy_eps);
    if (acc != Ordering::Tie) return acc;

    const VoteResult v = permutation_vote(a, b, p);
    if (std::abs(v.wins_a - v.wins_b) >= p.fair_rank_eps && v.wins_a != v.wins_b)
        return v.wins_a > v.wins_b ? Ordering::First : Ordering::Second;

    // All objectives tied: the better raw value of the top-priority
    // objective decides.
    if (a.gm > b.gm) return Ordering::First;
    if (b.gm > a.gm) return Ordering::Second;
    return Ordering::Tie;
}

std::size_t lexicographic_top_index(std::span<const Individual> pop,
                                    const LexicoParams& p) {
    if (pop.empty()) throw std::invalid_argument("lexicographic_top on empty population");
    std::size_t champion = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (lex_compare(pop[i], pop[champion], p) == Ordering::First) champion = i;
    return champion;
}

} // namespace fairsel
