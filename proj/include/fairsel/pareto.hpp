#pragma once

#include <cstdint>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/evolve.hpp"
#include "fairsel/forest.hpp"
#include "fairsel/lexico.hpp"

namespace fairsel {

// Objective values to maximise. Dimension-agnostic so the sorting machinery
// serves both the 2-objective search and 5-measure analyses.
using Objectives = std::vector<double>;

// True iff a is no worse than b everywhere and strictly better somewhere.
bool dominates(const Objectives& a, const Objectives& b);

// Fast non-dominated sort: fronts partition the input; front 0 is the
// non-dominated set.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<Objectives>& points);

// Crowding distances for one front, aligned with the front's input order.
// Boundary points per objective get the infinite sentinel; a zero-range
// objective contributes nothing.
std::vector<double> crowding_distance(const std::vector<Objectives>& front);

struct RankedPopulation {
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<int> rank;         // per input index
    std::vector<double> crowding;  // per input index, computed within its front
};

RankedPopulation rank_population(const std::vector<Objectives>& points);

// The two search objectives: gm and the arithmetic mean of the four
// fairness measures.
inline Objectives search_objectives(const FitnessVector& fv) {
    return {fv.gm, fv.mean_fairness()};
}

// NSGA-II loop sharing the GA substrate with the lexicographic GA.
// Returns the deduplicated first front of the final population.
std::vector<Individual> run_pgaffs(const Dataset& train, const GAParams& g,
                                   const ForestParams& fp, int knn_k,
                                   const RunOptions& opts = {});

} // namespace fairsel
