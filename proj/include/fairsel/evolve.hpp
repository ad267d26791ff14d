#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/forest.hpp"
#include "fairsel/lexico.hpp"
#include "fairsel/mask.hpp"
#include "fairsel/metrics.hpp"
#include "fairsel/rng.hpp"

namespace fairsel {

struct GAParams {
    int population_size = 101;
    int max_iterations = 50;
    double crossover_prob = 0.9;
    double mutation_prob = 0.05;
    double min_p = 0.1; // ramped-init lower bound on the per-bit on-probability
    double max_p = 0.5; // ramped-init upper bound
    int tournament_size = 2;
    int cv_folds = 3;
    std::uint64_t seed = 0;
};

// Per-bit on-probability p, all-zero masks repaired with one random bit.
template <class URBG>
FeatureMask random_mask(std::size_t features, double p, URBG& rng) {
    FeatureMask m(features, 0);
    for (std::size_t j = 0; j < features; ++j) m[j] = bernoulli(rng, p) ? 1 : 0;
    if (mask_popcount(m) == 0) m[uniform_below(rng, features)] = 1;
    return m;
}

// Ramped initialisation: individual i draws bits with probability
// min_p + (max_p - min_p) * i / (popsize - 1).
template <class URBG>
std::vector<Individual> init_ramped(std::size_t features, const GAParams& g, URBG& rng) {
    std::vector<Individual> pop(g.population_size);
    for (int i = 0; i < g.population_size; ++i) {
        const double t = g.population_size > 1
                             ? double(i) / double(g.population_size - 1)
                             : 0.0;
        const double p = g.min_p + (g.max_p - g.min_p) * t;
        pop[i].mask = random_mask(features, p, rng);
    }
    return pop;
}

// Standard uniform crossover: each position swaps the parents' bits with
// probability one half.
template <class URBG>
std::pair<FeatureMask, FeatureMask> uniform_crossover(const FeatureMask& a,
                                                      const FeatureMask& b, URBG& rng) {
    if (a.size() != b.size()) throw std::invalid_argument("crossover: length mismatch");
    FeatureMask c1 = a, c2 = b;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (bernoulli(rng, 0.5)) std::swap(c1[j], c2[j]);
    return {std::move(c1), std::move(c2)};
}

// Independent per-bit flips; an all-zero result is repaired with one
// random set bit.
template <class URBG>
FeatureMask mutate(const FeatureMask& m, double rate, URBG& rng) {
    FeatureMask out = m;
    for (std::size_t j = 0; j < out.size(); ++j)
        if (bernoulli(rng, rate)) out[j] ^= 1;
    if (!out.empty() && mask_popcount(out) == 0) out[uniform_below(rng, out.size())] = 1;
    return out;
}

// Shared fitness-evaluation context: one fold plan per run, a mask-keyed
// cache, and a mask-derived evaluation seed so cached results are exact.
class EvalContext {
public:
    EvalContext(const Dataset& train, FoldPlan folds, ForestParams forest, int knn_k,
                std::uint64_t master_seed)
        : train_(train), folds_(std::move(folds)), forest_(forest), knn_k_(knn_k),
          master_seed_(master_seed) {}

    FitnessVector evaluate(const FeatureMask& mask);

    // Fills fitness for every unevaluated individual. OpenMP over the
    // distinct uncached masks; bit-identical to the serial reference.
    void evaluate_population(std::vector<Individual>& pop);
    void evaluate_population_serial(std::vector<Individual>& pop);

    std::size_t cache_hits() const { return cache_hits_; }
    std::size_t evaluations() const { return evaluations_; }
    const Dataset& train() const { return train_; }
    const FoldPlan& folds() const { return folds_; }

private:
    void evaluate_population_impl(std::vector<Individual>& pop, bool parallel);

    const Dataset& train_;
    FoldPlan folds_;
    ForestParams forest_;
    int knn_k_;
    std::uint64_t master_seed_;
    std::unordered_map<std::string, FitnessVector> cache_;
    std::size_t cache_hits_ = 0;
    std::size_t evaluations_ = 0;
};

// Per-generation observer: generation index, evaluated population, elite index.
using GenerationObserver =
    std::function<void(int, const std::vector<Individual>&, std::size_t)>;

struct RunOptions {
    std::ostream* log = nullptr;       // line-oriented progress log
    GenerationObserver observer;       // test/diagnostic hook
    bool parallel = true;              // use the OpenMP evaluation kernel
};

// Lexicographic GA main loop. Returns the lexicographic elite of the last
// evaluated generation. Fully deterministic for a given g.seed.
Individual run_lgaffs(const Dataset& train, const GAParams& g, const LexicoParams& lp,
                      const ForestParams& fp, int knn_k, const RunOptions& opts = {});

// One machine-parseable progress line per generation.
void log_generation(std::ostream& out, const char* algo, int gen,
                    const FitnessVector& elite, std::size_t feature_count);

} // namespace fairsel
