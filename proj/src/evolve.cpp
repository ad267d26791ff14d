#include "fairsel/evolve.hpp"

#include <iomanip>
#include <stdexcept>

namespace fairsel {

FitnessVector EvalContext::evaluate(const FeatureMask& mask) {
    const std::string key = mask_to_string(mask);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
        ++cache_hits_;
        return it->second;
    }
    ForestParams params = forest_;
    params.seed = derive_seed(master_seed_, kStreamEval, mask_hash(mask));
    FitnessVector fv = evaluate_mask(mask, train_, folds_, params, knn_k_);
    ++evaluations_;
    cache_.emplace(key, fv);
    return fv;
}

void EvalContext::evaluate_population_impl(std::vector<Individual>& pop, bool parallel) {
    // Collect the distinct uncached masks first so each is trained once and
    // the cache is filled serially afterwards (deterministic regardless of
    // the worker count).
    std::vector<std::string> keys;
    std::vector<const FeatureMask*> masks;
    std::unordered_map<std::string, std::size_t> slot;
    for (const Individual& ind : pop) {
        if (ind.evaluated) continue;
        std::string key = mask_to_string(ind.mask);
        if (cache_.count(key) || slot.count(key)) continue;
        slot.emplace(key, masks.size());
        keys.push_back(std::move(key));
        masks.push_back(&ind.mask);
    }

    std::vector<FitnessVector> results(masks.size());
    const auto total = static_cast<std::ptrdiff_t>(masks.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        ForestParams params = forest_;
        params.seed = derive_seed(master_seed_, kStreamEval, mask_hash(*masks[i]));
        results[i] = evaluate_mask(*masks[i], train_, folds_, params, knn_k_);
    }
    evaluations_ += masks.size();
    for (std::size_t i = 0; i < masks.size(); ++i) cache_.emplace(keys[i], results[i]);

    for (Individual& ind : pop) {
        if (ind.evaluated) continue;
        auto it = cache_.find(mask_to_string(ind.mask));
        if (it == cache_.end()) throw std::logic_error("evaluation cache miss");
        ind.fitness = it->second;
        ind.evaluated = true;
    }
}

void EvalContext::evaluate_population(std::vector<Individual>& pop) {
    evaluate_population_impl(pop, true);
}

void EvalContext::evaluate_population_serial(std::vector<Individual>& pop) {
    evaluate_population_impl(pop, false);
}

void log_generation(std::ostream& out, const char* algo, int gen,
                    const FitnessVector& elite, std::size_t feature_count) {
    out << "algo=" << algo << "\tgen=" << gen << std::setprecision(6) << std::fixed
        << "\tgm=" << elite.gm << "\tdp=" << elite.dp
        << "\tconsistency=" << elite.consistency << "\tfperbs=" << elite.fperbs
        << "\tfnerbs=" << elite.fnerbs << "\tfeatures=" << feature_count << "\n";
    out.unsetf(std::ios::floatfield);
}

Individual run_lgaffs(const Dataset& train, const GAParams& g, const LexicoParams& lp,
                      const ForestParams& fp, int knn_k, const RunOptions& opts) {
    if (g.population_size < 2) throw std::invalid_argument("population size must be >= 2");
    if (g.max_iterations < 1) throw std::invalid_argument("max iterations must be >= 1");

    Rng evo(derive_seed(g.seed, kStreamInit));
    std::vector<Individual> pop = init_ramped(train.features(), g, evo);
    EvalContext ctx(train, make_folds(train, g.cv_folds, g.seed), fp, knn_k, g.seed);

    Individual best;
    for (int gen = 0; gen < g.max_iterations; ++gen) {
        if (opts.parallel)
            ctx.evaluate_population(pop);
        else
            ctx.evaluate_population_serial(pop);

        const std::size_t top = lexicographic_top_index(pop, lp);
        best = pop[top];
        if (opts.log)
            log_generation(*opts.log, "lgaffs", gen, best.fitness, mask_popcount(best.mask));
        if (opts.observer) opts.observer(gen, pop, top);

        std::vector<Individual> next;
        next.reserve(g.population_size);
        next.push_back(best); // lexicographic elitism: copied unaltered
        while (static_cast<int>(next.size()) < g.population_size) {
            const Individual& p1 = tournament_select(pop, lp, g.tournament_size, evo);
            const Individual& p2 = tournament_select(pop, lp, g.tournament_size, evo);
            FeatureMask c1 = p1.mask, c2 = p2.mask;
            if (bernoulli(evo, g.crossover_prob))
                std::tie(c1, c2) = uniform_crossover(p1.mask, p2.mask, evo);
            c1 = mutate(c1, g.mutation_prob, evo);
            c2 = mutate(c2, g.mutation_prob, evo);
            next.push_back(Individual{std::move(c1), {}, false});
            if (static_cast<int>(next.size()) < g.population_size)
                next.push_back(Individual{std::move(c2), {}, false});
        }
        pop = std::move(next);
    }
    return best;
}

} // namespace fairsel
