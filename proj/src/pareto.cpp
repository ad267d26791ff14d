#include "fairsel/pareto.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace fairsel {

bool dominates(const Objectives& a, const Objectives& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dominates: dimension mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<Objectives>& points) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("fast_nondominated_sort: empty input");

    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> dominators(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated[p].push_back(q);
                ++dominators[q];
            } else if (dominates(points[q], points[p])) {
                dominated[q].push_back(p);
                ++dominators[p];
            }
        }
    }

    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p)
        if (dominators[p] == 0) current.push_back(p);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : current)
            for (std::size_t q : dominated[p])
                if (--dominators[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<Objectives>& front) {
    const std::size_t n = front.size();
    if (n == 0) throw std::invalid_argument("crowding_distance: empty front");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    const std::size_t dims = front[0].size();
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < dims; ++m) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return front[a][m] < front[b][m];
        });
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        const double range = front[order.back()][m] - front[order.front()][m];
        if (range <= 0.0) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (dist[order[i]] == inf) continue;
            dist[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / range;
        }
    }
    return dist;
}

RankedPopulation rank_population(const std::vector<Objectives>& points) {
    RankedPopulation rp;
    rp.fronts = fast_nondominated_sort(points);
    rp.rank.assign(points.size(), 0);
    rp.crowding.assign(points.size(), 0.0);
    for (std::size_t f = 0; f < rp.fronts.size(); ++f) {
        std::vector<Objectives> sub;
        sub.reserve(rp.fronts[f].size());
        for (std::size_t idx : rp.fronts[f]) sub.push_back(points[idx]);
        const std::vector<double> cd = crowding_distance(sub);
        for (std::size_t i = 0; i < rp.fronts[f].size(); ++i) {
            rp.rank[rp.fronts[f][i]] = static_cast<int>(f);
            rp.crowding[rp.fronts[f][i]] = cd[i];
        }
    }
    return rp;
}

namespace {

// Binary tournament on (rank, then crowding); an exact tie keeps the
// earlier-sampled contender.
template <class URBG>
std::size_t crowded_tournament(const RankedPopulation& rp, std::size_t n, int size,
                               URBG& rng) {
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(size), n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + uniform_below(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    std::size_t champ = idx[0];
    for (std::size_t i = 1; i < m; ++i) {
        const std::size_t c = idx[i];
        if (rp.rank[c] < rp.rank[champ] ||
            (rp.rank[c] == rp.rank[champ] && rp.crowding[c] > rp.crowding[champ]))
            champ = c;
    }
    return champ;
}

std::vector<Objectives> population_points(const std::vector<Individual>& pop) {
    std::vector<Objectives> pts;
    pts.reserve(pop.size());
    for (const Individual& ind : pop) pts.push_back(search_objectives(ind.fitness));
    return pts;
}

} // namespace

std::vector<Individual> run_pgaffs(const Dataset& train, const GAParams& g,
                                   const ForestParams& fp, int knn_k,
                                   const RunOptions& opts) {
    if (g.population_size < 2) throw std::invalid_argument("population size must be >= 2");
    if (g.max_iterations < 1) throw std::invalid_argument("max iterations must be >= 1");

    Rng evo(derive_seed(g.seed, kStreamInit));
    std::vector<Individual> pop = init_ramped(train.features(), g, evo);
    EvalContext ctx(train, make_folds(train, g.cv_folds, g.seed), fp, knn_k, g.seed);

    auto evaluate = [&](std::vector<Individual>& p) {
        if (opts.parallel)
            ctx.evaluate_population(p);
        else
            ctx.evaluate_population_serial(p);
    };
    evaluate(pop);

    for (int gen = 0; gen < g.max_iterations; ++gen) {
        const RankedPopulation ranked = rank_population(population_points(pop));

        if (opts.log) {
            // Log the accuracy-best member of the current first front.
            std::size_t best = ranked.fronts[0][0];
            for (std::size_t idx : ranked.fronts[0])
                if (pop[idx].fitness.gm > pop[best].fitness.gm) best = idx;
            log_generation(*opts.log, "pgaffs", gen, pop[best].fitness,
                           mask_popcount(pop[best].mask));
        }
        if (opts.observer) opts.observer(gen, pop, ranked.fronts[0][0]);

        std::vector<Individual> offspring;
        offspring.reserve(g.population_size);
        while (static_cast<int>(offspring.size()) < g.population_size) {
            const Individual& p1 = pop[crowded_tournament(ranked, pop.size(),
                                                          g.tournament_size, evo)];
            const Individual& p2 = pop[crowded_tournament(ranked, pop.size(),
                                                          g.tournament_size, evo)];
            FeatureMask c1 = p1.mask, c2 = p2.mask;
            if (bernoulli(evo, g.crossover_prob))
                std::tie(c1, c2) = uniform_crossover(p1.mask, p2.mask, evo);
            c1 = mutate(c1, g.mutation_prob, evo);
            c2 = mutate(c2, g.mutation_prob, evo);
            offspring.push_back(Individual{std::move(c1), {}, false});
            if (static_cast<int>(offspring.size()) < g.population_size)
                offspring.push_back(Individual{std::move(c2), {}, false});
        }
        evaluate(offspring);

        // Elitist survivor selection over the merged population: admit whole
        // fronts, then truncate the split front by descending crowding
        // (ties resolved by lower merged index).
        std::vector<Individual> merged = std::move(pop);
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        const RankedPopulation mr = rank_population(population_points(merged));

        std::vector<Individual> survivors;
        survivors.reserve(g.population_size);
        for (const auto& front : mr.fronts) {
            const std::size_t room = g.population_size - survivors.size();
            if (room == 0) break;
            if (front.size() <= room) {
                for (std::size_t idx : front) survivors.push_back(merged[idx]);
            } else {
                std::vector<std::size_t> by_crowding = front;
                std::stable_sort(by_crowding.begin(), by_crowding.end(),
                                 [&](std::size_t a, std::size_t b) {
                                     return mr.crowding[a] > mr.crowding[b];
                                 });
                for (std::size_t i = 0; i < room; ++i)
                    survivors.push_back(merged[by_crowding[i]]);
            }
        }
        pop = std::move(survivors);
    }

    // Final non-dominated set, deduplicated by mask.
    const RankedPopulation final_rank = rank_population(population_points(pop));
    std::vector<Individual> front;
    std::set<std::string> seen;
    for (std::size_t idx : final_rank.fronts[0]) {
        std::string key = mask_to_string(pop[idx].mask);
        if (seen.insert(std::move(key)).second) front.push_back(pop[idx]);
    }
    return front;
}

} // namespace fairsel
