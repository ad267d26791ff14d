// Benchmark comparing the OpenMP kernels against their serial reference
// implementations: forest training and population fitness evaluation.

#include <chrono>
#include <iostream>
#include <vector>

#include <omp.h>

#include "fairsel/dataset.hpp"
#include "fairsel/evolve.hpp"
#include "fairsel/forest.hpp"

using namespace fairsel;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Dataset synthetic(std::size_t n, std::size_t f, std::uint64_t seed) {
    Dataset d;
    d.x = Matrix(n, f);
    d.y.resize(n);
    d.s.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) d.x(i, j) = uniform01(rng);
        double score = d.x(i, 0) + 0.5 * d.x(i, 1) - 0.3 * d.x(i, 2);
        d.y[i] = score > 0.6 ? 1 : 0;
        d.s[i] = bernoulli(rng, 0.4) ? 1 : 0;
    }
    for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("f" + std::to_string(j));
    return d;
}

template <class F>
double best_of(int reps, F&& body) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        body();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

} // namespace

int main() {
    const int threads = omp_get_max_threads();
    std::cout << "threads=" << threads << "\n\n";

    const Dataset d = synthetic(2000, 40, 7);
    FeatureMask mask(d.features(), 1);

    ForestParams fp;
    fp.n_trees = 96;
    fp.seed = 11;

    const double t_fit_serial =
        best_of(3, [&] { (void)fit_serial(d.x, d.y, mask, fp); });
    const double t_fit_parallel = best_of(3, [&] { (void)fit(d.x, d.y, mask, fp); });
    std::cout << "forest fit (" << fp.n_trees << " trees, n=2000, f=40)\n"
              << "  serial   " << t_fit_serial << " ms\n"
              << "  parallel " << t_fit_parallel << " ms  (speedup "
              << t_fit_serial / t_fit_parallel << "x)\n\n";

    if (fit_serial(d.x, d.y, mask, fp) == fit(d.x, d.y, mask, fp))
        std::cout << "  models identical: yes\n\n";
    else {
        std::cout << "  models identical: NO (bug)\n";
        return 1;
    }

    GAParams g;
    g.population_size = 32;
    g.seed = 3;
    ForestParams small = fp;
    small.n_trees = 10;
    small.max_depth = 8;

    Rng rng(derive_seed(g.seed, kStreamInit));
    const std::vector<Individual> pop = init_ramped(d.features(), g, rng);
    const FoldPlan folds = make_folds(d, 3, g.seed);

    const double t_eval_serial = best_of(2, [&] {
        EvalContext ctx(d, folds, small, 5, g.seed);
        auto p = pop;
        ctx.evaluate_population_serial(p);
    });
    const double t_eval_parallel = best_of(2, [&] {
        EvalContext ctx(d, folds, small, 5, g.seed);
        auto p = pop;
        ctx.evaluate_population(p);
    });
    std::cout << "population evaluation (32 individuals, 3-fold CV)\n"
              << "  serial   " << t_eval_serial << " ms\n"
              << "  parallel " << t_eval_parallel << " ms  (speedup "
              << t_eval_serial / t_eval_parallel << "x)\n";

    EvalContext ca(d, folds, small, 5, g.seed), cb(d, folds, small, 5, g.seed);
    auto pa = pop, pb = pop;
    ca.evaluate_population_serial(pa);
    cb.evaluate_population(pb);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (!(pa[i].fitness == pb[i].fitness)) {
            std::cout << "  results identical: NO (bug)\n";
            return 1;
        }
    }
    std::cout << "  results identical: yes\n";
    return 0;
}
