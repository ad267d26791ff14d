#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "fairsel/compare.hpp"
#include "fairsel/dataset.hpp"
#include "fairsel/evolve.hpp"
#include "fairsel/forest.hpp"
#include "fairsel/lexico.hpp"
#include "fairsel/pareto.hpp"

namespace fairsel {

// A reproducible experiment: which problem, which algorithms, all
// parameters, and the seeds to run. Every artifact embeds the resolved
// spec (out_dir excluded: it is the delivery location, not part of the
// experiment identity).
struct ExperimentSpec {
    std::string data_path;
    std::string config_path;
    std::string algorithm = "both"; // lgaffs | pgaffs | both
    GAParams ga;
    LexicoParams lex;
    ForestParams forest;
    int knn_k = 5;
    double test_fraction = 0.3;
    std::vector<std::uint64_t> seeds{1};
    std::string out_dir = ".";
    bool fast_mode = false;

    // Fast mode shrinks the forest (10 trees, depth 8), the population (20)
    // and the iteration count (10) for desk-scale runs.
    void apply_fast_mode();

    std::string resolved_json() const; // deterministic, out_dir excluded
};

// Train a forest on the full training side under the mask and score the
// held-out side with all five measures (consistency over the masked
// held-out feature space).
FitnessVector evaluate_on_test(const FeatureMask& mask, const Dataset& train,
                               const Dataset& test, const ForestParams& params,
                               int knn_k, std::uint64_t seed);

// Runs every seed of the spec and writes one ProblemResult artifact (JSON)
// plus one Pareto-front export (TSV) per seed. Artifacts are written under
// a .partial name and renamed on success. Returns the result-file paths.
std::vector<std::string> run_experiment(const ExperimentSpec& spec, std::ostream* log);

// Artifact IO for the compare pipeline.
ProblemResult load_result_json(const std::string& path);

} // namespace fairsel
