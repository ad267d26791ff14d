// Command-line front end: seed-controlled feature-selection experiments
// (run), Table-style comparison reports (compare), and a standalone
// fairness/accuracy audit of external predictions (metrics).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairsel/compare.hpp"
#include "fairsel/experiment.hpp"

namespace fs = std::filesystem;
using namespace fairsel;

namespace {

int cmd_run(const ExperimentSpec& spec_in, bool fast, bool quiet) {
    ExperimentSpec spec = spec_in;
    if (fast) spec.apply_fast_mode();
    std::ostream* log = quiet ? nullptr : &std::cout;
    const auto written = run_experiment(spec, log);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_compare(const std::vector<std::string>& result_files, const std::string& fixture,
                const std::string& out_dir) {
    std::vector<ProblemResult> results;
    if (!fixture.empty()) {
        results = load_fixture_csv(fixture);
    } else {
        if (result_files.empty())
            throw std::runtime_error("compare needs result files or --fixture");
        for (const auto& path : result_files) results.push_back(load_result_json(path));
    }
    const ComparisonReport report = build_report(results, LexicoParams{});

    fs::create_directories(out_dir);
    {
        std::ofstream table(fs::path(out_dir) / "report.tsv");
        report.write_table(table);
        if (!table) throw std::runtime_error("failed to write report.tsv");
    }
    {
        std::ofstream summary(fs::path(out_dir) / "summary.json");
        summary << report.summary_json() << "\n";
        if (!summary) throw std::runtime_error("failed to write summary.json");
    }
    std::cout << report.summary_json() << "\n";
    return 0;
}

int cmd_metrics(const std::string& data_path, const std::string& config_path,
                const std::string& pred_path, int knn_k) {
    const DatasetConfig config = DatasetConfig::from_json_file(config_path);
    const Dataset d = load_csv(data_path, config);

    std::ifstream in(pred_path);
    if (!in) throw std::runtime_error("cannot open predictions: " + pred_path);
    std::vector<std::uint8_t> pred;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "0")
            pred.push_back(0);
        else if (line == "1")
            pred.push_back(1);
        else
            throw std::runtime_error("predictions must be one 0/1 per line, got '" + line + "'");
    }
    if (pred.size() != d.size())
        throw std::runtime_error("prediction count does not match dataset size");

    const GroupConfusion gc = group_confusion(pred, d.y, d.s);
    const int k_eff = std::min<int>(knn_k, static_cast<int>(d.size()) - 1);
    std::cout << "gm=" << gm_sen_spec(gc) << "\n"
              << "dp=" << demographic_parity(pred, d.s) << "\n"
              << "consistency=" << consistency(pred, d.x, k_eff) << "\n"
              << "fperbs=" << fperbs(gc) << "\n"
              << "fnerbs=" << fnerbs(gc) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair feature selection with lexicographic and Pareto genetic algorithms"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    bool fast = false, quiet = false;
    auto* run = app.add_subcommand("run", "Run the GA(s) on a dataset and write result artifacts");
    run->add_option("--data", spec.data_path, "Delimited dataset file")->required();
    run->add_option("--config", spec.config_path, "Dataset config (JSON)")->required();
    run->add_option("--algo", spec.algorithm, "lgaffs | pgaffs | both")
        ->check(CLI::IsMember({"lgaffs", "pgaffs", "both"}));
    run->add_option("--seeds", spec.seeds, "Seed list")->delimiter(',');
    run->add_option("--out", spec.out_dir, "Output directory");
    run->add_option("--pop", spec.ga.population_size, "Population size");
    run->add_option("--iters", spec.ga.max_iterations, "GA iterations");
    run->add_option("--crossover", spec.ga.crossover_prob, "Crossover probability");
    run->add_option("--mutation", spec.ga.mutation_prob, "Per-bit mutation probability");
    run->add_option("--min-p", spec.ga.min_p, "Ramped-init lower bound");
    run->add_option("--max-p", spec.ga.max_p, "Ramped-init upper bound");
    run->add_option("--tournament", spec.ga.tournament_size, "Tournament size");
    run->add_option("--folds", spec.ga.cv_folds, "Internal CV folds");
    run->add_option("--trees", spec.forest.n_trees, "Forest size");
    run->add_option("--depth", spec.forest.max_depth, "Tree depth limit");
    run->add_option("--min-leaf", spec.forest.min_leaf, "Minimum leaf size");
    run->add_flag("--no-bootstrap", [&spec](std::size_t) { spec.forest.bootstrap = false; },
                  "Disable bootstrap resampling");
    run->add_option("--acc-eps", spec.lex.accuracy_eps, "Accuracy epsilon");
    run->add_option("--fair-eps", spec.lex.fairness_eps, "Fairness epsilon");
    run->add_option("--fair-rank-eps", spec.lex.fair_rank_eps, "Permutation-win margin");
    run->add_option("--fair-test-eps", spec.lex.fair_test_eps, "Stored companion parameter");
    run->add_option("--knn-k", spec.knn_k, "Neighbour count for consistency");
    run->add_option("--test-fraction", spec.test_fraction, "Held-out fraction");
    run->add_flag("--fast", fast, "Desk-scale defaults (small forest/population)");
    run->add_flag("--quiet", quiet, "Suppress per-generation progress");

    std::vector<std::string> result_files;
    std::string fixture, compare_out = ".";
    auto* cmp = app.add_subcommand("compare", "Build comparison reports from result artifacts");
    cmp->add_option("results", result_files, "Result JSON files");
    cmp->add_option("--fixture", fixture, "Measure-pair fixture CSV (statistics-only mode)");
    cmp->add_option("--out", compare_out, "Output directory");

    std::string m_data, m_config, m_pred;
    int m_k = 5;
    auto* met = app.add_subcommand("metrics", "Score an external prediction file");
    met->add_option("--data", m_data, "Delimited dataset file")->required();
    met->add_option("--config", m_config, "Dataset config (JSON)")->required();
    met->add_option("--pred", m_pred, "Predictions file, one 0/1 per line")->required();
    met->add_option("--knn-k", m_k, "Neighbour count for consistency");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(spec, fast, quiet);
        if (cmp->parsed()) return cmd_compare(result_files, fixture, compare_out);
        if (met->parsed()) return cmd_metrics(m_data, m_config, m_pred, m_k);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
