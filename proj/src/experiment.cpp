#include "fairsel/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fairsel {

namespace fs = std::filesystem;

void ExperimentSpec::apply_fast_mode() {
    fast_mode = true;
    forest.n_trees = 10;
    forest.max_depth = 8;
    ga.population_size = 20;
    ga.max_iterations = 10;
}

namespace {

nlohmann::json ga_json(const GAParams& g) {
    return {{"population_size", g.population_size},
            {"max_iterations", g.max_iterations},
            {"crossover_prob", g.crossover_prob},
            {"mutation_prob", g.mutation_prob},
            {"min_p", g.min_p},
            {"max_p", g.max_p},
            {"tournament_size", g.tournament_size},
            {"cv_folds", g.cv_folds}};
}

void ga_from_json(const nlohmann::json& j, GAParams& g) {
    j.at("population_size").get_to(g.population_size);
    j.at("max_iterations").get_to(g.max_iterations);
    j.at("crossover_prob").get_to(g.crossover_prob);
    j.at("mutation_prob").get_to(g.mutation_prob);
    j.at("min_p").get_to(g.min_p);
    j.at("max_p").get_to(g.max_p);
    j.at("tournament_size").get_to(g.tournament_size);
    j.at("cv_folds").get_to(g.cv_folds);
}

nlohmann::json lex_json(const LexicoParams& p) {
    return {{"accuracy_eps", p.accuracy_eps},
            {"fairness_eps", p.fairness_eps},
            {"fair_rank_eps", p.fair_rank_eps},
            {"fair_test_eps", p.fair_test_eps}};
}

nlohmann::json forest_json(const ForestParams& p) {
    return {{"n_trees", p.n_trees},
            {"max_depth", p.max_depth},
            {"min_leaf", p.min_leaf},
            {"bootstrap", p.bootstrap}};
}

nlohmann::json fitness_json(const FitnessVector& fv) {
    return {{"gm", fv.gm},
            {"dp", fv.dp},
            {"consistency", fv.consistency},
            {"fperbs", fv.fperbs},
            {"fnerbs", fv.fnerbs},
            {"degenerate", fv.degenerate},
            {"clamped", fv.clamped}};
}

FitnessVector fitness_from_json(const nlohmann::json& j) {
    FitnessVector fv;
    j.at("gm").get_to(fv.gm);
    j.at("dp").get_to(fv.dp);
    j.at("consistency").get_to(fv.consistency);
    j.at("fperbs").get_to(fv.fperbs);
    j.at("fnerbs").get_to(fv.fnerbs);
    j.at("degenerate").get_to(fv.degenerate);
    j.at("clamped").get_to(fv.clamped);
    return fv;
}

constexpr const char* kResultSchema = "fairsel/result/v1";

void write_atomically(const fs::path& path, const std::string& contents) {
    const fs::path partial = path.string() + ".partial";
    {
        std::ofstream out(partial);
        if (!out) throw std::runtime_error("cannot write: " + partial.string());
        out << contents;
        if (!out) throw std::runtime_error("write failure: " + partial.string());
    }
    fs::rename(partial, path);
}

std::string format_measure(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

std::string ExperimentSpec::resolved_json() const {
    nlohmann::json j;
    j["data_path"] = data_path;
    j["config_path"] = config_path;
    j["algorithm"] = algorithm;
    j["ga"] = ga_json(ga);
    j["lexico"] = lex_json(lex);
    j["forest"] = forest_json(forest);
    j["knn_k"] = knn_k;
    j["test_fraction"] = test_fraction;
    j["fast_mode"] = fast_mode;
    nlohmann::json sl = nlohmann::json::array();
    for (auto s : seeds) sl.push_back(s);
    j["seeds"] = sl;
    return j.dump(2);
}

FitnessVector evaluate_on_test(const FeatureMask& mask, const Dataset& train,
                               const Dataset& test, const ForestParams& params,
                               int knn_k, std::uint64_t seed) {
    ForestParams fp = params;
    fp.seed = derive_seed(seed, kStreamFinalFit, mask_hash(mask));
    ForestModel model = fit(train.x, train.y, mask, fp);
    const std::vector<std::uint8_t> pred = model.predict(test.x);

    FitnessVector fv;
    const GroupConfusion gc = group_confusion(pred, test.y, test.s);
    fv.gm = gm_sen_spec(gc);
    fv.dp = demographic_parity(pred, test.s);
    bool deg_fp = false, deg_fn = false;
    fv.fperbs = fperbs(gc, &deg_fp);
    fv.fnerbs = fnerbs(gc, &deg_fn);
    fv.degenerate = deg_fp || deg_fn;

    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < mask.size(); ++j)
        if (mask[j]) cols.push_back(j);
    Matrix sub(test.size(), cols.size());
    for (std::size_t i = 0; i < test.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = test.x(i, cols[j]);
    const int k_eff = std::min<int>(knn_k, static_cast<int>(test.size()) - 1);
    fv.consistency = consistency(pred, sub, k_eff, &fv.clamped);
    return fv;
}

namespace {

nlohmann::json solution_json(const Individual& ind, const FitnessVector& test_fv) {
    return {{"mask", mask_to_string(ind.mask)},
            {"selected_features", mask_popcount(ind.mask)},
            {"fitness_train", fitness_json(ind.fitness)},
            {"fitness_test", fitness_json(test_fv)}};
}

void write_front_tsv(const fs::path& path, const std::vector<Individual>& front,
                     const std::vector<FitnessVector>& test_fvs) {
    std::ostringstream out;
    out << "mask\tselected_features\tobj_gm\tobj_mean_fairness"
        << "\tgm\tdp\tconsistency\tfperbs\tfnerbs"
        << "\ttest_gm\ttest_dp\ttest_consistency\ttest_fperbs\ttest_fnerbs\n";
    for (std::size_t i = 0; i < front.size(); ++i) {
        const FitnessVector& tr = front[i].fitness;
        const FitnessVector& te = test_fvs[i];
        out << mask_to_string(front[i].mask) << '\t' << mask_popcount(front[i].mask);
        out << '\t' << format_measure(tr.gm) << '\t' << format_measure(tr.mean_fairness());
        for (double v : measure_values(tr)) out << '\t' << format_measure(v);
        for (double v : measure_values(te)) out << '\t' << format_measure(v);
        out << '\n';
    }
    write_atomically(path, out.str());
}

} // namespace

std::vector<std::string> run_experiment(const ExperimentSpec& spec, std::ostream* log) {
    if (spec.algorithm != "lgaffs" && spec.algorithm != "pgaffs" && spec.algorithm != "both")
        throw std::invalid_argument("algorithm must be lgaffs, pgaffs or both");
    if (spec.seeds.empty()) throw std::invalid_argument("at least one seed required");

    const DatasetConfig config = DatasetConfig::from_json_file(spec.config_path);
    const Dataset full = load_csv(spec.data_path, config);
    fs::create_directories(spec.out_dir);

    const std::string stem = fs::path(spec.data_path).stem().string();
    std::vector<std::string> written;

    for (std::uint64_t seed : spec.seeds) {
        auto [train, test] = train_test_split(full, spec.test_fraction, seed);

        GAParams ga = spec.ga;
        ga.seed = seed;

        nlohmann::json j;
        j["schema"] = kResultSchema;
        j["dataset"] = stem;
        j["sensitive"] = config.sensitive_column;
        j["seed"] = seed;
        j["spec"] = nlohmann::json::parse(spec.resolved_json());
        j["train_size"] = train.size();
        j["test_size"] = test.size();

        RunOptions opts;
        opts.log = log;

        if (spec.algorithm != "pgaffs") {
            Individual sol = run_lgaffs(train, ga, spec.lex, spec.forest, spec.knn_k, opts);
            const FitnessVector test_fv =
                evaluate_on_test(sol.mask, train, test, spec.forest, spec.knn_k, seed);
            j["lgaffs"] = solution_json(sol, test_fv);
        }
        if (spec.algorithm != "lgaffs") {
            std::vector<Individual> front =
                run_pgaffs(train, ga, spec.forest, spec.knn_k, opts);
            std::vector<FitnessVector> test_fvs;
            test_fvs.reserve(front.size());
            for (const Individual& ind : front)
                test_fvs.push_back(
                    evaluate_on_test(ind.mask, train, test, spec.forest, spec.knn_k, seed));

            // The filter ranks the front by the GA's own (training) fitness.
            const std::size_t pick = lexicographic_filter_index(front, spec.lex);

            nlohmann::json members = nlohmann::json::array();
            for (std::size_t i = 0; i < front.size(); ++i)
                members.push_back(solution_json(front[i], test_fvs[i]));
            j["pgaffs"] = {{"front", members}, {"filtered_index", pick}};

            std::ostringstream front_name;
            front_name << stem << "__" << config.sensitive_column << "__seed" << seed
                       << ".front.tsv";
            write_front_tsv(fs::path(spec.out_dir) / front_name.str(), front, test_fvs);
        }

        std::ostringstream name;
        name << stem << "__" << config.sensitive_column << "__seed" << seed
             << ".result.json";
        const fs::path path = fs::path(spec.out_dir) / name.str();
        write_atomically(path, j.dump(2) + "\n");
        written.push_back(path.string());
    }
    return written;
}

ProblemResult load_result_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open result: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed result file " + path + ": " + e.what());
    }
    if (!j.contains("schema") || j.at("schema").get<std::string>() != kResultSchema)
        throw std::runtime_error(path + ": unknown or missing result schema");
    if (!j.contains("lgaffs") || !j.contains("pgaffs"))
        throw std::runtime_error(path + ": result lacks one of the two algorithms");

    ProblemResult pr;
    pr.dataset_id = j.at("dataset").get<std::string>();
    pr.sensitive_id = j.at("sensitive").get<std::string>();
    pr.seed = j.at("seed").get<std::uint64_t>();
    pr.lgaffs_test = fitness_from_json(j.at("lgaffs").at("fitness_test"));

    const auto& front = j.at("pgaffs").at("front");
    if (front.empty()) throw std::runtime_error(path + ": empty Pareto front");
    for (const auto& member : front)
        pr.pareto_test.push_back(fitness_from_json(member.at("fitness_test")));
    const std::size_t pick = j.at("pgaffs").at("filtered_index").get<std::size_t>();
    if (pick >= pr.pareto_test.size())
        throw std::runtime_error(path + ": filtered_index out of range");
    pr.pgaffs_filtered_test = pr.pareto_test[pick];
    return pr;
}

} // namespace fairsel
