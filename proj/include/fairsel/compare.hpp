#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairsel/lexico.hpp"
#include "fairsel/metrics.hpp"

namespace fairsel {

// One classification problem (dataset x sensitive feature), evaluated on
// the held-out side: the lexicographic GA's solution, the Pareto GA's
// filtered solution, and the full Pareto set.
struct ProblemResult {
    std::string dataset_id;
    std::string sensitive_id;
    std::uint64_t seed = 0;
    FitnessVector lgaffs_test;
    FitnessVector pgaffs_filtered_test;
    std::vector<FitnessVector> pareto_test; // empty in fixture (statistics-only) mode
};

struct DominationStats {
    int pgaffs_dominates = 0;
    int lgaffs_dominates = 0;
    int no_domination = 0;
    double higher_accuracy_proportion = 0.0;
};

// Same scan semantics as the elitism ranking, applied to a Pareto front.
inline const Individual& lexicographic_filter(std::span<const Individual> front,
                                              const LexicoParams& lp) {
    return lexicographic_top(front, lp);
}

inline std::size_t lexicographic_filter_index(std::span<const Individual> front,
                                              const LexicoParams& lp) {
    return lexicographic_top_index(front, lp);
}

// Pairwise Pareto dominance over the full 5-measure vector (all maximised).
bool dominates_measures(const FitnessVector& a, const FitnessVector& b);

DominationStats domination_stats(const FitnessVector& lex,
                                 std::span<const FitnessVector> front);

// Two-sided Wilcoxon signed-rank test on paired values (second - first).
// Zero differences are dropped; tied absolute differences get average
// ranks; exact enumeration of the null when the effective n <= 20, normal
// approximation with tie correction (no continuity correction) above.
// All differences zero gives p = 1.
double wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs);

inline constexpr std::array<const char*, 5> kMeasureNames{"gm", "dp", "consistency",
                                                          "fperbs", "fnerbs"};

struct MeasureSummary {
    int pgaffs_wins = 0;
    int lgaffs_wins = 0;
    int ties = 0;
    std::optional<double> p_value; // absent when fewer than 2 problems
};

struct ComparisonReport {
    std::vector<ProblemResult> problems;
    std::vector<std::optional<DominationStats>> domination; // per problem
    std::array<MeasureSummary, 5> measures;

    void write_table(std::ostream& out) const;
    std::string summary_json() const;
};

// Wins are counted at 4-decimal rounding (strict inequality; exact ties
// counted separately); p-values use the raw values.
ComparisonReport build_report(const std::vector<ProblemResult>& results,
                              const LexicoParams& lp);

// Statistics-only ingestion of published per-problem measure pairs.
std::vector<ProblemResult> load_fixture_csv(const std::string& path);

std::vector<double> measure_values(const FitnessVector& fv);

} // namespace fairsel
