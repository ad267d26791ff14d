#include "fairsel/compare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fairsel/dataset.hpp"

namespace fairsel {

std::vector<double> measure_values(const FitnessVector& fv) {
    return {fv.gm, fv.dp, fv.consistency, fv.fperbs, fv.fnerbs};
}

bool dominates_measures(const FitnessVector& a, const FitnessVector& b) {
    const auto va = measure_values(a);
    const auto vb = measure_values(b);
    bool strict = false;
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i] < vb[i]) return false;
        if (va[i] > vb[i]) strict = true;
    }
    return strict;
}

DominationStats domination_stats(const FitnessVector& lex,
                                 std::span<const FitnessVector> front) {
    if (front.empty()) throw std::invalid_argument("domination_stats: empty front");
    DominationStats st;
    int higher = 0;
    for (const FitnessVector& member : front) {
        if (dominates_measures(member, lex))
            ++st.pgaffs_dominates;
        else if (dominates_measures(lex, member))
            ++st.lgaffs_dominates;
        else
            ++st.no_domination;
        if (member.gm >= lex.gm) ++higher;
    }
    st.higher_accuracy_proportion = double(higher) / double(front.size());
    return st;
}

namespace {

// Average ranks of |d|, doubled so every rank is integral.
std::vector<std::uint64_t> doubled_ranks(const std::vector<double>& absd) {
    const std::size_t n = absd.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return absd[a] < absd[b]; });
    std::vector<std::uint64_t> r2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && absd[order[j + 1]] == absd[order[i]]) ++j;
        // ranks i+1 .. j+1 share the average ((i+1)+(j+1))/2; doubled: i+j+2
        const std::uint64_t doubled = static_cast<std::uint64_t>(i + j + 2);
        for (std::size_t t = i; t <= j; ++t) r2[order[t]] = doubled;
        i = j + 1;
    }
    return r2;
}

double exact_two_sided(const std::vector<std::uint64_t>& r2, std::uint64_t w2_obs) {
    // Integer distribution of the doubled positive-rank sum over all 2^n
    // sign assignments.
    std::uint64_t support = 0;
    for (auto r : r2) support += r;
    std::vector<std::uint64_t> count(support + 1, 0);
    count[0] = 1;
    for (auto r : r2)
        for (std::uint64_t j = support + 1; j-- > 0;)
            if (count[j] && j + r <= support) count[j + r] += count[j];
    std::uint64_t le = 0, ge = 0, total = 0;
    for (std::uint64_t j = 0; j <= support; ++j) {
        total += count[j];
        if (j <= w2_obs) le += count[j];
        if (j >= w2_obs) ge += count[j];
    }
    const double p = 2.0 * double(std::min(le, ge)) / double(total);
    return std::min(1.0, p);
}

double approx_two_sided(const std::vector<std::uint64_t>& r2, std::uint64_t w2_obs) {
    const double n = double(r2.size());
    const double w = double(w2_obs) / 2.0;
    const double mu = n * (n + 1.0) / 4.0;
    // Tie correction over groups of equal absolute difference.
    std::vector<std::uint64_t> sorted = r2;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = double(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (w - mu) / std::sqrt(var);
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

} // namespace

double wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs) {
    if (pairs.empty()) throw std::invalid_argument("wilcoxon: need at least one pair");
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const double d = b - a;
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) return 1.0;

    std::vector<double> absd(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) absd[i] = std::abs(diffs[i]);
    const std::vector<std::uint64_t> r2 = doubled_ranks(absd);

    std::uint64_t w2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) w2 += r2[i];

    if (diffs.size() <= 20) return exact_two_sided(r2, w2);
    return approx_two_sided(r2, w2);
}

namespace {

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

std::string format4(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

} // namespace

ComparisonReport build_report(const std::vector<ProblemResult>& results,
                              const LexicoParams&) {
    if (results.empty()) throw std::invalid_argument("build_report: no problem results");
    ComparisonReport report;
    report.problems = results;
    report.domination.reserve(results.size());
    for (const ProblemResult& pr : results) {
        if (pr.pareto_test.empty())
            report.domination.push_back(std::nullopt);
        else
            report.domination.push_back(domination_stats(pr.lgaffs_test, pr.pareto_test));
    }

    for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
        MeasureSummary& ms = report.measures[m];
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(results.size());
        for (const ProblemResult& pr : results) {
            const double pg = measure_values(pr.pgaffs_filtered_test)[m];
            const double lg = measure_values(pr.lgaffs_test)[m];
            pairs.emplace_back(pg, lg);
            const double rpg = round4(pg), rlg = round4(lg);
            if (rlg > rpg)
                ++ms.lgaffs_wins;
            else if (rpg > rlg)
                ++ms.pgaffs_wins;
            else
                ++ms.ties;
        }
        if (results.size() >= 2) ms.p_value = wilcoxon_signed_rank(pairs);
    }
    return report;
}

void ComparisonReport::write_table(std::ostream& out) const {
    out << "dataset\tsensitive\tseed";
    for (const char* name : kMeasureNames) out << "\tpgaffs_" << name << "\tlgaffs_" << name;
    out << "\tpgaffs_dominates\tlgaffs_dominates\tno_domination\thigher_accuracy_proportion\n";
    for (std::size_t i = 0; i < problems.size(); ++i) {
        const ProblemResult& pr = problems[i];
        out << pr.dataset_id << '\t' << pr.sensitive_id << '\t' << pr.seed;
        const auto pg = measure_values(pr.pgaffs_filtered_test);
        const auto lg = measure_values(pr.lgaffs_test);
        for (std::size_t m = 0; m < pg.size(); ++m)
            out << '\t' << format4(pg[m]) << '\t' << format4(lg[m]);
        if (domination[i]) {
            const DominationStats& st = *domination[i];
            out << '\t' << st.pgaffs_dominates << '\t' << st.lgaffs_dominates << '\t'
                << st.no_domination << '\t' << format4(st.higher_accuracy_proportion);
        } else {
            out << "\t\t\t\t";
        }
        out << '\n';
    }
    out << "wins\t\t";
    for (const MeasureSummary& ms : measures)
        out << '\t' << ms.pgaffs_wins << '\t' << ms.lgaffs_wins;
    out << "\t\t\t\t\n";
    out << "wilcoxon_p\t\t";
    for (const MeasureSummary& ms : measures) {
        out << '\t';
        if (ms.p_value)
            out << *ms.p_value;
        else
            out << "n/a";
        out << '\t';
    }
    out << "\t\t\t\n";
}

std::string ComparisonReport::summary_json() const {
    nlohmann::json j;
    j["problems"] = problems.size();
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
        nlohmann::json e;
        e["pgaffs_wins"] = measures[m].pgaffs_wins;
        e["lgaffs_wins"] = measures[m].lgaffs_wins;
        e["ties"] = measures[m].ties;
        if (measures[m].p_value)
            e["wilcoxon_p"] = *measures[m].p_value;
        else
            e["wilcoxon_p"] = nullptr;
        per[kMeasureNames[m]] = e;
    }
    j["measures"] = per;
    nlohmann::json dom = nlohmann::json::array();
    for (std::size_t i = 0; i < problems.size(); ++i) {
        nlohmann::json e;
        e["dataset"] = problems[i].dataset_id;
        e["sensitive"] = problems[i].sensitive_id;
        e["seed"] = problems[i].seed;
        if (domination[i]) {
            e["pgaffs_dominates"] = domination[i]->pgaffs_dominates;
            e["lgaffs_dominates"] = domination[i]->lgaffs_dominates;
            e["no_domination"] = domination[i]->no_domination;
            e["higher_accuracy_proportion"] = domination[i]->higher_accuracy_proportion;
        }
        dom.push_back(e);
    }
    j["domination"] = dom;
    return j.dump(2);
}

std::vector<ProblemResult> load_fixture_csv(const std::string& path) {
    RawTable t = read_delimited(path, ',');
    const std::vector<std::string> expect = {
        "dataset",       "sensitive",     "gm_pgaffs",     "gm_lgaffs",
        "dp_pgaffs",     "dp_lgaffs",     "cons_pgaffs",   "cons_lgaffs",
        "fperbs_pgaffs", "fperbs_lgaffs", "fnerbs_pgaffs", "fnerbs_lgaffs"};
    if (t.columns != expect)
        throw std::runtime_error(path + ": unexpected fixture schema");
    std::vector<ProblemResult> out;
    for (const auto& row : t.rows) {
        ProblemResult pr;
        pr.dataset_id = row[0];
        pr.sensitive_id = row[1];
        auto num = [&](std::size_t i) {
            std::size_t pos = 0;
            const double v = std::stod(row[i], &pos);
            if (pos != row[i].size())
                throw std::runtime_error(path + ": bad numeric cell '" + row[i] + "'");
            return v;
        };
        pr.pgaffs_filtered_test.gm = num(2);
        pr.lgaffs_test.gm = num(3);
        pr.pgaffs_filtered_test.dp = num(4);
        pr.lgaffs_test.dp = num(5);
        pr.pgaffs_filtered_test.consistency = num(6);
        pr.lgaffs_test.consistency = num(7);
        pr.pgaffs_filtered_test.fperbs = num(8);
        pr.lgaffs_test.fperbs = num(9);
        pr.pgaffs_filtered_test.fnerbs = num(10);
        pr.lgaffs_test.fnerbs = num(11);
        out.push_back(std::move(pr));
    }
    return out;
}

} // namespace fairsel
