#include "fairsel/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairsel/rng.hpp"

namespace fairsel {

namespace {

struct Candidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;

    // Deterministic preference: larger gain, then lower feature index,
    // then lower threshold.
    bool better_than(const Candidate& o) const {
        if (gain != o.gain) return gain > o.gain;
        if (feature != o.feature) return feature < o.feature;
        return threshold < o.threshold;
    }
};

double gini(const std::array<std::uint32_t, 2>& counts) {
    const double n = double(counts[0]) + double(counts[1]);
    if (n == 0.0) return 0.0;
    const double p0 = counts[0] / n, p1 = counts[1] / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const std::uint8_t> y,
                const std::vector<int>& selected, const ForestParams& params, Rng rng)
        : x_(x), y_(y), selected_(selected), params_(params), rng_(std::move(rng)),
          scratch_(selected) {}

    Tree build(std::vector<std::size_t> sample) {
        Tree t;
        grow(t, std::move(sample), 0);
        return t;
    }

private:
    int grow(Tree& t, std::vector<std::size_t> sample, int depth) {
        const int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();

        std::array<std::uint32_t, 2> counts{0, 0};
        for (std::size_t r : sample) ++counts[y_[r]];
        const bool pure = counts[0] == 0 || counts[1] == 0;

        if (pure || depth >= params_.max_depth ||
            sample.size() < 2 * static_cast<std::size_t>(params_.min_leaf)) {
            t.nodes[id].votes = counts;
            return id;
        }

        Candidate best = find_split(sample, counts);
        if (best.feature < 0 || best.gain <= 0.0) {
            t.nodes[id].votes = counts;
            return id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t r : sample)
            (x_(r, best.feature) <= best.threshold ? left : right).push_back(r);
        sample.clear();
        sample.shrink_to_fit();

        t.nodes[id].feature = best.feature;
        t.nodes[id].threshold = best.threshold;
        const int l = grow(t, std::move(left), depth + 1);
        t.nodes[id].left = l;
        const int r = grow(t, std::move(right), depth + 1);
        t.nodes[id].right = r;
        return id;
    }

    Candidate find_split(const std::vector<std::size_t>& sample,
                         const std::array<std::uint32_t, 2>& counts) {
        // Random feature subsample of size ceil(sqrt(F')), drawn per node.
        const std::size_t f_sel = selected_.size();
        const std::size_t m = std::min<std::size_t>(
            f_sel, static_cast<std::size_t>(std::ceil(std::sqrt(double(f_sel)))));
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + uniform_below(rng_, f_sel - i);
            std::swap(scratch_[i], scratch_[j]);
        }

        const double parent = gini(counts);
        const double n = double(sample.size());
        Candidate best;

        std::vector<std::pair<double, std::uint8_t>> vals(sample.size());
        for (std::size_t i = 0; i < m; ++i) {
            const int f = scratch_[i];
            for (std::size_t r = 0; r < sample.size(); ++r)
                vals[r] = {x_(sample[r], f), y_[sample[r]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            std::array<std::uint32_t, 2> left{0, 0};
            for (std::size_t r = 0; r + 1 < vals.size(); ++r) {
                ++left[vals[r].second];
                if (vals[r].first == vals[r + 1].first) continue;
                const std::size_t nl = r + 1, nr = vals.size() - nl;
                if (nl < static_cast<std::size_t>(params_.min_leaf) ||
                    nr < static_cast<std::size_t>(params_.min_leaf))
                    continue;
                std::array<std::uint32_t, 2> right{counts[0] - left[0], counts[1] - left[1]};
                const double child =
                    (double(nl) * gini(left) + double(nr) * gini(right)) / n;
                Candidate c{parent - child, f, 0.5 * (vals[r].first + vals[r + 1].first)};
                if (c.better_than(best)) best = c;
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const std::uint8_t> y_;
    const std::vector<int>& selected_;
    const ForestParams& params_;
    Rng rng_;
    std::vector<int> scratch_;
};

Tree build_one_tree(const Matrix& x, std::span<const std::uint8_t> y,
                    std::span<const std::size_t> rows, const std::vector<int>& selected,
                    const ForestParams& params, int tree_index) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(tree_index)));
    std::vector<std::size_t> sample;
    sample.reserve(rows.size());
    if (params.bootstrap) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            sample.push_back(rows[uniform_below(rng, rows.size())]);
    } else {
        sample.assign(rows.begin(), rows.end());
    }
    TreeBuilder builder(x, y, selected, params, std::move(rng));
    return builder.build(std::move(sample));
}

ForestModel fit_impl(const Matrix& x, std::span<const std::uint8_t> y,
                     std::span<const std::size_t> rows, const FeatureMask& mask,
                     const ForestParams& params, bool parallel) {
    if (mask.size() != x.cols())
        throw std::invalid_argument("mask length does not match feature count");
    if (params.n_trees < 1 || params.max_depth < 1)
        throw std::invalid_argument("invalid forest parameters");
    std::vector<int> selected;
    for (std::size_t j = 0; j < mask.size(); ++j)
        if (mask[j]) selected.push_back(static_cast<int>(j));
    if (selected.empty()) throw std::invalid_argument("empty feature mask");

    std::array<std::uint32_t, 2> counts{0, 0};
    for (std::size_t r : rows) ++counts[y[r]];
    if (counts[0] == 0 || counts[1] == 0)
        throw std::invalid_argument("training labels contain a single class");

    std::vector<Tree> trees(params.n_trees);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int t = 0; t < params.n_trees; ++t)
        trees[t] = build_one_tree(x, y, rows, selected, params, t);

    return ForestModel(std::move(trees), mask);
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

} // namespace

std::uint8_t ForestModel::predict_row(const double* row) const {
    int ones = 0;
    for (const Tree& t : trees_) ones += t.predict(row);
    return ones * 2 > static_cast<int>(trees_.size()) ? 1 : 0;
}

std::vector<std::uint8_t> ForestModel::predict(const Matrix& x) const {
    if (x.cols() != width())
        throw std::invalid_argument("probe width does not match training width");
    std::vector<std::uint8_t> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
    return out;
}

std::vector<std::uint8_t> ForestModel::predict(const Matrix& x,
                                               std::span<const std::size_t> rows) const {
    if (x.cols() != width())
        throw std::invalid_argument("probe width does not match training width");
    std::vector<std::uint8_t> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_row(x.row(rows[i]));
    return out;
}

ForestModel fit(const Matrix& x, std::span<const std::uint8_t> y,
                std::span<const std::size_t> rows, const FeatureMask& mask,
                const ForestParams& params) {
    return fit_impl(x, y, rows, mask, params, true);
}

ForestModel fit(const Matrix& x, std::span<const std::uint8_t> y, const FeatureMask& mask,
                const ForestParams& params) {
    auto rows = all_rows(x.rows());
    return fit_impl(x, y, rows, mask, params, true);
}

ForestModel fit_serial(const Matrix& x, std::span<const std::uint8_t> y,
                       std::span<const std::size_t> rows, const FeatureMask& mask,
                       const ForestParams& params) {
    return fit_impl(x, y, rows, mask, params, false);
}

ForestModel fit_serial(const Matrix& x, std::span<const std::uint8_t> y,
                       const FeatureMask& mask, const ForestParams& params) {
    auto rows = all_rows(x.rows());
    return fit_impl(x, y, rows, mask, params, false);
}

} // namespace fairsel
