#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fairsel/mask.hpp"
#include "fairsel/matrix.hpp"

namespace fairsel {

struct ForestParams {
    int n_trees = 50;
    int max_depth = 12;
    int min_leaf = 2;
    bool bootstrap = true;
    std::uint64_t seed = 0;
    // Per-split feature subsample size is ceil(sqrt(F')) over the F'
    // selected features; not a tunable.
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<std::uint32_t, 2> votes{0, 0}; // training-sample class counts at a leaf

    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    int predict(const double* row) const {
        int id = 0;
        while (nodes[id].feature >= 0)
            id = row[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left
                                                               : nodes[id].right;
        const auto& v = nodes[id].votes;
        return v[1] > v[0] ? 1 : 0;
    }

    bool operator==(const Tree&) const = default;
};

// Seeded decision-tree ensemble trained under a feature mask. Masking is
// applied internally: predict expects the full original feature width.
class ForestModel {
public:
    ForestModel() = default;
    ForestModel(std::vector<Tree> trees, FeatureMask mask)
        : trees_(std::move(trees)), mask_(std::move(mask)) {}

    const FeatureMask& mask() const { return mask_; }
    const std::vector<Tree>& trees() const { return trees_; }
    std::size_t width() const { return mask_.size(); }

    // Majority vote over trees; ties break toward class 0.
    std::uint8_t predict_row(const double* row) const;
    std::vector<std::uint8_t> predict(const Matrix& x) const;
    std::vector<std::uint8_t> predict(const Matrix& x,
                                      std::span<const std::size_t> rows) const;

    bool operator==(const ForestModel&) const = default;

private:
    std::vector<Tree> trees_;
    FeatureMask mask_;
};

// Train a forest on the given rows of x (full width), using only features
// set in the mask. Deterministic for a given seed: each tree draws from an
// independent stream derived from (seed, tree index), so the parallel and
// serial paths produce identical models.
ForestModel fit(const Matrix& x, std::span<const std::uint8_t> y,
                std::span<const std::size_t> rows, const FeatureMask& mask,
                const ForestParams& params);

ForestModel fit(const Matrix& x, std::span<const std::uint8_t> y,
                const FeatureMask& mask, const ForestParams& params);

// Serial reference implementation; kept for testing and benchmarking
// against the OpenMP path.
ForestModel fit_serial(const Matrix& x, std::span<const std::uint8_t> y,
                       std::span<const std::size_t> rows, const FeatureMask& mask,
                       const ForestParams& params);

ForestModel fit_serial(const Matrix& x, std::span<const std::uint8_t> y,
                       const FeatureMask& mask, const ForestParams& params);

} // namespace fairsel
