#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/forest.hpp"
#include "fairsel/mask.hpp"
#include "fairsel/matrix.hpp"

namespace fairsel {

// Confusion-matrix cells split by group membership.
struct GroupConfusion {
    std::array<std::uint64_t, 2> tp{0, 0};
    std::array<std::uint64_t, 2> fp{0, 0};
    std::array<std::uint64_t, 2> tn{0, 0};
    std::array<std::uint64_t, 2> fn{0, 0};

    std::uint64_t group_total(int g) const { return tp[g] + fp[g] + tn[g] + fn[g]; }
    std::uint64_t total() const { return group_total(0) + group_total(1); }
};

// The five optimised measures, each in [0,1].
// `degenerate` marks an empty group-conditional rate denominator (the rate
// was defined as 0); `clamped` marks a consistency value clamped into [0,1].
struct FitnessVector {
    double gm = 0.0;
    double dp = 0.0;
    double consistency = 0.0;
    double fperbs = 0.0;
    double fnerbs = 0.0;
    bool degenerate = false;
    bool clamped = false;

    std::array<double, 4> fairness() const { return {dp, consistency, fperbs, fnerbs}; }
    double mean_fairness() const { return (dp + consistency + fperbs + fnerbs) / 4.0; }

    bool operator==(const FitnessVector&) const = default;
};

GroupConfusion group_confusion(std::span<const std::uint8_t> pred,
                               std::span<const std::uint8_t> actual,
                               std::span<const std::uint8_t> s);

// 1 - |P(pred=1 | s=0) - P(pred=1 | s=1)|. Both groups must be present.
double demographic_parity(std::span<const std::uint8_t> pred,
                          std::span<const std::uint8_t> s);

// 1 - mean disagreement with the k nearest neighbours (Euclidean over x,
// self excluded, distance ties broken by lower instance index).
double consistency(std::span<const std::uint8_t> pred, const Matrix& x, int k,
                   bool* clamped = nullptr);

// 1 - |FPR_{s=0} - FPR_{s=1}|; an empty denominator defines that rate as 0.
double fperbs(const GroupConfusion& gc, bool* degenerate = nullptr);

// 1 - |FNR_{s=0} - FNR_{s=1}|; same degenerate rule.
double fnerbs(const GroupConfusion& gc, bool* degenerate = nullptr);

// Geometric mean of sensitivity and specificity over pooled counts.
double gm_sen_spec(const GroupConfusion& gc);

// Fitness of a feature subset: k-fold internal cross-validation on the
// training set, out-of-fold predictions pooled, all five measures computed
// once on the pooled predictions. Consistency distances use x restricted
// to the mask's columns; knn_k is clamped to N-1. An all-zero mask scores
// all zeros. A single-class training part falls back to a majority-class
// constant prediction for its fold.
FitnessVector evaluate_mask(const FeatureMask& mask, const Dataset& train,
                            const FoldPlan& folds, const ForestParams& params,
                            int knn_k);

} // namespace fairsel
