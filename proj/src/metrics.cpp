#include "fairsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairsel/rng.hpp"

namespace fairsel {

GroupConfusion group_confusion(std::span<const std::uint8_t> pred,
                               std::span<const std::uint8_t> actual,
                               std::span<const std::uint8_t> s) {
    if (pred.size() != actual.size() || pred.size() != s.size())
        throw std::invalid_argument("group_confusion: length mismatch");
    if (pred.empty()) throw std::invalid_argument("group_confusion: empty input");
    GroupConfusion gc;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int g = s[i] ? 1 : 0;
        if (actual[i]) {
            ++(pred[i] ? gc.tp[g] : gc.fn[g]);
        } else {
            ++(pred[i] ? gc.fp[g] : gc.tn[g]);
        }
    }
    return gc;
}

double demographic_parity(std::span<const std::uint8_t> pred,
                          std::span<const std::uint8_t> s) {
    if (pred.size() != s.size())
        throw std::invalid_argument("demographic_parity: length mismatch");
    std::array<std::uint64_t, 2> n{0, 0}, pos{0, 0};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int g = s[i] ? 1 : 0;
        ++n[g];
        pos[g] += pred[i] ? 1 : 0;
    }
    if (n[0] == 0 || n[1] == 0)
        throw std::invalid_argument("demographic_parity: a group is absent");
    const double p0 = double(pos[0]) / double(n[0]);
    const double p1 = double(pos[1]) / double(n[1]);
    return 1.0 - std::abs(p0 - p1);
}

double consistency(std::span<const std::uint8_t> pred, const Matrix& x, int k,
                   bool* clamped) {
    const std::size_t n = pred.size();
    if (x.rows() != n) throw std::invalid_argument("consistency: row count mismatch");
    if (k < 1 || static_cast<std::size_t>(k) >= n)
        throw std::invalid_argument("consistency: need N > k >= 1");
    if (clamped) *clamped = false;

    const std::size_t f = x.cols();
    std::uint64_t disagreements = 0;

    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<std::uint64_t> per_row(n, 0);
#pragma omp parallel for schedule(static) firstprivate(dist)
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            const double* ri = x.row(i);
            const double* rj = x.row(j);
            for (std::size_t c = 0; c < f; ++c) {
                const double diff = ri[c] - rj[c];
                d2 += diff * diff;
            }
            dist[m++] = {d2, j};
        }
        // (distance, index) ordering implements the lower-index tie break.
        std::partial_sort(dist.begin(), dist.begin() + k, dist.begin() + m);
        std::uint64_t local = 0;
        for (int t = 0; t < k; ++t)
            local += pred[i] != pred[dist[t].second] ? 1 : 0;
        per_row[i] = local;
    }
    for (std::size_t i = 0; i < n; ++i) disagreements += per_row[i];

    double c = 1.0 - double(disagreements) / (double(n) * double(k));
    if (c < 0.0 || c > 1.0) {
        if (clamped) *clamped = true;
        c = std::clamp(c, 0.0, 1.0);
    }
    return c;
}

namespace {

// Rate a/(a+b); an empty denominator defines the rate as 0.
double safe_rate(std::uint64_t a, std::uint64_t b, bool& degenerate) {
    if (a + b == 0) {
        degenerate = true;
        return 0.0;
    }
    return double(a) / double(a + b);
}

} // namespace

double fperbs(const GroupConfusion& gc, bool* degenerate) {
    bool deg = false;
    const double r0 = safe_rate(gc.fp[0], gc.tn[0], deg);
    const double r1 = safe_rate(gc.fp[1], gc.tn[1], deg);
    if (degenerate) *degenerate = deg;
    return 1.0 - std::abs(r0 - r1);
}

double fnerbs(const GroupConfusion& gc, bool* degenerate) {
    bool deg = false;
    const double r0 = safe_rate(gc.fn[0], gc.tp[0], deg);
    const double r1 = safe_rate(gc.fn[1], gc.tp[1], deg);
    if (degenerate) *degenerate = deg;
    return 1.0 - std::abs(r0 - r1);
}

double gm_sen_spec(const GroupConfusion& gc) {
    const std::uint64_t tp = gc.tp[0] + gc.tp[1];
    const std::uint64_t fn = gc.fn[0] + gc.fn[1];
    const std::uint64_t tn = gc.tn[0] + gc.tn[1];
    const std::uint64_t fp = gc.fp[0] + gc.fp[1];
    const double sens = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    const double spec = tn + fp == 0 ? 0.0 : double(tn) / double(tn + fp);
    return std::sqrt(sens * spec);
}

FitnessVector evaluate_mask(const FeatureMask& mask, const Dataset& train,
                            const FoldPlan& folds, const ForestParams& params,
                            int knn_k) {
    if (mask_popcount(mask) == 0) return FitnessVector{};
    const std::size_t n = train.size();
    if (folds.assignment.size() != n)
        throw std::invalid_argument("evaluate_mask: fold plan does not cover dataset");

    std::vector<std::uint8_t> pooled(n, 0);
    for (int f = 0; f < folds.k; ++f) {
        std::vector<std::size_t> fit_rows, held_rows;
        for (std::size_t i = 0; i < n; ++i)
            (folds.assignment[i] == f ? held_rows : fit_rows).push_back(i);

        std::array<std::uint64_t, 2> counts{0, 0};
        for (std::size_t r : fit_rows) ++counts[train.y[r]];
        if (counts[0] == 0 || counts[1] == 0) {
            // Majority-class fallback for a single-class training part.
            const std::uint8_t majority = counts[1] >= counts[0] ? 1 : 0;
            for (std::size_t r : held_rows) pooled[r] = majority;
            continue;
        }

        ForestParams fold_params = params;
        fold_params.seed = derive_seed(params.seed, static_cast<std::uint64_t>(f));
        ForestModel model = fit(train.x, train.y, fit_rows, mask, fold_params);
        std::vector<std::uint8_t> pred = model.predict(train.x, held_rows);
        for (std::size_t i = 0; i < held_rows.size(); ++i) pooled[held_rows[i]] = pred[i];
    }

    FitnessVector fv;
    const GroupConfusion gc = group_confusion(pooled, train.y, train.s);
    fv.gm = gm_sen_spec(gc);
    fv.dp = demographic_parity(pooled, train.s);
    bool deg_fp = false, deg_fn = false;
    fv.fperbs = fperbs(gc, &deg_fp);
    fv.fnerbs = fnerbs(gc, &deg_fn);
    fv.degenerate = deg_fp || deg_fn;

    // Consistency distances live in the masked feature subspace.
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < mask.size(); ++j)
        if (mask[j]) cols.push_back(j);
    Matrix sub(n, cols.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = train.x(i, cols[j]);
    const int k_eff = std::min<int>(knn_k, static_cast<int>(n) - 1);
    fv.consistency = consistency(pooled, sub, k_eff, &fv.clamped);
    return fv;
}

} // namespace fairsel
