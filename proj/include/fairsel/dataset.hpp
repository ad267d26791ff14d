#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fairsel/matrix.hpp"

namespace fairsel {

// Parsed delimited text, prior to any encoding. Cells are kept verbatim;
// "?" and the empty string are treated as missing markers downstream.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_delimited(const std::string& path, char delimiter);

enum class ColumnEncoding { Auto, Numeric, OneHot, Ordinal };
enum class MissingPolicy { Impute, DropRows };

// One config per (dataset, sensitive feature) classification problem.
struct DatasetConfig {
    std::string class_column;
    std::string positive_value;
    std::string sensitive_column;
    std::vector<std::string> protected_values; // raw cell values mapped to s=1
    std::map<std::string, ColumnEncoding> column_encoding; // per-column override
    MissingPolicy missing_policy = MissingPolicy::Impute;
    char delimiter = ',';
    bool include_sensitive = false; // also encode the sensitive column into X

    static DatasetConfig from_json_file(const std::string& path);
    std::string to_json_string() const;
};

// Encoded classification problem. Every column of x is min-max scaled to
// [0,1] (constant raw columns map to all-zeros); y and s are binary and
// both values of each are guaranteed present. Immutable after construction.
struct Dataset {
    Matrix x;
    std::vector<std::uint8_t> y; // 1 = positive class
    std::vector<std::uint8_t> s; // 1 = protected group
    std::vector<std::string> feature_names;

    std::size_t size() const { return y.size(); }
    std::size_t features() const { return x.cols(); }

    // Exact round-trip emit/reload of the encoded form.
    void save_encoded(const std::string& path) const;
    static Dataset load_encoded(const std::string& path);

    // Subset by row indices, preserving order. Used by the outer split.
    Dataset select_rows(const std::vector<std::size_t>& rows) const;
};

struct FoldPlan {
    int k = 0;
    std::vector<int> assignment; // per-instance fold index in [0, k)
};

Dataset load_csv(const std::string& path, const DatasetConfig& config);

// Stratified on (y, s) jointly where feasible; deterministic per seed.
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

// Class-stratified fold plan; fold sizes differ by at most one.
FoldPlan make_folds(const Dataset& d, int k, std::uint64_t seed);

} // namespace fairsel
