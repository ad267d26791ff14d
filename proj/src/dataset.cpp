#include "fairsel/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fairsel/rng.hpp"

namespace fairsel {

namespace {

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Mode with lexicographically-smallest tie break (std::map keeps keys sorted).
std::string mode_of(const std::map<std::string, std::size_t>& counts) {
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [val, n] : counts) {
        if (n > best_n) {
            best = val;
            best_n = n;
        }
    }
    return best;
}

constexpr std::size_t kOneHotLimit = 20;

} // namespace

RawTable read_delimited(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    t.columns = split_line(line, delimiter);
    if (t.columns.size() < 2)
        throw std::runtime_error(path + ": need at least 2 columns (features + class)");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line, delimiter);
        if (cells.size() != t.columns.size()) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": expected " << t.columns.size()
                << " cells, got " << cells.size();
            throw std::runtime_error(msg.str());
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.rows.empty()) throw std::runtime_error(path + ": no data rows");
    return t;
}

DatasetConfig DatasetConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config parse failure: " + path + ": " + e.what());
    }
    DatasetConfig c;
    c.class_column = j.at("class_column").get<std::string>();
    c.positive_value = j.at("positive_value").get<std::string>();
    c.sensitive_column = j.at("sensitive_column").get<std::string>();
    c.protected_values = j.at("protected_values").get<std::vector<std::string>>();
    if (j.contains("encoding")) {
        for (const auto& [col, enc] : j.at("encoding").items()) {
            std::string e = enc.get<std::string>();
            if (e == "numeric")
                c.column_encoding[col] = ColumnEncoding::Numeric;
            else if (e == "onehot")
                c.column_encoding[col] = ColumnEncoding::OneHot;
            else if (e == "ordinal")
                c.column_encoding[col] = ColumnEncoding::Ordinal;
            else if (e == "auto")
                c.column_encoding[col] = ColumnEncoding::Auto;
            else
                throw std::runtime_error("unknown encoding '" + e + "' for column " + col);
        }
    }
    if (j.contains("missing_policy")) {
        std::string p = j.at("missing_policy").get<std::string>();
        if (p == "impute")
            c.missing_policy = MissingPolicy::Impute;
        else if (p == "drop_rows")
            c.missing_policy = MissingPolicy::DropRows;
        else
            throw std::runtime_error("unknown missing_policy: " + p);
    }
    if (j.contains("delimiter")) {
        std::string d = j.at("delimiter").get<std::string>();
        if (d.size() != 1) throw std::runtime_error("delimiter must be a single character");
        c.delimiter = d[0];
    }
    if (j.contains("include_sensitive")) c.include_sensitive = j.at("include_sensitive").get<bool>();
    return c;
}

std::string DatasetConfig::to_json_string() const {
    nlohmann::json j;
    j["class_column"] = class_column;
    j["positive_value"] = positive_value;
    j["sensitive_column"] = sensitive_column;
    j["protected_values"] = protected_values;
    nlohmann::json enc = nlohmann::json::object();
    for (const auto& [col, e] : column_encoding) {
        switch (e) {
            case ColumnEncoding::Auto: enc[col] = "auto"; break;
            case ColumnEncoding::Numeric: enc[col] = "numeric"; break;
            case ColumnEncoding::OneHot: enc[col] = "onehot"; break;
            case ColumnEncoding::Ordinal: enc[col] = "ordinal"; break;
        }
    }
    j["encoding"] = enc;
    j["missing_policy"] = missing_policy == MissingPolicy::Impute ? "impute" : "drop_rows";
    j["delimiter"] = std::string(1, delimiter);
    j["include_sensitive"] = include_sensitive;
    return j.dump();
}

namespace {

// Append one encoded (pre-normalization) column per expansion of a raw column.
void encode_column(const std::string& name, const std::vector<std::string>& cells,
                   ColumnEncoding enc, std::vector<std::vector<double>>& out_cols,
                   std::vector<std::string>& out_names) {
    const std::size_t n = cells.size();
    std::vector<double> numeric(n, 0.0);
    bool all_numeric = true;
    for (std::size_t i = 0; i < n && all_numeric; ++i) {
        if (is_missing(cells[i])) continue;
        if (!parse_double(cells[i], numeric[i])) all_numeric = false;
    }

    if (enc == ColumnEncoding::Numeric && !all_numeric)
        throw std::runtime_error("column '" + name + "' declared numeric but has non-numeric cells");
    if (enc == ColumnEncoding::Auto) {
        if (all_numeric) {
            enc = ColumnEncoding::Numeric;
        } else {
            std::set<std::string> distinct;
            for (const auto& c : cells)
                if (!is_missing(c)) distinct.insert(c);
            enc = distinct.size() <= kOneHotLimit ? ColumnEncoding::OneHot : ColumnEncoding::Ordinal;
        }
    }

    if (enc == ColumnEncoding::Numeric) {
        std::vector<double> present;
        for (std::size_t i = 0; i < n; ++i)
            if (!is_missing(cells[i])) present.push_back(numeric[i]);
        if (present.empty()) throw std::runtime_error("column '" + name + "' has no values");
        const double fill = median_of(present);
        for (std::size_t i = 0; i < n; ++i)
            if (is_missing(cells[i])) numeric[i] = fill;
        out_cols.push_back(std::move(numeric));
        out_names.push_back(name);
        return;
    }

    // Categorical path: impute mode first, then expand.
    std::map<std::string, std::size_t> counts;
    for (const auto& c : cells)
        if (!is_missing(c)) ++counts[c];
    if (counts.empty()) throw std::runtime_error("column '" + name + "' has no values");
    const std::string fill = mode_of(counts);

    std::vector<std::string> filled(n);
    for (std::size_t i = 0; i < n; ++i) filled[i] = is_missing(cells[i]) ? fill : cells[i];

    std::vector<std::string> values;
    values.reserve(counts.size());
    for (const auto& [val, cnt] : counts) values.push_back(val);

    if (enc == ColumnEncoding::OneHot) {
        for (const auto& val : values) {
            std::vector<double> col(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) col[i] = filled[i] == val ? 1.0 : 0.0;
            out_cols.push_back(std::move(col));
            out_names.push_back(name + "=" + val);
        }
    } else { // Ordinal: index within sorted distinct values
        std::map<std::string, double> index;
        for (std::size_t v = 0; v < values.size(); ++v) index[values[v]] = static_cast<double>(v);
        std::vector<double> col(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) col[i] = index[filled[i]];
        out_cols.push_back(std::move(col));
        out_names.push_back(name);
    }
}

} // namespace

Dataset load_csv(const std::string& path, const DatasetConfig& config) {
    RawTable t = read_delimited(path, config.delimiter);

    auto find_col = [&](const std::string& name) -> std::size_t {
        auto it = std::find(t.columns.begin(), t.columns.end(), name);
        if (it == t.columns.end())
            throw std::runtime_error("unknown column '" + name + "' in " + path);
        return static_cast<std::size_t>(it - t.columns.begin());
    };
    const std::size_t class_idx = find_col(config.class_column);
    const std::size_t sens_idx = find_col(config.sensitive_column);
    if (class_idx == sens_idx)
        throw std::runtime_error("class and sensitive column must differ");
    if (config.protected_values.empty())
        throw std::runtime_error("protected_values must be non-empty");

    // Class and sensitive cells may never be missing; imputing them would
    // fabricate labels or group membership.
    for (const auto& row : t.rows) {
        if (is_missing(row[class_idx]))
            throw std::runtime_error("missing value in class column");
        if (is_missing(row[sens_idx]))
            throw std::runtime_error("missing value in sensitive column");
    }

    std::vector<std::vector<std::string>> rows;
    if (config.missing_policy == MissingPolicy::DropRows) {
        for (auto& row : t.rows) {
            bool any = false;
            for (const auto& cell : row)
                if (is_missing(cell)) { any = true; break; }
            if (!any) rows.push_back(std::move(row));
        }
        if (rows.empty()) throw std::runtime_error("all rows dropped by missing_policy");
    } else {
        rows = std::move(t.rows);
    }
    const std::size_t n = rows.size();

    Dataset d;
    d.y.resize(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        d.y[i] = rows[i][class_idx] == config.positive_value ? 1 : 0;
        pos += d.y[i];
    }
    if (pos == 0 || pos == n) throw std::runtime_error("single-class dataset");

    std::set<std::string> protected_set(config.protected_values.begin(),
                                        config.protected_values.end());
    std::set<std::string> observed;
    for (std::size_t i = 0; i < n; ++i) observed.insert(rows[i][sens_idx]);
    for (const auto& v : protected_set)
        if (!observed.count(v))
            throw std::runtime_error("protected value '" + v + "' not observed in column '" +
                                     config.sensitive_column + "'");
    d.s.resize(n);
    std::size_t prot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        d.s[i] = protected_set.count(rows[i][sens_idx]) ? 1 : 0;
        prot += d.s[i];
    }
    if (prot == 0 || prot == n)
        throw std::runtime_error("empty protected or unprotected group");

    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c == class_idx) continue;
        if (c == sens_idx && !config.include_sensitive) continue;
        std::vector<std::string> cells(n);
        for (std::size_t i = 0; i < n; ++i) cells[i] = rows[i][c];
        ColumnEncoding enc = ColumnEncoding::Auto;
        auto it = config.column_encoding.find(t.columns[c]);
        if (it != config.column_encoding.end()) enc = it->second;
        encode_column(t.columns[c], cells, enc, cols, names);
    }
    if (cols.empty()) throw std::runtime_error("no feature columns after encoding");

    // Min-max scale each encoded column; constant columns become all-zeros.
    for (auto& col : cols) {
        auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        const double lo = *mn, hi = *mx;
        if (hi > lo) {
            for (double& v : col) v = (v - lo) / (hi - lo);
        } else {
            std::fill(col.begin(), col.end(), 0.0);
        }
    }

    d.x = Matrix(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) d.x(i, j) = cols[j][i];
    d.feature_names = std::move(names);
    return d;
}

void Dataset::save_encoded(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        std::string name = feature_names[j];
        std::replace(name.begin(), name.end(), ',', '_');
        out << name << ',';
    }
    out << "__y__,__s__\n";
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) out << format_double(x(i, j)) << ',';
        out << int(y[i]) << ',' << int(s[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

Dataset Dataset::load_encoded(const std::string& path) {
    RawTable t = read_delimited(path, ',');
    const std::size_t w = t.columns.size();
    if (w < 3 || t.columns[w - 2] != "__y__" || t.columns[w - 1] != "__s__")
        throw std::runtime_error(path + ": not an encoded dataset (missing __y__/__s__)");
    Dataset d;
    const std::size_t f = w - 2;
    const std::size_t n = t.rows.size();
    d.x = Matrix(n, f);
    d.y.resize(n);
    d.s.resize(n);
    d.feature_names.assign(t.columns.begin(), t.columns.begin() + f);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            double v;
            if (!parse_double(t.rows[i][j], v))
                throw std::runtime_error(path + ": bad numeric cell");
            d.x(i, j) = v;
        }
        d.y[i] = t.rows[i][f] == "1";
        d.s[i] = t.rows[i][f + 1] == "1";
    }
    return d;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.x = Matrix(rows.size(), x.cols());
    out.y.resize(rows.size());
    out.s.resize(rows.size());
    out.feature_names = feature_names;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        for (std::size_t j = 0; j < x.cols(); ++j) out.x(i, j) = x(r, j);
        out.y[i] = y[r];
        out.s[i] = s[r];
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test fraction must be in (0,1)");
    const std::size_t n = d.size();
    const std::size_t n_test = static_cast<std::size_t>(std::llround(double(n) * test_fraction));
    if (n_test < 2 || n - n_test < 2)
        throw std::invalid_argument("test fraction leaves a side with <2 instances");

    // Cells of the joint (y, s) stratification, in fixed order.
    std::array<std::vector<std::size_t>, 4> cells;
    for (std::size_t i = 0; i < n; ++i) cells[d.y[i] * 2 + d.s[i]].push_back(i);

    // Largest-remainder allocation of the test quota across cells.
    std::array<std::size_t, 4> take{};
    std::array<double, 4> frac{};
    std::size_t allocated = 0;
    for (int c = 0; c < 4; ++c) {
        const double want = double(cells[c].size()) * double(n_test) / double(n);
        take[c] = static_cast<std::size_t>(want);
        frac[c] = want - double(take[c]);
        allocated += take[c];
    }
    while (allocated < n_test) {
        int best = -1;
        for (int c = 0; c < 4; ++c) {
            if (take[c] >= cells[c].size()) continue;
            if (best < 0 || frac[c] > frac[best]) best = c;
        }
        if (best < 0) break;
        ++take[best];
        frac[best] = -1.0;
        ++allocated;
    }

    Rng rng(derive_seed(seed, kStreamSplit));
    std::vector<std::size_t> test_rows, train_rows;
    for (int c = 0; c < 4; ++c) {
        auto& idx = cells[c];
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            std::size_t j = i + uniform_below(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < take[c] ? test_rows : train_rows).push_back(idx[i]);
    }
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());

    Dataset train = d.select_rows(train_rows);
    Dataset test = d.select_rows(test_rows);
    auto has_both = [](const std::vector<std::uint8_t>& v) {
        bool a = false, b = false;
        for (auto x : v) (x ? a : b) = true;
        return a && b;
    };
    if (!has_both(train.y) || !has_both(test.y))
        throw std::runtime_error("split left a side with a single class");
    if (!has_both(train.s) || !has_both(test.s))
        throw std::runtime_error("split left a side with a single group");
    return {std::move(train), std::move(test)};
}

FoldPlan make_folds(const Dataset& d, int k, std::uint64_t seed) {
    const std::size_t n = d.size();
    if (k < 2) throw std::invalid_argument("fold count must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("fold count exceeds dataset size");

    FoldPlan plan;
    plan.k = k;
    plan.assignment.assign(n, 0);

    Rng rng(derive_seed(seed, kStreamFolds));
    // Deal each class round-robin, continuing the fold cursor across classes
    // so overall fold sizes differ by at most one.
    int cursor = 0;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (d.y[i] == cls) idx.push_back(i);
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            std::size_t j = i + uniform_below(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            plan.assignment[idx[i]] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    return plan;
}

} // namespace fairsel
