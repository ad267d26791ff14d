#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "fairsel/dataset.hpp"
#include "testutil.hpp"

using namespace fairsel;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& contents) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << contents;
    return p;
}

DatasetConfig basic_config() {
    DatasetConfig c;
    c.class_column = "class";
    c.positive_value = "yes";
    c.sensitive_column = "sex";
    c.protected_values = {"f"};
    return c;
}

} // namespace

TEST_CASE("load_csv maps class and sensitive columns directly") {
    auto p = write_temp("ds_basic.csv",
                        "a,sex,class\n"
                        "0.5,m,yes\n"
                        "0.25,f,no\n"
                        "1.0,m,yes\n");
    Dataset d = load_csv(p.string(), basic_config());
    REQUIRE(d.size() == 3);
    CHECK(d.y == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(d.s == std::vector<std::uint8_t>{0, 1, 0});
    // sensitive column excluded from X by default
    CHECK(d.features() == 1);
    CHECK(d.feature_names == std::vector<std::string>{"a"});
}

TEST_CASE("load_csv min-max scales numeric columns") {
    auto p = write_temp("ds_scale.csv",
                        "a,b,sex,class\n"
                        "2,7,m,yes\n"
                        "4,7,f,no\n"
                        "10,7,m,yes\n");
    Dataset d = load_csv(p.string(), basic_config());
    CHECK(d.x(0, 0) == 0.0);
    CHECK(d.x(1, 0) == Catch::Approx(0.25));
    CHECK(d.x(2, 0) == 1.0);
    // constant column maps to zeros
    CHECK(d.x(0, 1) == 0.0);
    CHECK(d.x(2, 1) == 0.0);
}

TEST_CASE("load_csv one-hot encodes small categorical columns") {
    auto p = write_temp("ds_cat.csv",
                        "color,sex,class\n"
                        "red,m,yes\n"
                        "blue,f,no\n"
                        "red,m,yes\n");
    Dataset d = load_csv(p.string(), basic_config());
    REQUIRE(d.feature_names == std::vector<std::string>{"color=blue", "color=red"});
    CHECK(d.x(0, 1) == 1.0);
    CHECK(d.x(1, 0) == 1.0);
    CHECK(d.x(1, 1) == 0.0);
}

TEST_CASE("load_csv imputes missing cells") {
    auto p = write_temp("ds_missing.csv",
                        "a,color,sex,class\n"
                        "1,red,m,yes\n"
                        "?,red,f,no\n"
                        "3,?,m,yes\n"
                        "5,blue,f,no\n");
    Dataset d = load_csv(p.string(), basic_config());
    // median of {1,3,5} = 3 -> scaled (3-1)/(5-1) = 0.5
    CHECK(d.x(1, 0) == Catch::Approx(0.5));
    // mode of {red,red,blue} = red
    CHECK(d.x(2, d.features() - 1) == 1.0); // color=red column is last
}

TEST_CASE("load_csv error paths") {
    DatasetConfig c = basic_config();
    SECTION("single-value sensitive column") {
        auto p = write_temp("ds_onegroup.csv", "a,sex,class\n1,f,yes\n2,f,no\n");
        REQUIRE_THROWS_WITH(load_csv(p.string(), c),
                            Catch::Matchers::ContainsSubstring("empty protected or unprotected"));
    }
    SECTION("single-class dataset") {
        auto p = write_temp("ds_oneclass.csv", "a,sex,class\n1,m,yes\n2,f,yes\n");
        REQUIRE_THROWS_WITH(load_csv(p.string(), c),
                            Catch::Matchers::ContainsSubstring("single-class"));
    }
    SECTION("unknown class column") {
        auto p = write_temp("ds_nocol.csv", "a,sex,klass\n1,m,yes\n2,f,no\n");
        REQUIRE_THROWS_WITH(load_csv(p.string(), c),
                            Catch::Matchers::ContainsSubstring("unknown column"));
    }
    SECTION("ragged row") {
        auto p = write_temp("ds_ragged.csv", "a,sex,class\n1,m,yes\n2,f\n");
        REQUIRE_THROWS(load_csv(p.string(), c));
    }
    SECTION("protected value never observed") {
        DatasetConfig c2 = c;
        c2.protected_values = {"x"};
        auto p = write_temp("ds_unobserved.csv", "a,sex,class\n1,m,yes\n2,f,no\n");
        REQUIRE_THROWS_WITH(load_csv(p.string(), c2),
                            Catch::Matchers::ContainsSubstring("not observed"));
    }
}

TEST_CASE("encoded dataset round-trips exactly") {
    Dataset d = testutil::random_dataset(23, 7, 99);
    fs::path p = fs::temp_directory_path() / "roundtrip.csv";
    d.save_encoded(p.string());
    Dataset back = Dataset::load_encoded(p.string());
    CHECK(back.x == d.x);
    CHECK(back.y == d.y);
    CHECK(back.s == d.s);
}

TEST_CASE("train_test_split") {
    Dataset d = testutil::random_dataset(10, 3, 5);
    SECTION("sizes are exact") {
        auto [train, test] = train_test_split(d, 0.3, 17);
        CHECK(train.size() == 7);
        CHECK(test.size() == 3);
    }
    SECTION("same seed twice gives identical assignment") {
        auto [tr1, te1] = train_test_split(d, 0.3, 17);
        auto [tr2, te2] = train_test_split(d, 0.3, 17);
        CHECK(tr1.x == tr2.x);
        CHECK(te1.x == te2.x);
        CHECK(tr1.y == tr2.y);
        CHECK(te1.s == te2.s);
    }
    SECTION("extreme fraction rejected") {
        REQUIRE_THROWS(train_test_split(d, 0.99, 17));
        REQUIRE_THROWS(train_test_split(d, 0.0, 17));
    }
    SECTION("split is stratified on (y,s) for larger data") {
        Dataset big = testutil::random_dataset(400, 3, 6);
        auto [train, test] = train_test_split(big, 0.25, 1);
        auto rate = [](const Dataset& ds) {
            double pos = 0;
            for (auto v : ds.y) pos += v;
            return pos / double(ds.size());
        };
        CHECK(std::abs(rate(train) - rate(test)) < 0.03);
    }
}

TEST_CASE("make_folds") {
    SECTION("N=9 k=3 gives three folds of three") {
        Dataset d = testutil::random_dataset(9, 2, 3);
        FoldPlan plan = make_folds(d, 3, 11);
        std::vector<int> sizes(3, 0);
        for (int a : plan.assignment) ++sizes[a];
        CHECK(sizes == std::vector<int>{3, 3, 3});
    }
    SECTION("N=10 k=3 gives sizes {4,3,3}") {
        Dataset d = testutil::random_dataset(10, 2, 3);
        FoldPlan plan = make_folds(d, 3, 11);
        std::vector<int> sizes(3, 0);
        for (int a : plan.assignment) ++sizes[a];
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
        CHECK(sizes == std::vector<int>{4, 3, 3});
    }
    SECTION("k=1 rejected") {
        Dataset d = testutil::random_dataset(10, 2, 3);
        REQUIRE_THROWS(make_folds(d, 1, 11));
    }
    SECTION("k > N rejected") {
        Dataset d = testutil::random_dataset(4, 2, 3);
        REQUIRE_THROWS(make_folds(d, 5, 11));
    }
    SECTION("deterministic per seed, stratified per class") {
        Dataset d = testutil::random_dataset(60, 2, 8);
        FoldPlan a = make_folds(d, 3, 21);
        FoldPlan b = make_folds(d, 3, 21);
        CHECK(a.assignment == b.assignment);
        // every fold holds at least one instance of each class
        for (int f = 0; f < 3; ++f) {
            bool c0 = false, c1 = false;
            for (std::size_t i = 0; i < d.size(); ++i)
                if (a.assignment[i] == f) (d.y[i] ? c1 : c0) = true;
            CHECK((c0 && c1));
        }
    }
}

TEST_CASE("config parses from json") {
    auto p = write_temp("cfg.json", R"({
        "class_column": "class",
        "positive_value": "good",
        "sensitive_column": "age",
        "protected_values": ["19", "20"],
        "encoding": {"zip": "ordinal"},
        "missing_policy": "impute",
        "delimiter": ",",
        "include_sensitive": false
    })");
    DatasetConfig c = DatasetConfig::from_json_file(p.string());
    CHECK(c.class_column == "class");
    CHECK(c.positive_value == "good");
    CHECK(c.protected_values.size() == 2);
    CHECK(c.column_encoding.at("zip") == ColumnEncoding::Ordinal);
}
