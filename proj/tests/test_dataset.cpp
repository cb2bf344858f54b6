#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "rkm/dataset.hpp"
#include "rkm/rng.hpp"

using rkm::CsvSchema;
using rkm::Dataset;
using rkm::DenseMatrix;

namespace {

struct TempCsv {
    std::filesystem::path path;

    explicit TempCsv(const std::string& content) {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("rkm_ds_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
                ".csv");
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempCsv() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

Dataset synthetic_classes(const std::vector<std::size_t>& per_class, std::uint64_t seed = 1) {
    std::string csv = "f1,f2,label\n";
    rkm::Rng rng(seed);
    for (std::size_t c = 0; c < per_class.size(); ++c)
        for (std::size_t i = 0; i < per_class[c]; ++i)
            csv += std::to_string(rng.uniform_pm1()) + "," + std::to_string(rng.uniform_pm1()) +
                   ",c" + std::to_string(c) + "\n";
    TempCsv f(csv);
    return rkm::load_csv(f.path.string(), CsvSchema{});
}

} // namespace

TEST_CASE("three-line smoke load") {
    TempCsv f("f1,f2,label\n1,2,a\n3,4,b\n");
    const Dataset d = rkm::load_csv(f.path.string(), CsvSchema{});
    REQUIRE(d.n() == 2);
    REQUIRE(d.m() == 2);
    REQUIRE(d.x(0, 0) == 1.0);
    REQUIRE(d.x(1, 1) == 4.0);
    REQUIRE(d.codec.class_ids == std::vector<std::string>{"a", "b"});
    REQUIRE(d.y_class == std::vector<int>{0, 1});
}

TEST_CASE("label order follows first appearance") {
    TempCsv f("f,label\n1,B\n2,A\n3,B\n");
    const Dataset d = rkm::load_csv(f.path.string(), CsvSchema{});
    REQUIRE(d.codec.class_ids == std::vector<std::string>{"B", "A"});
    REQUIRE(d.y_class == std::vector<int>{0, 1, 0});
}

TEST_CASE("unparseable feature cell names its physical line") {
    TempCsv f("f1,f2,label\n1,2,a\n3,4,b\nx,6,a\n");
    try {
        rkm::load_csv(f.path.string(), CsvSchema{});
        FAIL("expected DataError");
    } catch (const rkm::DataError& e) {
        REQUIRE(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("ragged rows name their physical line") {
    TempCsv f("f1,f2,label\n1,2,a\n3,b\n");
    try {
        rkm::load_csv(f.path.string(), CsvSchema{});
        FAIL("expected DataError");
    } catch (const rkm::DataError& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("numeric-looking labels stay strings") {
    TempCsv f("f,label\n0.5,0\n0.7,2\n");
    const Dataset d = rkm::load_csv(f.path.string(), CsvSchema{});
    REQUIRE(d.codec.class_ids == std::vector<std::string>{"0", "2"});
}

TEST_CASE("regression targets parse as numbers") {
    CsvSchema schema;
    schema.task = rkm::Task::regression;
    TempCsv f("f,target\n1,0.5\n2,-1.5\n");
    const Dataset d = rkm::load_csv(f.path.string(), schema);
    REQUIRE(d.y_real == std::vector<double>{0.5, -1.5});
    TempCsv bad("f,target\n1,abc\n");
    REQUIRE_THROWS_AS(rkm::load_csv(bad.path.string(), schema), rkm::DataError);
}

TEST_CASE("missing file and empty file are data errors") {
    REQUIRE_THROWS_AS(rkm::load_csv("/nonexistent/file.csv", CsvSchema{}), rkm::DataError);
    TempCsv empty("label\n");
    REQUIRE_THROWS_AS(rkm::load_csv(empty.path.string(), CsvSchema{}), rkm::DataError);
}

TEST_CASE("standardization centers and scales the training split only") {
    const Dataset d = synthetic_classes({20, 20});
    const rkm::SplitIndices sp = rkm::split_random_indices(d.n(), 0.5, 7);
    const Dataset train = rkm::subset(d, sp.train);
    Dataset test = rkm::subset(d, sp.test);
    for (std::size_t i = 0; i < test.n(); ++i)
        for (std::size_t j = 0; j < test.m(); ++j) test.x(i, j) += 3.0;

    const rkm::StandardizeResult sr = rkm::standardize(train, {test});
    for (std::size_t j = 0; j < train.m(); ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < sr.train.n(); ++i) mean += sr.train.x(i, j);
        mean /= static_cast<double>(sr.train.n());
        for (std::size_t i = 0; i < sr.train.n(); ++i)
            var += (sr.train.x(i, j) - mean) * (sr.train.x(i, j) - mean);
        var /= static_cast<double>(sr.train.n());
        REQUIRE(std::fabs(mean) < 1e-10);
        REQUIRE(std::fabs(var - 1.0) < 1e-10);

        double test_mean = 0.0;
        for (std::size_t i = 0; i < sr.others[0].n(); ++i) test_mean += sr.others[0].x(i, j);
        test_mean /= static_cast<double>(sr.others[0].n());
        REQUIRE(std::fabs(test_mean) > 0.5);
    }
}

TEST_CASE("scaler ignores the test rows entirely") {
    const Dataset d = synthetic_classes({10, 10});
    const rkm::SplitIndices sp = rkm::split_random_indices(d.n(), 0.5, 3);
    const Dataset train = rkm::subset(d, sp.train);
    Dataset test_a = rkm::subset(d, sp.test);
    Dataset test_b = rkm::subset(d, sp.test);
    for (double& v : test_b.x.data) v *= 100.0;
    const rkm::Scaler sa = rkm::standardize(train, {test_a}).scaler;
    const rkm::Scaler sb = rkm::standardize(train, {test_b}).scaler;
    REQUIRE(sa.mean == sb.mean);
    REQUIRE(sa.std_dev == sb.std_dev);
}

TEST_CASE("constant features pass through standardization unchanged") {
    TempCsv f("f1,f2,label\n5,1,a\n5,2,b\n5,3,a\n");
    const Dataset d = rkm::load_csv(f.path.string(), CsvSchema{});
    const rkm::StandardizeResult sr = rkm::standardize(d, {});
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(sr.train.x(i, 0) == 5.0);
}

TEST_CASE("random split takes the floor of the train fraction") {
    const rkm::SplitIndices sp = rkm::split_random_indices(10, 0.7, 42);
    REQUIRE(sp.train.size() == 7);
    REQUIRE(sp.test.size() == 3);
    std::set<std::size_t> all(sp.train.begin(), sp.train.end());
    all.insert(sp.test.begin(), sp.test.end());
    REQUIRE(all.size() == 10);
    REQUIRE(*all.rbegin() == 9);
    REQUIRE_THROWS_AS(rkm::split_random_indices(10, 0.0, 1), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::split_random_indices(10, 1.0, 1), rkm::InputError);
}

TEST_CASE("splits are deterministic in the seed") {
    const rkm::SplitIndices a = rkm::split_random_indices(50, 0.6, 5);
    const rkm::SplitIndices b = rkm::split_random_indices(50, 0.6, 5);
    const rkm::SplitIndices c = rkm::split_random_indices(50, 0.6, 6);
    REQUIRE(a.train == b.train);
    REQUIRE(a.test == b.test);
    REQUIRE(a.train != c.train);
}

TEST_CASE("per-class split honors exact counts") {
    const Dataset d = synthetic_classes({46});
    const rkm::SplitIndices sp = rkm::split_per_class_indices(d, {23}, 9);
    REQUIRE(sp.train.size() == 23);
    REQUIRE(sp.test.size() == 23);

    const Dataset d2 = synthetic_classes({730});
    const rkm::SplitIndices sp2 = rkm::split_per_class_indices(d2, {100}, 9);
    REQUIRE(sp2.train.size() == 100);
    REQUIRE(sp2.test.size() == 630);
}

TEST_CASE("per-class split partitions within every class") {
    const Dataset d = synthetic_classes({12, 30, 7});
    const rkm::SplitIndices sp = rkm::split_per_class_indices(d, {6, 10, 3}, 11);
    REQUIRE(sp.train.size() == 19);
    REQUIRE(sp.test.size() == 12 + 30 + 7 - 19);
    std::vector<std::size_t> train_per_class(3, 0);
    for (std::size_t idx : sp.train)
        ++train_per_class[static_cast<std::size_t>(d.y_class[idx])];
    REQUIRE(train_per_class == std::vector<std::size_t>{6, 10, 3});
    std::set<std::size_t> all(sp.train.begin(), sp.train.end());
    all.insert(sp.test.begin(), sp.test.end());
    REQUIRE(all.size() == d.n());
}

TEST_CASE("per-class split rejects oversized requests naming the class") {
    const Dataset d = synthetic_classes({5, 8});
    try {
        rkm::split_per_class_indices(d, {6, 2}, 1);
        FAIL("expected DataError");
    } catch (const rkm::DataError& e) {
        REQUIRE(std::string(e.what()).find("c0") != std::string::npos);
    }
}

TEST_CASE("kfold gives equal folds when k divides n") {
    const std::vector<rkm::Fold> folds = rkm::kfold_indices(10, 5, 13);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> seen;
    for (const rkm::Fold& f : folds) {
        REQUIRE(f.val_idx.size() == 2);
        REQUIRE(f.train_idx.size() == 8);
        seen.insert(f.val_idx.begin(), f.val_idx.end());
    }
    REQUIRE(seen.size() == 10);
}

TEST_CASE("kfold spreads the remainder over the first folds") {
    const std::vector<rkm::Fold> folds = rkm::kfold_indices(11, 5, 13);
    std::vector<std::size_t> sizes;
    for (const rkm::Fold& f : folds) sizes.push_back(f.val_idx.size());
    REQUIRE(sizes == std::vector<std::size_t>{3, 2, 2, 2, 2});
    REQUIRE_THROWS_AS(rkm::kfold_indices(4, 5, 1), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::kfold_indices(4, 1, 1), rkm::InputError);
}

TEST_CASE("background rows leave the samples but keep their pixels") {
    CsvSchema schema;
    schema.coord_columns = {0, 1};
    schema.label_column = -1;
    TempCsv f("row,col,b1,label\n0,0,1.0,0\n0,1,2.0,x\n1,0,3.0,y\n1,1,4.0,0\n");
    const Dataset d = rkm::load_csv(f.path.string(), schema);
    REQUIRE(d.n() == 2);
    REQUIRE(d.m() == 1);
    REQUIRE(d.has_coords);
    REQUIRE(d.coords.size() == 2);
    REQUIRE(d.background_coords.size() == 2);
    REQUIRE(d.codec.class_ids == std::vector<std::string>{"x", "y"});
    REQUIRE(d.coords[0] == std::array<int, 2>{0, 1});
    REQUIRE(d.background_coords[0] == std::array<int, 2>{0, 0});
}

TEST_CASE("subset keeps codec and coordinates aligned") {
    CsvSchema schema;
    schema.coord_columns = {0, 1};
    TempCsv f("row,col,b1,label\n0,0,1.0,x\n0,1,2.0,y\n1,0,3.0,x\n");
    const Dataset d = rkm::load_csv(f.path.string(), schema);
    const Dataset s = rkm::subset(d, {2, 0});
    REQUIRE(s.n() == 2);
    REQUIRE(s.x(0, 0) == 3.0);
    REQUIRE(s.label_of(0) == "x");
    REQUIRE(s.coords[0] == std::array<int, 2>{1, 0});
    REQUIRE(s.codec.class_ids == d.codec.class_ids);
}

TEST_CASE("feature-only matrix loader") {
    TempCsv f("a,b\n1,2\n3,4\n");
    const DenseMatrix x = rkm::load_matrix_csv(f.path.string(), true);
    REQUIRE(x.rows == 2);
    REQUIRE(x.cols == 2);
    REQUIRE(x(1, 0) == 3.0);
    TempCsv bare("1,2\n3,4\n5,6\n");
    REQUIRE(rkm::load_matrix_csv(bare.path.string(), false).rows == 3);
    TempCsv bad("1,2\n3,zzz\n");
    try {
        rkm::load_matrix_csv(bad.path.string(), false);
        FAIL("expected DataError");
    } catch (const rkm::DataError& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
}
