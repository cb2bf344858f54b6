#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rkm/stat_tests.hpp"

using rkm::ScoreTable;

namespace {

ScoreTable table_from(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& rows, bool higher_better) {
    ScoreTable t;
    t.model_names = names;
    t.higher_better = higher_better;
    t.scores = rkm::DenseMatrix(rows.size(), names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) t.scores(i, j) = rows[i][j];
    return t;
}

} // namespace

TEST_CASE("a total order over two models ranks them one and two") {
    const ScoreTable t = table_from({"a", "b"}, {{0.9, 0.5}, {0.8, 0.1}, {0.7, 0.6}}, true);
    const std::vector<double> r = rkm::average_ranks(t);
    REQUIRE(r[0] == 1.0);
    REQUIRE(r[1] == 2.0);
}

TEST_CASE("exact ties take the mean of the tied positions") {
    const ScoreTable t = table_from({"a", "b", "c"}, {{0.5, 0.5, 0.1}, {0.9, 0.1, 0.5}}, true);
    const std::vector<double> r = rkm::average_ranks(t);
    REQUIRE(r[0] == Catch::Approx((1.5 + 1.0) / 2.0));
    REQUIRE(r[1] == Catch::Approx((1.5 + 3.0) / 2.0));
    REQUIRE(r[2] == Catch::Approx((3.0 + 2.0) / 2.0));
}

TEST_CASE("lower-better tables invert the ranking") {
    const ScoreTable t = table_from({"a", "b"}, {{0.2, 0.9}, {0.1, 0.8}}, false);
    const std::vector<double> r = rkm::average_ranks(t);
    REQUIRE(r[0] == 1.0);
    REQUIRE(r[1] == 2.0);
}

TEST_CASE("per-dataset ranks sum to k(k+1)/2") {
    const ScoreTable t = table_from(
        {"a", "b", "c", "d"},
        {{0.1, 0.2, 0.2, 0.9}, {0.5, 0.5, 0.5, 0.5}, {0.4, 0.3, 0.2, 0.1}}, true);
    const std::vector<double> r = rkm::average_ranks(t);
    double sum = 0.0;
    for (double v : r) sum += v;
    REQUIRE(sum == Catch::Approx(4.0 * 5.0 / 2.0));
}

TEST_CASE("classification rank row reproduces the published statistics") {
    const std::vector<double> ranks{1.57, 3.80, 4.09, 2.96, 2.58};
    const rkm::FriedmanResult fr = rkm::friedman(ranks, 38);
    REQUIRE(fr.chi2_f == Catch::Approx(61.5752).margin(0.01));
    REQUIRE(fr.f_f == Catch::Approx(25.1953).margin(0.01));
    REQUIRE(fr.df_chi2 == 4);
    REQUIRE(fr.df_f.first == 4);
    REQUIRE(fr.df_f.second == 148);
}

TEST_CASE("regression rank row reproduces the published statistics") {
    const std::vector<double> ranks{1.44, 2.11, 4.44, 3.11, 3.89};
    const rkm::FriedmanResult fr = rkm::friedman(ranks, 9);
    REQUIRE(fr.chi2_f == Catch::Approx(21.7566).margin(0.01));
    REQUIRE(fr.f_f == Catch::Approx(12.2199).margin(0.01));
    REQUIRE(fr.df_f.second == 32);
}

TEST_CASE("equal average ranks zero the statistic") {
    const rkm::FriedmanResult fr = rkm::friedman({3.0, 3.0, 3.0, 3.0, 3.0}, 10);
    REQUIRE(fr.chi2_f == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(fr.f_f == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("friedman from the full table equals friedman from its average ranks") {
    const ScoreTable t = table_from(
        {"a", "b", "c"},
        {{0.9, 0.5, 0.1}, {0.8, 0.2, 0.3}, {0.7, 0.6, 0.5}, {0.1, 0.2, 0.3}}, true);
    const rkm::FriedmanResult from_table = rkm::friedman(t);
    const rkm::FriedmanResult from_ranks = rkm::friedman(rkm::average_ranks(t), 4);
    REQUIRE(from_table.chi2_f == Catch::Approx(from_ranks.chi2_f).margin(1e-12));
    REQUIRE(from_table.f_f == Catch::Approx(from_ranks.f_f).margin(1e-12));
}

TEST_CASE("a degenerate denominator is a numerical error") {
    // k = 2 with a total order: chi2 = N, so N(k-1) - chi2 = 0.
    REQUIRE_THROWS_AS(rkm::friedman({1.0, 2.0}, 5), rkm::NumericError);
}

TEST_CASE("friedman validates its inputs") {
    REQUIRE_THROWS_AS(rkm::friedman({1.0}, 5), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::friedman({1.0, 2.0}, 1), rkm::InputError);
}

TEST_CASE("critical differences match the published values") {
    REQUIRE(rkm::nemenyi_cd(5, 38, 2.728) == Catch::Approx(0.9895).margin(0.0005));
    REQUIRE(rkm::nemenyi_cd(5, 9, 2.728) == Catch::Approx(2.0333).margin(0.0005));
}

TEST_CASE("zero critical value collapses the difference to zero") {
    REQUIRE(rkm::nemenyi_cd(5, 38, 0.0) == 0.0);
}

TEST_CASE("quadrupling the dataset count halves the critical difference exactly") {
    for (std::size_t n : {7u, 9u, 38u}) {
        const double cd1 = rkm::nemenyi_cd(5, n, 2.728);
        const double cd4 = rkm::nemenyi_cd(5, 4 * n, 2.728);
        REQUIRE(cd4 == cd1 / 2.0);
    }
}

TEST_CASE("epsilon of two zeroes the confidence term exactly") {
    const rkm::BoundResult b = rkm::rademacher_bound({1.0}, 1.0, {0.0}, 2.0);
    REQUIRE(b.confidence_term == 0.0);
    REQUIRE(b.total == 4.0);
    REQUIRE(b.slack_term == 0.0);
    REQUIRE(b.complexity_term == 4.0);
}

TEST_CASE("bound components are nonnegative and sum to the total") {
    const rkm::BoundResult b =
        rkm::rademacher_bound({1.0, 1.0, 1.0, 1.0}, 2.0, {0.1, 0.0, 0.3, 0.2}, 0.05);
    REQUIRE(b.slack_term >= 0.0);
    REQUIRE(b.confidence_term >= 0.0);
    REQUIRE(b.complexity_term >= 0.0);
    REQUIRE(b.total ==
            Catch::Approx(b.slack_term + b.confidence_term + b.complexity_term));
    REQUIRE(b.slack_term == Catch::Approx(0.15));
}

TEST_CASE("the bound shrinks as samples accumulate on a unit diagonal") {
    double prev = 1e300;
    for (std::size_t n : {10u, 100u, 1000u}) {
        const rkm::BoundResult b = rkm::rademacher_bound(
            std::vector<double>(n, 1.0), 1.0, std::vector<double>(n, 0.0), 0.1);
        REQUIRE(b.total < prev);
        prev = b.total;
    }
}

TEST_CASE("bound preconditions are enforced") {
    REQUIRE_THROWS_AS(rkm::rademacher_bound({}, 1.0, {}, 0.5), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::rademacher_bound({1.0}, 1.0, {0.0}, 0.0), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::rademacher_bound({1.0}, 1.0, {0.0}, 2.5), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::rademacher_bound({1.0}, -1.0, {0.0}, 0.5), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::rademacher_bound({-1.0}, 1.0, {0.0}, 0.5), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::rademacher_bound({1.0}, 1.0, {-0.1}, 0.5), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::rademacher_bound({1.0}, 1.0, {0.0, 0.0}, 0.5), rkm::InputError);
}

TEST_CASE("score tables round trip through CSV") {
    const ScoreTable t = table_from({"m1", "m2", "m3"},
                                    {{0.125, 0.5, 1.0 / 3.0}, {0.9, 0.25, 0.1}}, true);
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() /
        ("rkm_scores_" + std::to_string(::getpid()) + ".csv");
    {
        std::ofstream out(path, std::ios::binary);
        rkm::write_score_table_csv(out, t);
    }
    const ScoreTable back = rkm::read_score_table_csv(path.string(), true);
    std::filesystem::remove(path);
    REQUIRE(back.model_names == t.model_names);
    REQUIRE(back.scores.rows == 2);
    REQUIRE(back.scores.data == t.scores.data);
}

TEST_CASE("reading a malformed score table names the line") {
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() /
        ("rkm_scores_bad_" + std::to_string(::getpid()) + ".csv");
    {
        std::ofstream out(path, std::ios::binary);
        out << "m1,m2\n0.5,0.6\n0.7,oops\n";
    }
    try {
        rkm::read_score_table_csv(path.string(), true);
        FAIL("expected DataError");
    } catch (const rkm::DataError& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("rank tables require at least two models and two datasets") {
    REQUIRE_THROWS_AS(rkm::average_ranks(table_from({"a"}, {{0.1}, {0.2}}, true)),
                      rkm::InputError);
    REQUIRE_THROWS_AS(rkm::average_ranks(table_from({"a", "b"}, {{0.1, 0.2}}, true)),
                      rkm::InputError);
}
