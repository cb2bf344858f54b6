#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rkm/kernels.hpp"
#include "rkm/rng.hpp"
#include "oracles.hpp"

using rkm::DenseMatrix;
using rkm::Kernel;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    rkm::Rng rng(seed);
    DenseMatrix m(r, c);
    for (double& v : m.data) v = rng.uniform_pm1();
    return m;
}

} // namespace

TEST_CASE("gaussian gram diagonal is exactly one") {
    const DenseMatrix x = random_matrix(6, 3, 40);
    const DenseMatrix k = rkm::gram(x, Kernel::gaussian(0.8));
    for (std::size_t i = 0; i < 6; ++i) REQUIRE(k(i, i) == 1.0);
}

TEST_CASE("unit-sigma gaussian between 0 and 2 gives exp(-2)") {
    DenseMatrix x(1, 1), z(1, 1);
    x(0, 0) = 0.0;
    z(0, 0) = 2.0;
    const DenseMatrix k = rkm::cross_gram(x, z, Kernel::gaussian(1.0));
    REQUIRE(k(0, 0) == Catch::Approx(std::exp(-2.0)).margin(1e-15));
}

TEST_CASE("linear gram of the identity is the identity") {
    const DenseMatrix k = rkm::gram(DenseMatrix::identity(2), Kernel::linear());
    REQUIRE(k(0, 0) == 1.0);
    REQUIRE(k(0, 1) == 0.0);
    REQUIRE(k(1, 0) == 0.0);
    REQUIRE(k(1, 1) == 1.0);
}

TEST_CASE("cross gram against itself equals the gram") {
    const DenseMatrix x = random_matrix(5, 4, 41);
    for (const Kernel& k : {Kernel::linear(), Kernel::gaussian(1.3)}) {
        const DenseMatrix g = rkm::gram(x, k);
        const DenseMatrix c = rkm::cross_gram(x, x, k);
        REQUIRE(rkm::rel_diff(g, c) < 1e-14);
    }
}

TEST_CASE("linear cross gram is a plain matrix product") {
    const DenseMatrix x = random_matrix(4, 3, 42);
    const DenseMatrix z = random_matrix(5, 3, 43);
    const DenseMatrix k = rkm::cross_gram(x, z, Kernel::linear());
    const DenseMatrix ref = rkm::matmul(x, rkm::transpose(z));
    REQUIRE(rkm::rel_diff(k, ref) < 1e-14);
}

TEST_CASE("cross gram matches the per-pair oracle") {
    const DenseMatrix x = random_matrix(4, 5, 44);
    const DenseMatrix z = random_matrix(3, 5, 45);
    const double sigma = 0.9;
    const DenseMatrix g = rkm::cross_gram(x, z, Kernel::gaussian(sigma));
    const DenseMatrix l = rkm::cross_gram(x, z, Kernel::linear());
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto xi = oracle::row_of(x, i);
            const auto zj = oracle::row_of(z, j);
            REQUIRE(g(i, j) == Catch::Approx(oracle::gaussian_pair(xi, zj, sigma)).margin(1e-12));
            REQUIRE(l(i, j) == Catch::Approx(oracle::linear_pair(xi, zj)).margin(1e-12));
        }
}

TEST_CASE("combined kernel of a single unit point") {
    DenseMatrix x(1, 1);
    x(0, 0) = 1.0;
    const DenseMatrix k = rkm::combined_gram(x, 1.0);
    REQUIRE(k.rows == 1);
    REQUIRE(k(0, 0) == 2.0);
}

TEST_CASE("combined gram diagonal is squared norm plus one") {
    const DenseMatrix x = random_matrix(5, 3, 46);
    const DenseMatrix k = rkm::combined_gram(x, 0.7);
    for (std::size_t i = 0; i < 5; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < 3; ++j) sq += x(i, j) * x(i, j);
        REQUIRE(k(i, i) == Catch::Approx(sq + 1.0).margin(1e-12));
    }
}

TEST_CASE("grams are exactly symmetric") {
    const DenseMatrix x = random_matrix(7, 4, 47);
    for (const Kernel& k : {Kernel::linear(), Kernel::gaussian(2.0)}) {
        const DenseMatrix g = rkm::gram(x, k);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j) REQUIRE(g(i, j) == g(j, i));
    }
}

TEST_CASE("gaussian entries live in (0, 1]") {
    const DenseMatrix x = random_matrix(8, 3, 48);
    const DenseMatrix g = rkm::gram(x, Kernel::gaussian(0.5));
    for (double v : g.data) {
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("gaussian gram is positive semidefinite") {
    const DenseMatrix x = random_matrix(6, 4, 49);
    const DenseMatrix g = rkm::gram(x, Kernel::gaussian(1.1));
    for (double ev : oracle::symmetric_eigenvalues(g)) REQUIRE(ev >= -1e-8);
}

TEST_CASE("quadratic forms over a gram are nonnegative") {
    const DenseMatrix x = random_matrix(9, 3, 50);
    const DenseMatrix g = rkm::combined_gram(x, 1.4);
    rkm::Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(9);
        double sq = 0.0;
        for (double& vi : v) {
            vi = rng.uniform_pm1();
            sq += vi * vi;
        }
        double quad = 0.0;
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j) quad += v[i] * g(i, j) * v[j];
        REQUIRE(quad >= -1e-8 * sq);
    }
}

TEST_CASE("bad kernel parameters are rejected") {
    REQUIRE_THROWS_AS(Kernel::gaussian(0.0), rkm::InputError);
    REQUIRE_THROWS_AS(Kernel::gaussian(-1.0), rkm::InputError);
    const DenseMatrix x = random_matrix(3, 2, 52);
    const DenseMatrix z = random_matrix(3, 3, 53);
    REQUIRE_THROWS_AS(rkm::cross_gram(x, z, Kernel::linear()), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::gram(DenseMatrix(), Kernel::linear()), rkm::InputError);
}
