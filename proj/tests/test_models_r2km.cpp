#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rkm/evaluation.hpp"
#include "rkm/kernels.hpp"
#include "rkm/models.hpp"
#include "rkm/rng.hpp"
#include "oracles.hpp"

using rkm::DenseMatrix;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    rkm::Rng rng(seed);
    DenseMatrix m(r, c);
    for (double& v : m.data) v = rng.uniform_pm1();
    return m;
}

} // namespace

TEST_CASE("single unit sample has the closed-form scalar solution") {
    // Omega = 1, Omega_hat = 1, eta = lambda = 1: (2 + 1) H = 1 so H = 1/3
    // and the training-point score is 2/3.
    DenseMatrix x(1, 1), y(1, 1);
    x(0, 0) = 1.0;
    y(0, 0) = 1.0;
    const rkm::R2kmModel m = rkm::fit_r2km(x, y, 1.0, 1.0, 1.0);
    REQUIRE(m.h(0, 0) == Catch::Approx(1.0 / 3.0).margin(1e-12));
    const DenseMatrix s = rkm::predict_r2km_scores(m, x);
    REQUIRE(s(0, 0) == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("fit satisfies the residual identity") {
    // Y - (1/eta)(Omega + Omega_hat) H = lambda H by construction.
    const DenseMatrix x = random_matrix(25, 4, 110);
    const DenseMatrix y = random_matrix(25, 3, 111);
    const double eta = 0.1, lambda = 10.0, sigma = 1.3;
    const rkm::R2kmModel m = rkm::fit_r2km(x, y, eta, lambda, sigma);
    const DenseMatrix k = rkm::combined_gram(x, sigma);
    DenseMatrix residual = y;
    const DenseMatrix kh = rkm::matmul(k, m.h);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.rows; ++i)
        for (std::size_t j = 0; j < y.cols; ++j) {
            const double r = y(i, j) - kh(i, j) / eta - lambda * m.h(i, j);
            worst = std::max(worst, std::fabs(r));
        }
    (void)residual;
    REQUIRE(worst / (1.0 + rkm::max_abs(y)) < 1e-10);
}

TEST_CASE("training-point scores match kernel ridge regression by explicit inverse") {
    const DenseMatrix x = random_matrix(20, 3, 112);
    const DenseMatrix y = random_matrix(20, 2, 113);
    const double eta = 2.0, lambda = 0.5, sigma = 0.8;
    const rkm::R2kmModel m = rkm::fit_r2km(x, y, eta, lambda, sigma);
    const DenseMatrix scores = rkm::predict_r2km_scores(m, x);

    DenseMatrix k = rkm::combined_gram(x, sigma);
    for (double& v : k.data) v /= eta;
    const DenseMatrix ref = oracle::krr_train_predictions(k, y, lambda);
    REQUIRE(rkm::rel_diff(scores, ref) < 1e-8);
}

TEST_CASE("huge lambda shrinks the dual weights toward zero") {
    const DenseMatrix x = random_matrix(15, 3, 114);
    const DenseMatrix y = random_matrix(15, 2, 115);
    const double lambda = 1e5;
    const rkm::R2kmModel m = rkm::fit_r2km(x, y, 1.0, lambda, 1.0);
    // The system matrix has eigenvalues >= lambda, so per column
    // ||h||_2 <= ||y||_2 / lambda, hence ||H||_inf <= sqrt(n) ||Y||_inf / lambda.
    const double cap = std::sqrt(15.0) * rkm::max_abs(y) / lambda;
    REQUIRE(rkm::max_abs(m.h) <= cap * (1.0 + 1e-9));
    REQUIRE(rkm::max_abs(m.h) <= 1e-4 * rkm::max_abs(y));
}

TEST_CASE("kernel solver: single-row prediction equals the batch row") {
    const DenseMatrix x = random_matrix(12, 3, 116);
    const DenseMatrix y = random_matrix(12, 2, 117);
    const rkm::R2kmModel m = rkm::fit_r2km(x, y, 0.5, 1.0, 1.1);
    const DenseMatrix z = random_matrix(5, 3, 118);
    const DenseMatrix batch = rkm::predict_r2km_scores(m, z);
    DenseMatrix row(1, 3);
    for (std::size_t j = 0; j < 3; ++j) row(0, j) = z(2, j);
    const DenseMatrix single = rkm::predict_r2km_scores(m, row);
    for (std::size_t j = 0; j < 2; ++j)
        REQUIRE(single(0, j) == Catch::Approx(batch(2, j)).margin(1e-14));
}

TEST_CASE("fitting is deterministic") {
    const DenseMatrix x = random_matrix(10, 2, 119);
    const DenseMatrix y = random_matrix(10, 2, 120);
    const rkm::R2kmModel a = rkm::fit_r2km(x, y, 1.0, 1.0, 2.0);
    const rkm::R2kmModel b = rkm::fit_r2km(x, y, 1.0, 1.0, 2.0);
    REQUIRE(a.h.data == b.h.data);
}

TEST_CASE("invalid hyperparameters are rejected") {
    const DenseMatrix x = random_matrix(5, 2, 121);
    const DenseMatrix y = random_matrix(5, 1, 122);
    REQUIRE_THROWS_AS(rkm::fit_r2km(x, y, 0.0, 1.0, 1.0), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::fit_r2km(x, y, 1.0, -1.0, 1.0), rkm::InputError);
    REQUIRE_THROWS_AS(rkm::fit_r2km(x, y, 1.0, 1.0, 0.0), rkm::InputError);
    const DenseMatrix y4 = random_matrix(4, 1, 123);
    REQUIRE_THROWS_AS(rkm::fit_r2km(x, y4, 1.0, 1.0, 1.0), rkm::InputError);
}

TEST_CASE("regression pipeline predicts real values") {
    rkm::Dataset train;
    train.task = rkm::Task::regression;
    train.x = random_matrix(30, 2, 124);
    for (std::size_t i = 0; i < 30; ++i)
        train.y_real.push_back(std::sin(train.x(i, 0)) + 0.5 * train.x(i, 1));
    rkm::HyperParams p;
    p.eta = 1.0;
    p.lambda = 1e-3;
    p.sigma = 1.0;
    const rkm::TrainedModel m = rkm::fit_model(rkm::ModelKind::r2km, train, p, 0);
    const std::vector<double> pred = rkm::predict_values(m, train.x);
    const rkm::RegressionErrors err = rkm::regression_metrics(train.y_real, pred);
    REQUIRE(err.rmse < 0.05);
}
