#include <gtest/gtest.h>

#include <cmath>

#include "dar/error.hpp"
#include "dar/ridge.hpp"
#include "dar/rng.hpp"

using namespace dar;

namespace {

const MomentOptions kRaw{false, false};

}  // namespace

TEST(Moments, SingleSample) {
    const Matrix x = (Matrix(2, 1) << 1.0, 2.0).finished();
    const Matrix y = (Matrix(1, 1) << 3.0).finished();
    const auto m = accumulate_moments(x, y, kRaw);
    EXPECT_EQ(m.Sigma, (Matrix(2, 2) << 1, 2, 2, 4).finished());
    EXPECT_EQ(m.C, (Matrix(2, 1) << 3, 6).finished());
    EXPECT_DOUBLE_EQ(m.target_energy, 9.0);
}

TEST(Moments, OrthonormalPair) {
    Matrix x(2, 2);
    x << 1, 0, 0, 1;
    const auto m = accumulate_moments(x, Matrix::Zero(1, 2), kRaw);
    EXPECT_EQ(m.Sigma, Matrix::Identity(2, 2) / 2.0);
}

TEST(Moments, NaiveLoopOracle) {
    RngStream rng(1);
    const Matrix x = gaussian_matrix(6, 50, rng);
    const Matrix y = gaussian_matrix(2, 50, rng);
    const auto m = accumulate_moments(x, y, kRaw);
    Matrix S = Matrix::Zero(6, 6);
    Matrix C = Matrix::Zero(6, 2);
    for (Eigen::Index n = 0; n < 50; ++n) {
        for (Eigen::Index i = 0; i < 6; ++i) {
            for (Eigen::Index j = 0; j < 6; ++j) S(i, j) += x(i, n) * x(j, n) / 50.0;
            for (Eigen::Index j = 0; j < 2; ++j) C(i, j) += x(i, n) * y(j, n) / 50.0;
        }
    }
    EXPECT_LE((m.Sigma - S).norm(), 1e-13);
    EXPECT_LE((m.C - C).norm(), 1e-13);
}

TEST(Moments, CenteringRemovesMeans) {
    RngStream rng(2);
    Matrix x = gaussian_matrix(3, 100, rng);
    x.row(1).array() += 5.0;
    const Matrix y = Matrix::Constant(1, 100, 7.0);
    const auto m = accumulate_moments(x, y, {true, false});
    EXPECT_NEAR(m.state_norm.mean(1), x.row(1).mean(), 1e-14);
    EXPECT_NEAR(m.target_mean(0), 7.0, 1e-14);
    EXPECT_LE(m.C.norm(), 1e-12);
}

TEST(Moments, StandardizedDiagonalIsOne) {
    RngStream rng(3);
    Matrix x = gaussian_matrix(4, 200, rng);
    x.row(2) *= 30.0;
    const auto m = accumulate_moments(x, gaussian_matrix(1, 200, rng), {true, true});
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(m.Sigma(i, i), 1.0, 1e-12);
}

TEST(Moments, MismatchedCountsAreAnError) {
    EXPECT_THROW(accumulate_moments(Matrix::Ones(2, 3), Matrix::Ones(1, 4)), InvalidArgument);
}

TEST(Ridge, IdentityCovarianceShrinks) {
    Moments m;
    m.Sigma = Matrix::Identity(3, 3);
    m.C = (Matrix(3, 1) << 1.0, -2.0, 0.5).finished();
    m.state_norm = Normalizer::identity(3);
    m.target_mean = Vector::Zero(1);
    const auto r = ridge_solve(m, 0.25);
    EXPECT_LE((r.W - m.C / 1.25).norm(), 1e-15);
}

TEST(Ridge, GradientDescentOracle) {
    RngStream rng(4);
    const Matrix x = gaussian_matrix(4, 80, rng);
    const Matrix y = gaussian_matrix(1, 80, rng);
    const auto m = accumulate_moments(x, y, kRaw);
    const double lambda = 0.1;
    const auto r = ridge_solve(m, lambda);
    Matrix w = Matrix::Zero(4, 1);
    for (int it = 0; it < 20000; ++it) w -= 0.05 * (m.Sigma * w + lambda * w - m.C);
    EXPECT_LE((w - r.W).norm(), 1e-10);
}

TEST(Ridge, ResidualAndIdentity) {
    RngStream rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix x = gaussian_matrix(20, 300, rng);
        const Matrix y = gaussian_matrix(2, 300, rng);
        const auto m = accumulate_moments(x, y, {true, trial % 2 == 0});
        const auto r = ridge_solve(m, 1e-2);
        const double scale = std::max(1.0, m.C.norm());
        ASSERT_LE(ridge_residual(m, r), 1e-10 * scale);
        ASSERT_LE(ridge_identity_check(m, r, x, y), 1e-9 * std::max(1.0, m.target_energy));
    }
}

TEST(Ridge, ZeroTargets) {
    RngStream rng(6);
    const Matrix x = gaussian_matrix(5, 40, rng);
    const auto m = accumulate_moments(x, Matrix::Zero(1, 40), kRaw);
    const auto r = ridge_solve(m, 1e-2);
    EXPECT_EQ(r.W.norm(), 0.0);
    EXPECT_EQ(r.score, 0.0);
    EXPECT_EQ(r.training_error, 0.0);
}

TEST(Ridge, PredictionAppliesNormalization) {
    RngStream rng(7);
    Matrix x = gaussian_matrix(3, 200, rng);
    x.row(0).array() += 4.0;
    const Vector w_true = (Vector(3) << 1.0, -1.0, 2.0).finished();
    const Matrix y = (w_true.transpose() * x).array() + 3.0;
    const auto m = accumulate_moments(x, y, {true, true});
    const auto r = ridge_solve(m, 1e-10);
    const Matrix pred = r.predict_columns(x);
    EXPECT_LE((pred - y).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(r.predict(x.col(7))(0), y(0, 7), 1e-6);
}

TEST(Ridge, NonPositiveLambdaIsAnError) {
    Moments m;
    m.Sigma = Matrix::Identity(2, 2);
    m.C = Matrix::Ones(2, 1);
    EXPECT_THROW(ridge_solve(m, 0.0), InvalidArgument);
    EXPECT_THROW(ridge_solve(m, -1.0), InvalidArgument);
    EXPECT_THROW(ridge_modes(m, 0.0), InvalidArgument);
}

TEST(Modes, DiagonalCase) {
    Moments m;
    m.Sigma = (Matrix(2, 2) << 2, 0, 0, 1).finished();
    m.C = (Matrix(2, 1) << 1, 1).finished();
    const auto modes = ridge_modes(m, 1.0);
    ASSERT_EQ(modes.size(), 2u);
    EXPECT_NEAR(modes[0].eigenvalue, 2.0, 1e-15);
    EXPECT_NEAR(modes[0].contribution, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(modes[1].contribution, 0.5, 1e-15);
}

TEST(Modes, ContributionsSumToScore) {
    RngStream rng(8);
    const Matrix x = gaussian_matrix(15, 100, rng);
    const Matrix y = gaussian_matrix(2, 100, rng);
    const auto m = accumulate_moments(x, y);
    const auto r = ridge_solve(m, 1e-2);
    double sum = 0.0;
    for (const auto& mode : ridge_modes(m, 1e-2)) sum += mode.contribution;
    EXPECT_NEAR(sum, r.score, 1e-10 * std::max(1.0, r.score));
}

TEST(Modes, ScoreDecreasesWithLambda) {
    RngStream rng(9);
    const auto m = accumulate_moments(gaussian_matrix(10, 60, rng), gaussian_matrix(1, 60, rng));
    double prev = ridge_solve(m, 1e-4).score;
    for (double lambda : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
        const double s = ridge_solve(m, lambda).score;
        EXPECT_LE(s, prev + 1e-14);
        prev = s;
    }
}

TEST(Modes, EntropyBounds) {
    std::vector<RidgeMode> one(4);
    one[0].contribution = 1.0;
    EXPECT_DOUBLE_EQ(mode_entropy(one), 0.0);
    std::vector<RidgeMode> flat(4);
    for (auto& m : flat) m.contribution = 0.3;
    EXPECT_NEAR(mode_entropy(flat), std::log(4.0), 1e-15);
    EXPECT_DOUBLE_EQ(mode_entropy(std::vector<RidgeMode>(3)), 0.0);
}

TEST(Modes, JsonLayout) {
    Moments m;
    m.Sigma = Matrix::Identity(2, 2);
    m.C = Matrix::Ones(2, 1);
    const auto j = ridge_modes_to_json(ridge_modes(m, 1.0), 1.0);
    EXPECT_EQ(j["eigenvalues"].size(), 2u);
    EXPECT_NEAR(j["entropy"].get<double>(), std::log(2.0), 1e-15);
}
