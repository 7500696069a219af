#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "dar/error.hpp"
#include "dar/reservoir.hpp"

using namespace dar;

namespace {

ReservoirParams make_params(Eigen::Index n, double beta, Activation act, std::uint64_t seed, double scale = 1.0) {
    RngStream rng(seed);
    ReservoirParams p;
    p.A = make_input_matrix(n, 1, rng, scale);
    p.B = haar_orthogonal(n, rng);
    p.beta = beta;
    p.activation = act;
    return p;
}

Matrix random_inputs(Eigen::Index t, std::uint64_t seed) {
    RngStream rng(seed);
    return gaussian_matrix(t, 1, rng);
}

}  // namespace

TEST(InputMatrix, ZeroScale) {
    RngStream rng(1);
    EXPECT_EQ(make_input_matrix(10, 2, rng, 0.0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(InputMatrix, ExperimentShape) {
    RngStream rng(2);
    const Matrix A = make_input_matrix(100, 1, rng, 1.0);
    EXPECT_EQ(A.rows(), 100);
    EXPECT_EQ(A.cols(), 1);
}

TEST(InputMatrix, EntryVarianceMatchesScale) {
    RngStream rng(3);
    const double scale = 2.0;
    const Matrix A = make_input_matrix(10000, 1, rng, scale);
    const double var = (A.array() - A.mean()).square().mean();
    EXPECT_NEAR(var, scale * scale, 0.05 * scale * scale);
}

TEST(Drive, NoFeedbackLinear) {
    auto p = make_params(6, 0.5, Activation::linear, 4);
    p.beta = 0.0;
    const Matrix u = random_inputs(20, 5);
    const auto traj = drive(p, u, Vector::Zero(6));
    for (Eigen::Index n = 0; n < 20; ++n) {
        EXPECT_LE((traj.states.col(n + 1) - p.A * u(n, 0)).norm(), 1e-15);
    }
}

TEST(Drive, ZeroInputTanhStaysAtZero) {
    const auto p = make_params(8, 0.9785, Activation::tanh, 6);
    const auto traj = drive(p, Matrix::Zero(50, 1), Vector::Zero(8));
    EXPECT_EQ(traj.states.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Drive, LinearConstantInputReachesFixedPoint) {
    const Eigen::Index n = 12;
    const auto p = make_params(n, 0.9, Activation::linear, 7);
    const double c = 0.7;
    const auto traj = drive(p, Matrix::Constant(600, 1, c), Vector::Zero(n));
    // (I - beta B) x = A c, solved through the SPD normal equations.
    const Matrix M = Matrix::Identity(n, n) - p.beta * p.B;
    const Vector fixed = solve_spd(M.transpose() * M, M.transpose() * (p.A * c));
    EXPECT_LE((traj.states.col(600) - fixed).norm(), 1e-8);
}

TEST(Drive, TanhStatesInOpenUnitInterval) {
    const auto p = make_params(30, 0.9785, Activation::tanh, 8);
    const auto traj = drive(p, random_inputs(500, 9), Vector::Zero(30));
    EXPECT_LT(traj.states.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Drive, IsDeterministic) {
    const auto p = make_params(20, 0.9785, Activation::tanh, 10);
    const Matrix u = random_inputs(200, 11);
    const auto a = drive(p, u, Vector::Zero(20));
    const auto b = drive(p, u, Vector::Zero(20));
    EXPECT_EQ(std::memcmp(a.states.data(), b.states.data(), sizeof(double) * static_cast<std::size_t>(a.states.size())), 0);
}

TEST(Drive, IncrementsAreConsecutiveDifferences) {
    const auto p = make_params(5, 0.8, Activation::tanh, 12);
    const auto traj = drive(p, random_inputs(30, 13), Vector::Zero(5));
    const Matrix inc = traj.increments();
    ASSERT_EQ(inc.cols(), traj.states.cols() - 1);
    EXPECT_EQ(inc.col(7), traj.states.col(8) - traj.states.col(7));
}

TEST(Drive, RejectsBadParameters) {
    auto p = make_params(4, 0.5, Activation::linear, 14);
    p.beta = 1.0;
    EXPECT_THROW(drive(p, random_inputs(5, 1), Vector::Zero(4)), InvalidArgument);
    p.beta = 0.5;
    p.B(0, 0) += 0.1;
    EXPECT_THROW(drive(p, random_inputs(5, 1), Vector::Zero(4)), InvalidArgument);
}

TEST(Drive, PolynomialFeatures) {
    RngStream rng(15);
    ReservoirParams p;
    p.feature_map.powers = {1, 2};
    p.A = make_input_matrix(4, 2, rng, 1.0);
    p.B = haar_orthogonal(4, rng);
    p.beta = 0.5;
    p.activation = Activation::linear;
    const Matrix u = (Matrix(1, 1) << 3.0).finished();
    const auto traj = drive(p, u, Vector::Zero(4));
    EXPECT_LE((traj.states.col(1) - (p.A.col(0) * 3.0 + p.A.col(1) * 9.0)).norm(), 1e-14);
}

TEST(ForcingIncrements, ConstantInputGivesZero) {
    const auto p = make_params(10, 0.9, Activation::tanh, 16);
    EXPECT_EQ(forcing_increments(p, Matrix::Constant(20, 1, 0.3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ForcingIncrements, ScalarInputScalesTheColumn) {
    const auto p = make_params(10, 0.9, Activation::tanh, 17);
    const Matrix u = random_inputs(25, 18);
    const Matrix v = forcing_increments(p, u);
    ASSERT_EQ(v.cols(), 24);
    for (Eigen::Index n = 0; n < 24; ++n) {
        EXPECT_LE((v.col(n) - (u(n + 1, 0) - u(n, 0)) * p.A.col(0)).norm(), 1e-14);
    }
}

TEST(ForcingIncrements, LorenzIncrementsAreRankOne) {
    const auto p = make_params(100, 0.9785, Activation::tanh, 19);
    const auto lorenz = gen_lorenz({1, 1, 1}, 0.01, 3000).channel(0);
    const Matrix v = forcing_increments(p, lorenz.values);
    const Vector s = singular_values(v);
    EXPECT_LE(s(1), 1e-12 * s(0));
}

TEST(WashoutGap, IdenticalStartsGiveZero) {
    const auto p = make_params(10, 0.9785, Activation::tanh, 20);
    const Vector x0 = Vector::Constant(10, 0.1);
    EXPECT_EQ(washout_gap(p, random_inputs(100, 21), x0, x0, 100), 0.0);
}

TEST(WashoutGap, TanhContractsAfterThousandSteps) {
    const Eigen::Index n = 50;
    const auto p = make_params(n, 0.9785, Activation::tanh, 22);
    RngStream rng(23);
    Vector a = gaussian_matrix(n, 1, rng);
    Vector b = gaussian_matrix(n, 1, rng);
    a /= a.norm();
    b /= b.norm();
    const double gap = washout_gap(p, random_inputs(1000, 24), a, b, 1000);
    EXPECT_LE(gap, 1e-8);
    EXPECT_LE(gap, std::pow(p.beta, 1000) * (a - b).norm() + 1e-15);
}

TEST(WashoutGap, LinearContractionIsExact) {
    const Eigen::Index n = 8;
    const auto p = make_params(n, 0.5, Activation::linear, 25);
    RngStream rng(26);
    const Vector a = gaussian_matrix(n, 1, rng);
    const Vector b = gaussian_matrix(n, 1, rng);
    const double gap = washout_gap(p, random_inputs(20, 27), a, b, 20);
    const double expected = std::pow(0.5, 20) * (a - b).norm();
    EXPECT_NEAR(gap, expected, 1e-9 * expected);
}

TEST(WashoutGap, GeometricBoundAtEveryStep) {
    const Eigen::Index n = 20;
    const auto p = make_params(n, 0.9, Activation::tanh, 28);
    RngStream rng(29);
    const Vector a = gaussian_matrix(n, 1, rng);
    const Vector b = gaussian_matrix(n, 1, rng);
    const Matrix u = random_inputs(200, 30);
    const auto ta = drive(p, u, a);
    const auto tb = drive(p, u, b);
    const double g0 = (a - b).norm();
    for (Eigen::Index k = 1; k <= 200; ++k) {
        ASSERT_LE((ta.states.col(k) - tb.states.col(k)).norm(), std::pow(p.beta, k) * g0 * (1 + 1e-12) + 1e-15) << k;
    }
}
