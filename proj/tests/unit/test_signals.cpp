#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "dar/error.hpp"
#include "dar/signals.hpp"

using namespace dar;

TEST(Lorenz, OriginIsAnEquilibrium) {
    const auto s = gen_lorenz({0, 0, 0}, 0.01, 500);
    EXPECT_EQ(s.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lorenz, OneStepMatchesHandStages) {
    const double dt = 0.01;
    const double sg = 10.0;
    const double rh = 28.0;
    const double bt = 8.0 / 3.0;
    // Stage by stage, written out without helpers.
    const double x = 1, y = 1, z = 1;
    const double k1x = sg * (y - x), k1y = x * (rh - z) - y, k1z = x * y - bt * z;
    const double x2 = x + 0.5 * dt * k1x, y2 = y + 0.5 * dt * k1y, z2 = z + 0.5 * dt * k1z;
    const double k2x = sg * (y2 - x2), k2y = x2 * (rh - z2) - y2, k2z = x2 * y2 - bt * z2;
    const double x3 = x + 0.5 * dt * k2x, y3 = y + 0.5 * dt * k2y, z3 = z + 0.5 * dt * k2z;
    const double k3x = sg * (y3 - x3), k3y = x3 * (rh - z3) - y3, k3z = x3 * y3 - bt * z3;
    const double x4 = x + dt * k3x, y4 = y + dt * k3y, z4 = z + dt * k3z;
    const double k4x = sg * (y4 - x4), k4y = x4 * (rh - z4) - y4, k4z = x4 * y4 - bt * z4;
    const double ex = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    const double ey = y + dt / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    const double ez = z + dt / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);

    const auto s = gen_lorenz({1, 1, 1}, dt, 2);
    EXPECT_NEAR(s.values(1, 0), ex, 1e-12);
    EXPECT_NEAR(s.values(1, 1), ey, 1e-12);
    EXPECT_NEAR(s.values(1, 2), ez, 1e-12);
}

TEST(Lorenz, ExperimentConfigurationIsFiniteAndChaotic) {
    const auto s = gen_lorenz({1, 1, 1}, 0.01, 16000);
    ASSERT_EQ(s.length(), 16000u);
    ASSERT_EQ(s.channels(), 3u);
    EXPECT_TRUE(s.values.allFinite());
    EXPECT_GT(s.values.col(0).maxCoeff(), 10.0);
    EXPECT_LT(s.values.col(0).minCoeff(), -10.0);
    EXPECT_DOUBLE_EQ(s.dt, 0.01);
}

TEST(Lorenz, FourthOrderLocalConvergence) {
    RngStream rng(21);
    const double dt = 0.05;
    std::vector<double> ratios;
    for (int i = 0; i < 100; ++i) {
        const std::array<double, 3> x0{-20 + 40 * rng.uniform(), -25 + 50 * rng.uniform(), 5 + 40 * rng.uniform()};
        auto ref = x0;
        for (int k = 0; k < 4; ++k) ref = lorenz_rk4_step(ref, dt / 4, {});
        const auto coarse = lorenz_rk4_step(x0, dt, {});
        auto half = lorenz_rk4_step(x0, dt / 2, {});
        half = lorenz_rk4_step(half, dt / 2, {});
        double e1 = 0, e2 = 0;
        for (int c = 0; c < 3; ++c) {
            e1 += (coarse[c] - ref[c]) * (coarse[c] - ref[c]);
            e2 += (half[c] - ref[c]) * (half[c] - ref[c]);
        }
        ratios.push_back(std::sqrt(e1 / e2));
    }
    std::nth_element(ratios.begin(), ratios.begin() + 50, ratios.end());
    // Local error C h^5 against a dt/4 reference gives (1 - 1/256) / (1/16 - 1/256) = 17.
    EXPECT_GT(ratios[50], 12.0);
    EXPECT_LT(ratios[50], 20.0);
}

TEST(Lorenz, RejectsBadArguments) {
    EXPECT_THROW(gen_lorenz({1, 1, 1}, 0.0, 10), InvalidArgument);
    EXPECT_THROW(gen_lorenz({1, 1, 1}, 0.01, 0), InvalidArgument);
}

TEST(MackeyGlass, LinearDecayWithoutFeedback) {
    MackeyGlassParams p;
    p.beta = 0.0;
    p.history = 1.0;
    p.discard = 0;
    const auto s = gen_mackey_glass(50, p);
    for (Eigen::Index t = 0; t < 50; ++t) {
        const double euler = std::pow(1.0 - p.alpha * p.dt_internal, 10.0 * static_cast<double>(t));
        EXPECT_NEAR(s.values(t, 0), euler, 1e-12 * std::max(1.0, euler));
        EXPECT_NEAR(s.values(t, 0), std::exp(-p.alpha * static_cast<double>(t)), 0.05 * std::exp(-p.alpha * t));
    }
}

TEST(MackeyGlass, MatchesStraightforwardEuler) {
    MackeyGlassParams p;
    p.subsample = 1;
    p.discard = 0;
    const auto s = gen_mackey_glass(101, p);

    const std::size_t lag = 170;
    std::vector<double> x{p.history};
    for (std::size_t i = 0; i < 100; ++i) {
        const double d = i >= lag ? x[i - lag] : p.history;
        const double dx = p.beta * d / (1.0 + std::pow(d, p.exponent)) - p.alpha * x[i];
        x.push_back(x[i] + p.dt_internal * dx);
    }
    for (std::size_t i = 0; i <= 100; ++i) {
        ASSERT_EQ(std::memcmp(&x[i], &s.values(static_cast<Eigen::Index>(i), 0), sizeof(double)), 0) << i;
    }
}

TEST(MackeyGlass, DelayedTermAfterWrapMatchesReference) {
    MackeyGlassParams p;
    p.subsample = 1;
    p.discard = 0;
    p.tau = 1.0;  // lag 10, so 100 steps wrap the buffer many times
    const auto s = gen_mackey_glass(101, p);
    const std::size_t lag = 10;
    std::vector<double> x{p.history};
    for (std::size_t i = 0; i < 100; ++i) {
        const double d = i >= lag ? x[i - lag] : p.history;
        const double dx = p.beta * d / (1.0 + std::pow(d, p.exponent)) - p.alpha * x[i];
        x.push_back(x[i] + p.dt_internal * dx);
    }
    for (std::size_t i = 0; i <= 100; ++i) ASSERT_EQ(x[i], s.values(static_cast<Eigen::Index>(i), 0)) << i;
}

TEST(MackeyGlass, ChaoticRegimeStaysBounded) {
    const auto s = gen_mackey_glass(5000);
    EXPECT_GT(s.values.maxCoeff(), 1.1);
    EXPECT_LT(s.values.minCoeff(), 0.6);
    EXPECT_GT(s.values.minCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(s.dt, 1.0);
}

TEST(MackeyGlass, RejectsNonIntegerDelayRatio) {
    MackeyGlassParams p;
    p.tau = 17.05;
    EXPECT_THROW(gen_mackey_glass(10, p), InvalidArgument);
}

TEST(Logistic, HalfMapsToZero) {
    const auto s = gen_logistic(0.5, 4);
    EXPECT_DOUBLE_EQ(s.values(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(s.values(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(s.values(2, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.values(3, 0), 0.0);
}

TEST(Logistic, NonzeroFixedPoint) {
    const auto s = gen_logistic(0.75, 100);
    for (Eigen::Index t = 0; t < 100; ++t) ASSERT_DOUBLE_EQ(s.values(t, 0), 0.75);
}

TEST(Logistic, StaysInUnitInterval) {
    RngStream rng(5);
    for (int k = 0; k < 5; ++k) {
        const auto s = gen_logistic(0.01 + 0.98 * rng.uniform(), 100000, 1000);
        EXPECT_GE(s.values.minCoeff(), 0.0);
        EXPECT_LE(s.values.maxCoeff(), 1.0);
    }
}

TEST(Logistic, RejectsOutOfRangeStart) {
    EXPECT_THROW(gen_logistic(0.0, 10), InvalidArgument);
    EXPECT_THROW(gen_logistic(1.0, 10), InvalidArgument);
    EXPECT_THROW(gen_logistic(-0.2, 10), InvalidArgument);
}

TEST(Center, ConstantSeries) {
    const auto s = center(make_series(Matrix::Constant(5, 1, 3.5), 1.0, SignalSource::file));
    EXPECT_EQ(s.values.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(s.offset(0), 3.5);
}

TEST(Center, SmallSequence) {
    const auto s = center(make_series((Matrix(3, 1) << 1, 2, 3).finished(), 1.0, SignalSource::file));
    EXPECT_DOUBLE_EQ(s.values(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(s.values(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.values(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(s.offset(0), 2.0);
}

TEST(Center, LorenzFirstCoordinate) {
    const auto x = gen_lorenz({1, 1, 1}, 0.01, 16000).channel(0);
    const auto c = center(x);
    EXPECT_LE(std::abs(c.values.mean()), 1e-10 * x.values.cwiseAbs().maxCoeff());
    EXPECT_LE((c.to_original_units(c.values) - x.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, UnitVarianceAndInverse) {
    const auto x = center(gen_lorenz({1, 1, 1}, 0.01, 4000).channel(0));
    const auto z = standardize(x);
    EXPECT_NEAR(std::sqrt(z.values.array().square().mean()), 1.0, 1e-12);
    EXPECT_LE((z.to_original_units(z.values) - x.to_original_units(x.values)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Split, ExperimentSplit) {
    const auto r = split(16000, {1000, 9800, 2100, 2100});
    EXPECT_EQ(r.washout, (IndexRange{0, 1000}));
    EXPECT_EQ(r.train, (IndexRange{1000, 10800}));
    EXPECT_EQ(r.validation, (IndexRange{10800, 12900}));
    EXPECT_EQ(r.test, (IndexRange{12900, 15000}));
    EXPECT_EQ(r.train.size() + r.validation.size() + r.test.size(), 14000u);
}

TEST(Split, NoWashout) {
    const auto r = split(10, {0, 5, 2, 3});
    EXPECT_EQ(r.train.begin, 0u);
    EXPECT_EQ(r.test.end, 10u);
}

TEST(Split, PartitionsWithoutGaps) {
    const SplitSpec spec{3, 7, 2, 5};
    const auto r = split(40, spec);
    EXPECT_EQ(r.washout.begin, 0u);
    EXPECT_EQ(r.washout.end, r.train.begin);
    EXPECT_EQ(r.train.end, r.validation.begin);
    EXPECT_EQ(r.validation.end, r.test.begin);
    EXPECT_EQ(r.test.end, spec.total());
}

TEST(Split, RejectsOverflow) { EXPECT_THROW(split(100, {10, 80, 10, 10}), InvalidArgument); }

TEST(Signals, DeterministicGeneration) {
    const auto a = gen_mackey_glass(300);
    const auto b = gen_mackey_glass(300);
    EXPECT_EQ(std::memcmp(a.values.data(), b.values.data(), sizeof(double) * 300), 0);
}

TEST(SeriesCsv, RoundTrip) {
    const auto s = gen_lorenz({1, 2, 3}, 0.01, 50);
    const auto path = std::filesystem::temp_directory_path() / "dar_series_roundtrip.csv";
    write_series_csv(s, path);
    const auto back = read_series_csv(path);
    ASSERT_EQ(back.length(), 50u);
    ASSERT_EQ(back.channels(), 3u);
    EXPECT_EQ(back.values, s.values);
    EXPECT_NEAR(back.dt, 0.01, 1e-15);
    std::filesystem::remove(path);
}

TEST(SeriesCsv, RejectsMissingHeader) {
    const auto path = std::filesystem::temp_directory_path() / "dar_series_bad.csv";
    {
        std::ofstream out(path);
        out << "time,value\n0,1\n";
    }
    EXPECT_THROW(read_series_csv(path), InvalidArgument);
    std::filesystem::remove(path);
}
