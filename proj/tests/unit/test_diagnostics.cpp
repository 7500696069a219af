#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "dar/diagnostics.hpp"
#include "dar/error.hpp"

using namespace dar;

namespace {

SpineBasis axis_spine(Eigen::Index n, Eigen::Index d) {
    SpineBasis s;
    s.U = Matrix::Identity(n, d);
    return s;
}

}  // namespace

TEST(Cone, ElementaryAngles) {
    const auto s = axis_spine(3, 1);
    Matrix inc(3, 4);
    inc.col(0) << 2, 0, 0;
    inc.col(1) << 0, 1, 0;
    inc.col(2) << 1, 0, 1;
    inc.col(3) << 0, 0, 0;
    const auto c = cone_profile(inc, s);
    EXPECT_NEAR(c.angles[0], 0.0, 1e-15);
    EXPECT_NEAR(c.angles[1], std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(c.angles[2], std::numbers::pi / 4, 1e-15);
    EXPECT_TRUE(std::isnan(c.angles[3]));
    EXPECT_EQ(c.missing, 1u);
    EXPECT_NEAR(c.fraction_at_theta, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.alpha, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.median_angle, std::numbers::pi / 4, 1e-15);
}

TEST(Cone, FractionGridIsMonotone) {
    RngStream rng(1);
    const auto c = cone_profile(gaussian_matrix(10, 200, rng), axis_spine(10, 2));
    ASSERT_EQ(c.theta_grid_deg.size(), 17u);
    for (std::size_t k = 1; k < c.fraction_within.size(); ++k) EXPECT_GE(c.fraction_within[k], c.fraction_within[k - 1]);
}

TEST(Cone, HistogramBins) {
    const std::vector<double> angles{0.0, std::numbers::pi / 4, std::numbers::pi / 2, std::nan("")};
    const auto h = cone_histogram(angles);
    ASSERT_EQ(h.size(), 90u);
    EXPECT_EQ(h[0], 1u);
    EXPECT_EQ(h[45], 1u);
    EXPECT_EQ(h[89], 1u);
    std::size_t total = 0;
    for (auto c : h) total += c;
    EXPECT_EQ(total, 3u);
    const auto path = std::filesystem::temp_directory_path() / "dar_cone_hist.csv";
    write_cone_histogram_csv(h, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "theta_bin,count");
    std::getline(in, line);
    EXPECT_EQ(line, "0,1");
    std::filesystem::remove(path);
}

TEST(Leakage, StatesOnTheSpineHaveNoLeakage) {
    RngStream rng(2);
    Matrix x = Matrix::Zero(5, 100);
    x.topRows(2) = gaussian_matrix(2, 100, rng);
    const auto m = accumulate_moments(x, gaussian_matrix(1, 100, rng));
    const auto c = leakage_check(m.state_norm.apply(x), axis_spine(5, 2), m);
    EXPECT_LE(c.leakage_norm, 1e-15);
    EXPECT_EQ(c.m_perp, 0.0);
    EXPECT_TRUE(c.pass);
}

TEST(Leakage, BoundHoldsOnRandomData) {
    RngStream rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix x = gaussian_matrix(8, 60, rng);
        const Matrix y = gaussian_matrix(2, 60, rng);
        const auto m = accumulate_moments(x, y);
        const auto c = leakage_check(m.state_norm.apply(x), axis_spine(8, 3), m);
        ASSERT_TRUE(c.pass) << c.leakage_norm << " > " << c.leakage_bound;
    }
}

TEST(Leakage, ColinearTargetOracle) {
    // y_n = x_n[1] with a spine on axis 0: P_perp C = (0, E[x1^2], 0)^T.
    Matrix x(3, 2);
    x << 1, -1, 2, -2, 0, 0;
    const Matrix y = x.row(1);
    const auto m = accumulate_moments(x, y, {false, false});
    const auto c = leakage_check(x, axis_spine(3, 1), m);
    EXPECT_NEAR(c.leakage_norm, 4.0, 1e-15);
    EXPECT_NEAR(c.m_perp, 2.0, 1e-15);
    EXPECT_NEAR(c.sigma_y, 2.0, 1e-15);
    EXPECT_TRUE(c.pass);
}

TEST(Alignment, ExactSpineAlignmentPasses) {
    RngStream rng(4);
    Matrix x = Matrix::Zero(4, 200);
    x.row(0) = 3.0 * gaussian_matrix(1, 200, rng);
    x.bottomRows(3) = 0.05 * gaussian_matrix(3, 200, rng);
    const Matrix y = x.row(0);
    const auto m = accumulate_moments(x, y);
    const auto a = alignment_check(m, axis_spine(4, 1), 1e-2);
    EXPECT_GT(a.rho, 0.0);
    EXPECT_FALSE(a.degenerate);
    ASSERT_FALSE(a.records.empty());
    EXPECT_TRUE(a.pass());
}

TEST(Alignment, SpineWiderThanTargetsIsDegenerate) {
    RngStream rng(5);
    const Matrix x = gaussian_matrix(4, 50, rng);
    const auto m = accumulate_moments(x, gaussian_matrix(1, 50, rng));
    const auto a = alignment_check(m, axis_spine(4, 2), 1e-2);
    EXPECT_EQ(a.rho, 0.0);
    EXPECT_TRUE(a.degenerate);
}

TEST(Alignment, BoundHoldsOnRandomData) {
    RngStream rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix x = gaussian_matrix(6, 80, rng);
        const auto m = accumulate_moments(x, gaussian_matrix(1, 80, rng));
        SpineBasis s;
        s.U = haar_orthogonal(6, rng).leftCols(1);
        ASSERT_TRUE(alignment_check(m, s, 1e-2).pass());
    }
}

TEST(VarianceRatio, Elementary) {
    Matrix on(3, 2);
    on << 1, -1, 0, 0, 0, 0;
    EXPECT_EQ(variance_ratio(on, axis_spine(3, 1)), 0.0);
    Matrix equal(2, 2);
    equal << 1, 0, 0, 1;
    EXPECT_DOUBLE_EQ(variance_ratio(equal, axis_spine(2, 1)), 1.0);
    Matrix thin(3, 3);
    thin << 3, -3, 0, 1, 0, -1, 0, 1, 1;
    EXPECT_LE(variance_ratio(thin, axis_spine(3, 1)), 1.0 / 3.0);
    EXPECT_THROW(variance_ratio(Matrix::Zero(3, 2), axis_spine(3, 1)), NumericalError);
}

TEST(Gain, PassOnAlignedData) {
    RngStream rng(7);
    Matrix x = Matrix::Zero(3, 300);
    x.row(0) = gaussian_matrix(1, 300, rng);
    const auto m = accumulate_moments(x, x.row(0));
    const auto g = gain_lower_bound(m, axis_spine(3, 1), 1e-2, 1e-2);
    EXPECT_EQ(g.status, GateStatus::pass);
    EXPECT_NEAR(g.eps, 0.0, 1e-12);
    EXPECT_EQ(g.modes, 1u);
    EXPECT_GE(g.score, g.bound - 1e-10);
}

TEST(Gain, NotApplicableWhenMisaligned) {
    RngStream rng(8);
    Matrix x = Matrix::Zero(3, 300);
    x.row(1) = gaussian_matrix(1, 300, rng);
    x.row(0) = 1e-3 * gaussian_matrix(1, 300, rng);
    const auto m = accumulate_moments(x, x.row(1));
    const auto g = gain_lower_bound(m, axis_spine(3, 1), 1e-2, 1e-2);
    EXPECT_EQ(g.status, GateStatus::not_applicable);
    EXPECT_EQ(to_string(g.status), "not-applicable");
}

TEST(Diagnose, ReportAndJson) {
    RngStream rng(9);
    const Matrix x = gaussian_matrix(6, 120, rng);
    const Matrix y = gaussian_matrix(1, 120, rng);
    const Matrix inc = gaussian_matrix(6, 119, rng);
    const auto r = diagnose(x, y, inc, &inc, axis_spine(6, 1), {});
    EXPECT_TRUE(r.leakage.pass);
    EXPECT_EQ(r.eps.size(), 6u);
    EXPECT_GT(r.heuristic_ratio_median, 0.0);
    const auto j = geometry_to_json(r);
    EXPECT_TRUE(j.contains("cone"));
    EXPECT_TRUE(j["leakage"]["pass"].get<bool>());
    EXPECT_FALSE(j["cone"].contains("angles_rad"));
    EXPECT_TRUE(geometry_to_json(r, true)["cone"].contains("angles_rad"));
}
