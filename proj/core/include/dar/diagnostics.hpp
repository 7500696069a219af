#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dar/design.hpp"
#include "dar/numerics.hpp"
#include "dar/ridge.hpp"

namespace dar {

struct ConeProfile {
    std::vector<double> angles;              // radians, NaN where the increment is zero
    std::vector<double> theta_grid_deg;      // 5, 10, ..., 85
    std::vector<double> fraction_within;     // share of valid angles <= theta
    double theta_deg = 30.0;
    double fraction_at_theta = 0.0;          // 1 - alpha
    double alpha = 1.0;
    double median_angle = 0.0;               // radians
    std::size_t missing = 0;
};

/// angle_n = atan2(||P_perp dx_n||, ||P dx_n||) for each increment column.
ConeProfile cone_profile(const Eigen::Ref<const Matrix>& increments, const SpineBasis& spine, double theta_deg = 30.0);

struct LeakageCheck {
    double leakage_norm = 0.0;   // ||P_perp C||_F
    double m_perp = 0.0;         // max_n ||P_perp x_n||
    double sigma_y = 0.0;        // sqrt(target energy)
    double leakage_bound = 0.0;  // m_perp * sigma_y
    bool pass = false;
};

/// `states` are the states exactly as they entered `moments` (after its normalisation).
LeakageCheck leakage_check(const Eigen::Ref<const Matrix>& states, const SpineBasis& spine, const Moments& moments);

struct AlignmentRecord {
    std::size_t mode = 0;
    double eigenvalue = 0.0;
    double eps = 0.0;
    double actual = 0.0;  // ||q_i^T C||
    double bound = 0.0;   // sqrt(1 - eps^2) rho - eps delta
    bool pass = true;
};

struct AlignmentCheck {
    double rho = 0.0;    // sigma_min(U^T C), 0 when d > p
    double delta = 0.0;  // ||P_perp C||_2
    bool degenerate = false;  // rho == 0
    std::vector<AlignmentRecord> records;  // modes with eigenvalue >= lambda0 and eps < 1
    std::size_t excluded = 0;              // modes with eigenvalue >= lambda0 but eps >= 1
    [[nodiscard]] bool pass() const;
};

AlignmentCheck alignment_check(const Moments& moments, const SpineBasis& spine, double lambda0);

/// trace(P_perp Sigma P_perp) / trace(P Sigma P) for Sigma = (1/T) sum x x^T of the given columns.
double variance_ratio(const Eigen::Ref<const Matrix>& states, const SpineBasis& spine);

enum class GateStatus { pass, fail, not_applicable };
std::string to_string(GateStatus s);

struct GainBound {
    double score = 0.0;
    double bound = 0.0;
    double eps = 0.0;
    std::size_t modes = 0;
    GateStatus status = GateStatus::not_applicable;
};

GainBound gain_lower_bound(const Moments& moments, const SpineBasis& spine, double lambda, double lambda0);

struct GeometryReport {
    ConeProfile cone;
    LeakageCheck leakage;
    AlignmentCheck alignment;
    GainBound gain;
    double variance_ratio = 0.0;
    double m_delta = 0.0;   // max ||dx_n||
    double min_delta = 0.0; // min ||dx_n||
    double heuristic_ratio_median = 0.0;  // median ||v_n|| / (beta ||P dx_n||), reported only
    std::vector<double> eps;              // ||P_perp q_i|| for every mode

    [[nodiscard]] bool invariants_hold() const;
};

struct DiagnoseOptions {
    double theta_deg = 30.0;
    double lambda = 1e-2;
    double lambda0 = 1e-2;
    double beta = 0.9785;
};

/// Centred (not standardised) moments are used throughout so the geometry is that of the raw states.
GeometryReport diagnose(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                        const Eigen::Ref<const Matrix>& increments, const Matrix* forcing, const SpineBasis& spine,
                        const DiagnoseOptions& opts);

nlohmann::ordered_json geometry_to_json(const GeometryReport& r, bool include_angles = false);

/// Counts of valid angles in `bins` equal bins over [0, 90] degrees.
std::vector<std::size_t> cone_histogram(const std::vector<double>& angles, std::size_t bins = 90);

/// CSV `theta_bin,count` with theta_bin the lower bin edge in degrees.
void write_cone_histogram_csv(const std::vector<std::size_t>& counts, const std::filesystem::path& path);

}  // namespace dar
