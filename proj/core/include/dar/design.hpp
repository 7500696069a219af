#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dar/numerics.hpp"

namespace dar {

struct DarConfig {
    double variance_threshold = 0.95;
    std::optional<Eigen::Index> fixed_d;
    std::size_t block_depth = 8;   // K
    std::size_t windows = 100;     // W
    double gamma_mix = 0.15;

    void validate() const;
};

struct SpineBasis {
    Matrix U;                 // N x d, orthonormal columns
    Vector singular_values;   // full PCA spectrum of the increment cloud
    double variance_captured = 0.0;

    [[nodiscard]] Eigen::Index dim() const { return U.cols(); }
    [[nodiscard]] Eigen::Index ambient() const { return U.rows(); }
};

/// Top principal directions of the increment cloud (columns of v, not re-centered).
SpineBasis estimate_spine(const Eigen::Ref<const Matrix>& v, const DarConfig& cfg);

/// p_n = U^T v_n, column-wise.
Matrix project_coordinates(const SpineBasis& spine, const Eigen::Ref<const Matrix>& v);

struct ProcrustesBlocks {
    Matrix current;                  // d x M
    Matrix next;                     // d x M
    std::vector<std::size_t> starts; // ascending block starts
};

/// Stacks W windows of K consecutive coordinates. Window starts are drawn
/// without replacement from the L - K + 1 valid positions.
ProcrustesBlocks build_procrustes_blocks(const Eigen::Ref<const Matrix>& p, std::size_t K, std::size_t W,
                                         RngStream& rng);

/// argmin over O(d) of ||next - R current||_F, no determinant correction.
Matrix kabsch(const Eigen::Ref<const Matrix>& current, const Eigen::Ref<const Matrix>& next);

/// U R U^T + (I - U U^T).
Matrix lift_align(const SpineBasis& spine, const Eigen::Ref<const Matrix>& R);

/// sigma_max((I - U U^T) B U).
double measure_leakage(const Eigen::Ref<const Matrix>& B, const Eigen::Ref<const Matrix>& U);

struct MixResult {
    Matrix B;
    Matrix B_rand;
    double measured_leakage = 0.0;
};

/// polar((1 - gamma) B_align + gamma Q) with Q Haar.
MixResult mix_and_polarize(const Eigen::Ref<const Matrix>& B_align, const SpineBasis& spine, double gamma_mix,
                           RngStream& rng);

/// U R U^T + U_perp R_perp U_perp^T with R_perp Haar on the complement.
Matrix block_invariant_variant(const SpineBasis& spine, const Eigen::Ref<const Matrix>& R, RngStream& rng);

struct DarResult {
    Matrix B;
    Matrix B_align;
    Matrix R_d;
    SpineBasis spine;
    double measured_leakage = 0.0;
    double gamma_mix = 0.0;
    std::size_t block_columns = 0;
};

/// Full pipeline on forcing increments v (N x T). Windows and the Haar mix use
/// the "windows" and "haar" children of `rng`.
DarResult design_connectivity(const Eigen::Ref<const Matrix>& v, const DarConfig& cfg, const RngStream& rng);

}  // namespace dar
