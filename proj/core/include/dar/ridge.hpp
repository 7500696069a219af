#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "dar/numerics.hpp"

namespace dar {

/// Affine column map x -> (x - mean) / scale.
struct Normalizer {
    Vector mean;
    Vector scale;

    [[nodiscard]] Matrix apply(const Eigen::Ref<const Matrix>& columns) const;
    [[nodiscard]] Vector apply_one(const Eigen::Ref<const Vector>& x) const;

    static Normalizer identity(Eigen::Index n);
};

/// Per-row statistics of `columns` (one sample per column). Zero-variance rows keep scale 1.
Normalizer fit_normalizer(const Eigen::Ref<const Matrix>& columns, bool center, bool standardize);

struct MomentOptions {
    bool center = true;
    bool standardize = false;
};

struct Moments {
    Matrix Sigma;  // (1/T) sum x x^T
    Matrix C;      // (1/T) sum x y^T
    std::size_t sample_count = 0;
    double target_energy = 0.0;  // (1/T) sum ||y||^2
    Normalizer state_norm;
    Vector target_mean;
};

/// States N x T and targets p x T, column n pairing x_n with y_n.
Moments accumulate_moments(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                           const MomentOptions& opts = {});

struct RidgeReadout {
    Matrix W;  // N x p
    double lambda = 0.0;
    double score = 0.0;           // G = tr(C^T (Sigma + lambda I)^-1 C)
    double training_error = 0.0;  // E = target_energy - G
    Normalizer state_norm;
    Vector target_mean;

    /// y = W^T normalise(x) + target_mean.
    [[nodiscard]] Vector predict(const Eigen::Ref<const Vector>& x) const;
    [[nodiscard]] Matrix predict_columns(const Eigen::Ref<const Matrix>& states) const;
};

RidgeReadout ridge_solve(const Moments& m, double lambda);

/// ||(Sigma + lambda I) W - C||_F.
double ridge_residual(const Moments& m, const RidgeReadout& r);

/// Penalised loss (1/T) sum ||y_n - W^T x_n||^2 + lambda ||W||_F^2 recomputed from the raw data
/// with the readout's normalisation.
double direct_training_error(const RidgeReadout& r, const Eigen::Ref<const Matrix>& states,
                             const Eigen::Ref<const Matrix>& targets);

/// |E_direct - (target_energy - G)|.
double ridge_identity_check(const Moments& m, const RidgeReadout& r, const Eigen::Ref<const Matrix>& states,
                            const Eigen::Ref<const Matrix>& targets);

struct RidgeMode {
    double eigenvalue = 0.0;
    double alignment = 0.0;     // ||q_i^T C||^2
    double contribution = 0.0;  // alignment / (eigenvalue + lambda)
};

/// One record per eigenpair of Sigma, eigenvalues descending.
std::vector<RidgeMode> ridge_modes(const Moments& m, double lambda);

/// Shannon entropy (nats) of contributions normalised to sum 1.
double mode_entropy(const std::vector<RidgeMode>& modes);

nlohmann::ordered_json ridge_modes_to_json(const std::vector<RidgeMode>& modes, double lambda);

}  // namespace dar
