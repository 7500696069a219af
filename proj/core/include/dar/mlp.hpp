#pragma once

#include <cstddef>
#include <vector>

#include "dar/numerics.hpp"
#include "dar/ridge.hpp"

namespace dar {

/// One hidden tanh layer with an affine output: W2 tanh(W1 x + b1) + b2.
struct MlpReadout {
    Matrix W1;  // H x N
    Vector b1;
    Matrix W2;  // p x H
    Vector b2;
    Normalizer input_norm;  // applied to x before W1

    [[nodiscard]] Eigen::Index hidden() const { return W1.rows(); }
    [[nodiscard]] Eigen::Index inputs() const { return W1.cols(); }
    [[nodiscard]] Eigen::Index outputs() const { return W2.rows(); }

    /// Zero parameters with identity input normalisation.
    static MlpReadout zeros(Eigen::Index n, Eigen::Index h, Eigen::Index p);
    /// Gaussian weights with std 1/sqrt(fan_in), zero biases.
    static MlpReadout random(Eigen::Index n, Eigen::Index h, Eigen::Index p, RngStream& rng);
};

/// Raw network output on an already-normalised input (no input_norm).
Vector mlp_forward_raw(const MlpReadout& m, const Eigen::Ref<const Vector>& z);
/// Output on a raw state x (input_norm applied first).
Vector mlp_forward(const MlpReadout& m, const Eigen::Ref<const Vector>& x);
Matrix mlp_forward_columns(const MlpReadout& m, const Eigen::Ref<const Matrix>& X);

struct MlpGradients {
    Matrix W1;
    Vector b1;
    Matrix W2;
    Vector b2;
};

/// Mean squared error over all outputs of a batch of normalised inputs Z (N x B)
/// against targets Y (p x B), and its analytic gradient.
double mlp_loss(const MlpReadout& m, const Eigen::Ref<const Matrix>& Z, const Eigen::Ref<const Matrix>& Y,
                MlpGradients* grad = nullptr);

struct TrainConfig {
    std::size_t hidden = 64;
    std::size_t epochs = 600;
    std::size_t batch_size = 256;
    double learning_rate = 3e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    bool standardize_inputs = true;

    void validate() const;
};

struct LossEntry {
    std::size_t epoch = 0;
    std::size_t step = 0;
    double loss = 0.0;
};

struct MlpTrainResult {
    MlpReadout model;
    std::vector<LossEntry> trace;     // one entry per minibatch step
    std::vector<double> epoch_loss;   // full-data MSE after each epoch
};

/// Minibatch Adam on MSE. Initialisation uses rng.child("init"), per-epoch shuffles rng.child("shuffle").
MlpTrainResult mlp_train(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                         const TrainConfig& cfg, const RngStream& rng);

/// Continues training from `init` (parameters and input normalisation kept).
MlpTrainResult mlp_train_from(MlpReadout init, const Eigen::Ref<const Matrix>& states,
                              const Eigen::Ref<const Matrix>& targets, const TrainConfig& cfg, const RngStream& rng);

/// Max relative error between analytic and central-difference gradients (step 1e-5)
/// over `samples` randomly chosen parameters, |a - n| / max(|a| + |n|, 1e-7).
double gradient_check(const MlpReadout& m, const Eigen::Ref<const Matrix>& Z, const Eigen::Ref<const Matrix>& Y,
                      RngStream& rng, std::size_t samples = 200);

}  // namespace dar
