#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "dar/numerics.hpp"
#include "dar/reservoir.hpp"

namespace dar {

/// Maps a reservoir state to the next input, in the units the reservoir was driven with.
using ReadoutFn = std::function<Vector(const Vector&)>;

/// original = value * scale + offset, channel-wise.
struct SignalTransform {
    Vector offset;
    Vector scale;

    static SignalTransform identity(Eigen::Index channels);
};

struct RolloutOptions {
    /// |u| above this (reservoir units) counts as divergence. Non-positive disables the check.
    double divergence_threshold = 0.0;
};

struct RolloutResult {
    Matrix predicted;  // horizon x p, original units
    bool diverged = false;
    std::size_t diverged_step = 0;
};

/// Closed loop from the last teacher-forced state: u_k = readout(x_k), x_{k+1} = step(x_k, u_k).
/// After divergence the remaining predictions hold the clamped value.
RolloutResult rollout(const ReservoirParams& params, const ReadoutFn& readout, const Eigen::Ref<const Vector>& x_init,
                      std::size_t horizon, const SignalTransform& transform, const RolloutOptions& opts = {});

/// Unnormalised MSE over the first h rows, for each h.
std::map<std::size_t, double> horizon_mse(const Eigen::Ref<const Matrix>& predicted, const Eigen::Ref<const Matrix>& truth,
                                          const std::vector<std::size_t>& horizons);

/// Rows (u_t, u_{t-delay}, ..., u_{t-(dim-1)delay}) of a scalar series, t from (dim-1)delay.
Matrix delay_embed(const Eigen::Ref<const Vector>& series, std::size_t dim, std::size_t delay);

/// Symmetric Hausdorff distance between point clouds (one point per row).
/// A uniform grid index serves dimensions 1 to 3; higher dimensions fall back to the exhaustive scan.
double hausdorff(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);

/// Exhaustive O(n m) reference.
double hausdorff_brute(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);

}  // namespace dar
