#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dar/numerics.hpp"
#include "dar/signals.hpp"

namespace dar {

enum class Activation { linear, tanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Componentwise polynomial features. An empty power list is the identity map;
/// otherwise phi(u) stacks u^k for every listed k, channel-major within each power.
struct FeatureMap {
    std::vector<int> powers;

    [[nodiscard]] bool is_identity() const { return powers.empty() || (powers.size() == 1 && powers[0] == 1); }
    [[nodiscard]] Eigen::Index output_width(Eigen::Index input_width) const;
    [[nodiscard]] Vector apply(const Eigen::Ref<const Vector>& u) const;
};

struct ReservoirParams {
    Matrix A;  // N x width(phi(u))
    Matrix B;  // N x N orthogonal
    double beta = 0.9785;
    Activation activation = Activation::tanh;
    FeatureMap feature_map;

    [[nodiscard]] Eigen::Index size() const { return B.rows(); }

    /// Checks shapes, 0 <= beta < 1 and orthogonality of B to 1e-8 N.
    void validate() const;
};

/// x_{n+1} = act(A phi(u) + beta B x).
Vector reservoir_step(const ReservoirParams& params, const Eigen::Ref<const Vector>& x,
                      const Eigen::Ref<const Vector>& u);

/// States x_0..x_T of a teacher-forced run. Column n+1 was produced from input row n.
struct StateTrajectory {
    Matrix states;  // N x (T+1)

    [[nodiscard]] Eigen::Index steps() const { return states.cols() - 1; }
    /// Delta x_n = x_{n+1} - x_n over columns [begin, end) of the increment sequence.
    [[nodiscard]] Matrix increments(Eigen::Index begin, Eigen::Index end) const;
    [[nodiscard]] Matrix increments() const { return increments(0, steps()); }
};

/// N x m matrix of i.i.d. N(0, scale^2) entries.
Matrix make_input_matrix(Eigen::Index N, Eigen::Index m, RngStream& rng, double scale);

/// Teacher-forced run over the rows of `inputs` (T x m) from x0.
StateTrajectory drive(const ReservoirParams& params, const Eigen::Ref<const Matrix>& inputs,
                      const Eigen::Ref<const Vector>& x0);
StateTrajectory drive(const ReservoirParams& params, const TimeSeries& input, const Eigen::Ref<const Vector>& x0);

/// v_n = A (phi(u_{n+1}) - phi(u_n)) as columns, n = 0..T-2.
Matrix forcing_increments(const ReservoirParams& params, const Eigen::Ref<const Matrix>& inputs);

/// ||x_steps(x0a) - x_steps(x0b)|| under the first `steps` rows of `inputs`.
double washout_gap(const ReservoirParams& params, const Eigen::Ref<const Matrix>& inputs,
                   const Eigen::Ref<const Vector>& x0a, const Eigen::Ref<const Vector>& x0b, std::size_t steps);

}  // namespace dar
