#include "dar/reservoir.hpp"

#include <cmath>
#include <string>

#include "dar/error.hpp"

namespace dar {

std::string_view to_string(Activation a) { return a == Activation::linear ? "linear" : "tanh"; }

Activation activation_from_string(std::string_view name) {
    if (name == "linear") return Activation::linear;
    if (name == "tanh") return Activation::tanh;
    throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

Eigen::Index FeatureMap::output_width(Eigen::Index input_width) const {
    if (is_identity()) return input_width;
    return input_width * static_cast<Eigen::Index>(powers.size());
}

Vector FeatureMap::apply(const Eigen::Ref<const Vector>& u) const {
    if (is_identity()) return u;
    const Eigen::Index m = u.size();
    Vector out(output_width(m));
    for (std::size_t k = 0; k < powers.size(); ++k) {
        const auto off = static_cast<Eigen::Index>(k) * m;
        for (Eigen::Index i = 0; i < m; ++i) {
            out(off + i) = std::pow(u(i), powers[k]);
        }
    }
    return out;
}

void ReservoirParams::validate() const {
    const Eigen::Index n = B.rows();
    if (n < 1 || B.cols() != n) throw InvalidArgument("reservoir: B must be square and nonempty");
    if (A.rows() != n) throw InvalidArgument("reservoir: A must have N rows");
    if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("reservoir: beta must lie in [0, 1)");
    for (int p : feature_map.powers) {
        if (p < 1) throw InvalidArgument("reservoir: feature powers must be positive");
    }
    const double defect = orthogonality_defect(B);
    if (defect > 1e-8 * static_cast<double>(n)) {
        throw InvalidArgument("reservoir: B is not orthogonal (defect " + std::to_string(defect) + ")");
    }
}

Vector reservoir_step(const ReservoirParams& params, const Eigen::Ref<const Vector>& x,
                      const Eigen::Ref<const Vector>& u) {
    Vector pre = params.A * params.feature_map.apply(u);
    pre.noalias() += params.beta * (params.B * x);
    if (params.activation == Activation::tanh) {
        pre = pre.array().tanh();
    }
    return pre;
}

Matrix StateTrajectory::increments(Eigen::Index begin, Eigen::Index end) const {
    if (begin < 0 || end < begin || end > steps()) {
        throw InvalidArgument("increments: range out of bounds");
    }
    return states.middleCols(begin + 1, end - begin) - states.middleCols(begin, end - begin);
}

Matrix make_input_matrix(Eigen::Index N, Eigen::Index m, RngStream& rng, double scale) {
    if (N < 1 || m < 1) throw InvalidArgument("make_input_matrix: N and m must be at least 1");
    return gaussian_matrix(N, m, rng) * scale;
}

StateTrajectory drive(const ReservoirParams& params, const Eigen::Ref<const Matrix>& inputs,
                      const Eigen::Ref<const Vector>& x0) {
    params.validate();
    const Eigen::Index n = params.size();
    if (inputs.rows() < 1) throw InvalidArgument("drive: empty input");
    if (params.feature_map.output_width(inputs.cols()) != params.A.cols()) {
        throw InvalidArgument("drive: input width does not match A");
    }
    if (x0.size() != n) throw InvalidArgument("drive: x0 has wrong dimension");

    StateTrajectory traj;
    traj.states.resize(n, inputs.rows() + 1);
    traj.states.col(0) = x0;
    const Matrix fb = params.beta * params.B;
    Vector pre(n);
    for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
        const Vector u = inputs.row(t).transpose();
        pre.noalias() = params.A * params.feature_map.apply(u);
        pre.noalias() += fb * traj.states.col(t);
        if (params.activation == Activation::tanh) {
            traj.states.col(t + 1) = pre.array().tanh();
        } else {
            traj.states.col(t + 1) = pre;
        }
        if (!traj.states.col(t + 1).allFinite()) {
            throw DivergenceError("drive: non-finite state", static_cast<std::size_t>(t + 1));
        }
    }
    return traj;
}

StateTrajectory drive(const ReservoirParams& params, const TimeSeries& input, const Eigen::Ref<const Vector>& x0) {
    return drive(params, input.values, x0);
}

Matrix forcing_increments(const ReservoirParams& params, const Eigen::Ref<const Matrix>& inputs) {
    if (inputs.rows() < 2) throw InvalidArgument("forcing_increments: need at least two input samples");
    if (params.feature_map.output_width(inputs.cols()) != params.A.cols()) {
        throw InvalidArgument("forcing_increments: input width does not match A");
    }
    const Eigen::Index t_count = inputs.rows();
    Matrix features(params.A.cols(), t_count);
    for (Eigen::Index t = 0; t < t_count; ++t) {
        features.col(t) = params.feature_map.apply(inputs.row(t).transpose());
    }
    const Matrix diff = features.rightCols(t_count - 1) - features.leftCols(t_count - 1);
    return params.A * diff;
}

double washout_gap(const ReservoirParams& params, const Eigen::Ref<const Matrix>& inputs,
                   const Eigen::Ref<const Vector>& x0a, const Eigen::Ref<const Vector>& x0b, std::size_t steps) {
    if (steps < 1) throw InvalidArgument("washout_gap: steps must be at least 1");
    if (static_cast<std::size_t>(inputs.rows()) < steps) {
        throw InvalidArgument("washout_gap: input shorter than requested steps");
    }
    const auto s = static_cast<Eigen::Index>(steps);
    const auto a = drive(params, inputs.topRows(s), x0a);
    const auto b = drive(params, inputs.topRows(s), x0b);
    return (a.states.col(s) - b.states.col(s)).norm();
}

}  // namespace dar
