#include "dar/ridge.hpp"

#include <algorithm>
#include <cmath>

#include "dar/error.hpp"

namespace dar {

Matrix Normalizer::apply(const Eigen::Ref<const Matrix>& columns) const {
    if (columns.rows() != mean.size()) throw InvalidArgument("Normalizer: dimension mismatch");
    return (columns.colwise() - mean).array().colwise() / scale.array();
}

Vector Normalizer::apply_one(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != mean.size()) throw InvalidArgument("Normalizer: dimension mismatch");
    return (x - mean).array() / scale.array();
}

Normalizer Normalizer::identity(Eigen::Index n) { return {Vector::Zero(n), Vector::Ones(n)}; }

Normalizer fit_normalizer(const Eigen::Ref<const Matrix>& columns, bool center, bool standardize) {
    if (columns.cols() < 1) throw InvalidArgument("fit_normalizer: no samples");
    Normalizer out = Normalizer::identity(columns.rows());
    const Vector mean = columns.rowwise().mean();
    if (center) out.mean = mean;
    if (standardize) {
        const double inv_t = 1.0 / static_cast<double>(columns.cols());
        for (Eigen::Index i = 0; i < columns.rows(); ++i) {
            const double sd = std::sqrt((columns.row(i).array() - mean(i)).square().sum() * inv_t);
            out.scale(i) = sd > 0.0 ? sd : 1.0;
        }
    }
    return out;
}

Moments accumulate_moments(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                           const MomentOptions& opts) {
    if (states.cols() != targets.cols()) {
        throw InvalidArgument("accumulate_moments: " + std::to_string(states.cols()) + " states but " +
                              std::to_string(targets.cols()) + " targets");
    }
    if (states.cols() < 1) throw InvalidArgument("accumulate_moments: no samples");
    require_finite(states, "accumulate_moments(states)");
    require_finite(targets, "accumulate_moments(targets)");

    Moments m;
    m.sample_count = static_cast<std::size_t>(states.cols());
    m.state_norm = fit_normalizer(states, opts.center, opts.standardize);
    m.target_mean = opts.center ? Vector(targets.rowwise().mean()) : Vector::Zero(targets.rows());

    const Matrix X = m.state_norm.apply(states);
    const Matrix Y = targets.colwise() - m.target_mean;
    const double inv_t = 1.0 / static_cast<double>(m.sample_count);
    m.Sigma = Matrix::Zero(X.rows(), X.rows());
    m.Sigma.selfadjointView<Eigen::Lower>().rankUpdate(X, inv_t);
    m.Sigma = m.Sigma.selfadjointView<Eigen::Lower>();
    m.C = X * Y.transpose() * inv_t;
    m.target_energy = Y.squaredNorm() * inv_t;
    return m;
}

Vector RidgeReadout::predict(const Eigen::Ref<const Vector>& x) const {
    return W.transpose() * state_norm.apply_one(x) + target_mean;
}

Matrix RidgeReadout::predict_columns(const Eigen::Ref<const Matrix>& states) const {
    return (W.transpose() * state_norm.apply(states)).colwise() + target_mean;
}

RidgeReadout ridge_solve(const Moments& m, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("ridge_solve: lambda must be positive");
    RidgeReadout r;
    r.lambda = lambda;
    Matrix shifted = m.Sigma;
    shifted.diagonal().array() += lambda;
    r.W = solve_spd(shifted, m.C);
    r.score = (m.C.transpose() * r.W).trace();
    r.training_error = m.target_energy - r.score;
    r.state_norm = m.state_norm;
    r.target_mean = m.target_mean;
    return r;
}

double ridge_residual(const Moments& m, const RidgeReadout& r) {
    Matrix lhs = m.Sigma * r.W + r.lambda * r.W;
    return (lhs - m.C).norm();
}

double direct_training_error(const RidgeReadout& r, const Eigen::Ref<const Matrix>& states,
                             const Eigen::Ref<const Matrix>& targets) {
    if (states.cols() != targets.cols() || states.cols() < 1) {
        throw InvalidArgument("direct_training_error: mismatched or empty data");
    }
    const Matrix X = r.state_norm.apply(states);
    const Matrix Y = targets.colwise() - r.target_mean;
    const Matrix residual = Y - r.W.transpose() * X;
    return residual.squaredNorm() / static_cast<double>(states.cols()) + r.lambda * r.W.squaredNorm();
}

double ridge_identity_check(const Moments& m, const RidgeReadout& r, const Eigen::Ref<const Matrix>& states,
                            const Eigen::Ref<const Matrix>& targets) {
    return std::abs(direct_training_error(r, states, targets) - (m.target_energy - r.score));
}

std::vector<RidgeMode> ridge_modes(const Moments& m, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("ridge_modes: lambda must be positive");
    const EigenDecomposition e = sym_eig(m.Sigma);
    const Matrix proj = e.vectors.transpose() * m.C;
    std::vector<RidgeMode> out(static_cast<std::size_t>(e.values.size()));
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        auto& mode = out[static_cast<std::size_t>(i)];
        mode.eigenvalue = e.values(i);
        mode.alignment = proj.row(i).squaredNorm();
        mode.contribution = mode.alignment / (mode.eigenvalue + lambda);
    }
    return out;
}

double mode_entropy(const std::vector<RidgeMode>& modes) {
    double total = 0.0;
    for (const auto& m : modes) total += std::max(m.contribution, 0.0);
    if (!(total > 0.0)) return 0.0;
    double h = 0.0;
    for (const auto& m : modes) {
        const double w = std::max(m.contribution, 0.0) / total;
        if (w > 0.0) h -= w * std::log(w);
    }
    return h;
}

nlohmann::ordered_json ridge_modes_to_json(const std::vector<RidgeMode>& modes, double lambda) {
    nlohmann::ordered_json j;
    j["lambda"] = lambda;
    auto ev = nlohmann::ordered_json::array();
    auto al = nlohmann::ordered_json::array();
    auto co = nlohmann::ordered_json::array();
    for (const auto& m : modes) {
        ev.push_back(m.eigenvalue);
        al.push_back(m.alignment);
        co.push_back(m.contribution);
    }
    j["eigenvalues"] = std::move(ev);
    j["alignments"] = std::move(al);
    j["contributions"] = std::move(co);
    j["entropy"] = mode_entropy(modes);
    return j;
}

}  // namespace dar
