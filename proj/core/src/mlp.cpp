#include "dar/mlp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "dar/error.hpp"

namespace dar {

MlpReadout MlpReadout::zeros(Eigen::Index n, Eigen::Index h, Eigen::Index p) {
    MlpReadout m;
    m.W1 = Matrix::Zero(h, n);
    m.b1 = Vector::Zero(h);
    m.W2 = Matrix::Zero(p, h);
    m.b2 = Vector::Zero(p);
    m.input_norm = Normalizer::identity(n);
    return m;
}

MlpReadout MlpReadout::random(Eigen::Index n, Eigen::Index h, Eigen::Index p, RngStream& rng) {
    MlpReadout m = zeros(n, h, p);
    m.W1 = gaussian_matrix(h, n, rng) / std::sqrt(static_cast<double>(n));
    m.W2 = gaussian_matrix(p, h, rng) / std::sqrt(static_cast<double>(h));
    return m;
}

Vector mlp_forward_raw(const MlpReadout& m, const Eigen::Ref<const Vector>& z) {
    if (z.size() != m.inputs()) throw InvalidArgument("mlp_forward: input dimension mismatch");
    const Vector hidden = (m.W1 * z + m.b1).array().tanh();
    return m.W2 * hidden + m.b2;
}

Vector mlp_forward(const MlpReadout& m, const Eigen::Ref<const Vector>& x) {
    return mlp_forward_raw(m, m.input_norm.apply_one(x));
}

Matrix mlp_forward_columns(const MlpReadout& m, const Eigen::Ref<const Matrix>& X) {
    const Matrix Z = m.input_norm.apply(X);
    const Matrix H = ((m.W1 * Z).colwise() + m.b1).array().tanh();
    return (m.W2 * H).colwise() + m.b2;
}

double mlp_loss(const MlpReadout& m, const Eigen::Ref<const Matrix>& Z, const Eigen::Ref<const Matrix>& Y,
                MlpGradients* grad) {
    if (Z.rows() != m.inputs() || Y.rows() != m.outputs() || Z.cols() != Y.cols() || Z.cols() < 1) {
        throw InvalidArgument("mlp_loss: batch shape mismatch");
    }
    const Matrix H = ((m.W1 * Z).colwise() + m.b1).array().tanh();
    const Matrix E = ((m.W2 * H).colwise() + m.b2) - Y;
    const double count = static_cast<double>(E.size());
    const double loss = E.squaredNorm() / count;
    if (grad != nullptr) {
        const Matrix dOut = (2.0 / count) * E;
        grad->W2 = dOut * H.transpose();
        grad->b2 = dOut.rowwise().sum();
        const Matrix dPre = (m.W2.transpose() * dOut).array() * (1.0 - H.array().square());
        grad->W1 = dPre * Z.transpose();
        grad->b1 = dPre.rowwise().sum();
    }
    return loss;
}

void TrainConfig::validate() const {
    if (hidden < 1) throw InvalidArgument("mlp: hidden width must be at least 1");
    if (epochs < 1) throw InvalidArgument("mlp: epochs must be at least 1");
    if (batch_size < 1) throw InvalidArgument("mlp: batch_size must be at least 1");
    if (!(learning_rate >= 0.0)) throw InvalidArgument("mlp: learning_rate must be non-negative");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw InvalidArgument("mlp: Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw InvalidArgument("mlp: Adam epsilon must be positive");
}

namespace {

struct AdamSlot {
    Matrix m;
    Matrix v;

    explicit AdamSlot(const Matrix& like) : m(Matrix::Zero(like.rows(), like.cols())), v(m) {}

    void step(Eigen::Ref<Matrix> param, const Eigen::Ref<const Matrix>& g, const TrainConfig& cfg, double c1,
              double c2) {
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
        param.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_eps);
    }
};

}  // namespace

MlpTrainResult mlp_train_from(MlpReadout init, const Eigen::Ref<const Matrix>& states,
                              const Eigen::Ref<const Matrix>& targets, const TrainConfig& cfg, const RngStream& rng) {
    cfg.validate();
    if (states.cols() < 1 || states.cols() != targets.cols()) {
        throw InvalidArgument("mlp_train: need equal, nonzero numbers of states and targets");
    }
    if (init.inputs() != states.rows() || init.outputs() != targets.rows()) {
        throw InvalidArgument("mlp_train: model shape does not match data");
    }

    MlpTrainResult out;
    out.model = std::move(init);
    MlpReadout& m = out.model;
    const Matrix Z = m.input_norm.apply(states);

    const auto count = static_cast<std::size_t>(states.cols());
    const std::size_t batch = std::min(cfg.batch_size, count);
    std::vector<Eigen::Index> order(count);
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    RngStream shuffle_rng = rng.child("shuffle");
    AdamSlot sW1(m.W1), sb1(m.b1), sW2(m.W2), sb2(m.b2);
    double p1 = 1.0;
    double p2 = 1.0;
    std::size_t step = 0;
    MlpGradients g;
    Matrix Zb;
    Matrix Yb;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, shuffle_rng);
        for (std::size_t start = 0; start < count; start += batch) {
            const std::size_t stop = std::min(start + batch, count);
            const auto b = static_cast<Eigen::Index>(stop - start);
            Zb.resize(Z.rows(), b);
            Yb.resize(targets.rows(), b);
            for (Eigen::Index j = 0; j < b; ++j) {
                const Eigen::Index src = order[start + static_cast<std::size_t>(j)];
                Zb.col(j) = Z.col(src);
                Yb.col(j) = targets.col(src);
            }
            const double loss = mlp_loss(m, Zb, Yb, &g);
            if (!std::isfinite(loss)) {
                throw DivergenceError("mlp_train: non-finite loss in epoch " + std::to_string(epoch), step);
            }
            out.trace.push_back({epoch, step, loss});

            p1 *= cfg.adam_beta1;
            p2 *= cfg.adam_beta2;
            const double c1 = 1.0 - p1;
            const double c2 = 1.0 - p2;
            sW1.step(m.W1, g.W1, cfg, c1, c2);
            sb1.step(m.b1, g.b1, cfg, c1, c2);
            sW2.step(m.W2, g.W2, cfg, c1, c2);
            sb2.step(m.b2, g.b2, cfg, c1, c2);
            ++step;
        }
        const double full = mlp_loss(m, Z, targets);
        if (!std::isfinite(full)) {
            throw DivergenceError("mlp_train: non-finite loss in epoch " + std::to_string(epoch), step);
        }
        out.epoch_loss.push_back(full);
    }
    return out;
}

MlpTrainResult mlp_train(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                         const TrainConfig& cfg, const RngStream& rng) {
    cfg.validate();
    if (states.cols() < 1) throw InvalidArgument("mlp_train: no training pairs");
    RngStream init_rng = rng.child("init");
    MlpReadout init = MlpReadout::random(states.rows(), static_cast<Eigen::Index>(cfg.hidden), targets.rows(), init_rng);
    init.input_norm = fit_normalizer(states, cfg.standardize_inputs, cfg.standardize_inputs);
    return mlp_train_from(std::move(init), states, targets, cfg, rng);
}

double gradient_check(const MlpReadout& m, const Eigen::Ref<const Matrix>& Z, const Eigen::Ref<const Matrix>& Y,
                      RngStream& rng, std::size_t samples) {
    if (Z.cols() < 1) throw InvalidArgument("gradient_check: empty batch");
    MlpGradients g;
    mlp_loss(m, Z, Y, &g);

    MlpReadout probe = m;
    // Parameter blocks in a fixed order: W1, b1, W2, b2.
    std::array<double*, 4> data{probe.W1.data(), probe.b1.data(), probe.W2.data(), probe.b2.data()};
    std::array<const double*, 4> grads{g.W1.data(), g.b1.data(), g.W2.data(), g.b2.data()};
    std::array<std::size_t, 4> sizes{static_cast<std::size_t>(probe.W1.size()), static_cast<std::size_t>(probe.b1.size()),
                                     static_cast<std::size_t>(probe.W2.size()), static_cast<std::size_t>(probe.b2.size())};
    const std::size_t total = sizes[0] + sizes[1] + sizes[2] + sizes[3];

    constexpr double h = 1e-5;
    double worst = 0.0;
    const std::size_t n = std::min(samples, total);
    for (std::size_t s = 0; s < n; ++s) {
        std::size_t flat = n == total ? s : static_cast<std::size_t>(rng.uniform_index(total));
        std::size_t block = 0;
        while (flat >= sizes[block]) {
            flat -= sizes[block];
            ++block;
        }
        double& theta = data[block][flat];
        const double saved = theta;
        theta = saved + h;
        const double up = mlp_loss(probe, Z, Y);
        theta = saved - h;
        const double down = mlp_loss(probe, Z, Y);
        theta = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = grads[block][flat];
        const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), 1e-7);
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace dar
