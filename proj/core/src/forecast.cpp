#include "dar/forecast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dar/error.hpp"

namespace dar {

SignalTransform SignalTransform::identity(Eigen::Index channels) {
    return {Vector::Zero(channels), Vector::Ones(channels)};
}

RolloutResult rollout(const ReservoirParams& params, const ReadoutFn& readout, const Eigen::Ref<const Vector>& x_init,
                      std::size_t horizon, const SignalTransform& transform, const RolloutOptions& opts) {
    const Eigen::Index p = transform.offset.size();
    if (transform.scale.size() != p) throw InvalidArgument("rollout: transform offset/scale size mismatch");
    if (x_init.size() != params.size()) throw InvalidArgument("rollout: x_init has wrong dimension");

    RolloutResult out;
    out.predicted.resize(static_cast<Eigen::Index>(horizon), p);
    if (horizon == 0) return out;

    const double limit = opts.divergence_threshold;
    Vector x = x_init;
    Vector u(p);
    for (std::size_t k = 0; k < horizon; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        if (!out.diverged) {
            u = readout(x);
            if (u.size() != p) throw InvalidArgument("rollout: readout returned the wrong width");
            const bool bad = !u.allFinite() || (limit > 0.0 && u.cwiseAbs().maxCoeff() > limit);
            if (bad) {
                out.diverged = true;
                out.diverged_step = k;
                const double cap = limit > 0.0 ? limit : std::numeric_limits<double>::max();
                for (Eigen::Index i = 0; i < p; ++i) {
                    u(i) = std::isnan(u(i)) ? cap : std::clamp(u(i), -cap, cap);
                }
            } else {
                x = reservoir_step(params, x, u);
                if (!x.allFinite()) {
                    out.diverged = true;
                    out.diverged_step = k + 1;
                }
            }
        }
        out.predicted.row(row) = (u.array() * transform.scale.array() + transform.offset.array()).transpose();
    }
    return out;
}

std::map<std::size_t, double> horizon_mse(const Eigen::Ref<const Matrix>& predicted, const Eigen::Ref<const Matrix>& truth,
                                          const std::vector<std::size_t>& horizons) {
    if (predicted.cols() != truth.cols()) throw InvalidArgument("horizon_mse: channel mismatch");
    std::map<std::size_t, double> out;
    for (std::size_t h : horizons) {
        if (h == 0) throw InvalidArgument("horizon_mse: horizon must be positive");
        const auto hi = static_cast<Eigen::Index>(h);
        if (hi > truth.rows() || hi > predicted.rows()) {
            throw InvalidArgument("horizon_mse: horizon " + std::to_string(h) + " exceeds available data");
        }
        double sum = 0.0;
        for (Eigen::Index t = 0; t < hi; ++t) {
            for (Eigen::Index c = 0; c < truth.cols(); ++c) {
                const double e = predicted(t, c) - truth(t, c);
                sum += e * e;
            }
        }
        out[h] = sum / static_cast<double>(hi * truth.cols());
    }
    return out;
}

Matrix delay_embed(const Eigen::Ref<const Vector>& series, std::size_t dim, std::size_t delay) {
    if (dim < 1) throw InvalidArgument("delay_embed: dim must be at least 1");
    if (dim > 1 && delay < 1) throw InvalidArgument("delay_embed: delay must be at least 1");
    const std::size_t span = (dim - 1) * delay;
    const auto len = static_cast<std::size_t>(series.size());
    if (len <= span) throw InvalidArgument("delay_embed: series too short for the embedding");
    const auto rows = static_cast<Eigen::Index>(len - span);
    Matrix out(rows, static_cast<Eigen::Index>(dim));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<Eigen::Index>(span) + r;
        for (std::size_t k = 0; k < dim; ++k) {
            out(r, static_cast<Eigen::Index>(k)) = series(t - static_cast<Eigen::Index>(k * delay));
        }
    }
    return out;
}

namespace {

double point_distance(const Eigen::Ref<const Matrix>& a, Eigen::Index i, const Eigen::Ref<const Matrix>& b,
                      Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double d = a(i, c) - b(j, c);
        s += d * d;
    }
    return std::sqrt(s);
}

double directed_brute(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            best = std::min(best, point_distance(a, i, b, j));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// Uniform grid over the bounding box of a cloud, bucketed by counting sort.
class GridIndex {
public:
    explicit GridIndex(const Eigen::Ref<const Matrix>& pts) : pts_(pts), dim_(static_cast<int>(pts.cols())) {
        const auto n = static_cast<double>(pts.rows());
        double volume = 1.0;
        int spread_axes = 0;
        for (int k = 0; k < dim_; ++k) {
            lo_[k] = pts.col(k).minCoeff();
            const double extent = pts.col(k).maxCoeff() - lo_[k];
            if (extent > 0.0) {
                volume *= extent;
                ++spread_axes;
            }
        }
        cell_ = spread_axes > 0 ? std::pow(volume / n, 1.0 / spread_axes) : 1.0;
        if (!(cell_ > 0.0) || !std::isfinite(cell_)) cell_ = 1.0;
        std::size_t total = 1;
        for (int k = 0; k < dim_; ++k) {
            const double extent = pts.col(k).maxCoeff() - lo_[k];
            counts_[k] = std::max<long>(1, static_cast<long>(std::floor(extent / cell_)) + 1);
            total *= static_cast<std::size_t>(counts_[k]);
        }
        for (int k = dim_; k < 3; ++k) counts_[k] = 1;

        start_.assign(total + 1, 0);
        std::vector<std::size_t> cell_of(static_cast<std::size_t>(pts.rows()));
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            std::array<long, 3> c{};
            for (int k = 0; k < dim_; ++k) c[k] = clamp_axis(k, pts(i, k));
            cell_of[static_cast<std::size_t>(i)] = flatten(c);
            ++start_[cell_of[static_cast<std::size_t>(i)] + 1];
        }
        for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
        items_.resize(static_cast<std::size_t>(pts.rows()));
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            items_[fill[cell_of[static_cast<std::size_t>(i)]]++] = i;
        }
    }

    // Distance from row i of q to its nearest point in the indexed cloud.
    double nearest(const Eigen::Ref<const Matrix>& q, Eigen::Index i) const {
        std::array<long, 3> home{};
        for (int k = 0; k < dim_; ++k) home[k] = clamp_axis(k, q(i, k));
        double best = std::numeric_limits<double>::infinity();
        for (long r = 0;; ++r) {
            visit_shell(home, r, [&](std::size_t cell) {
                for (std::size_t s = start_[cell]; s < start_[cell + 1]; ++s) {
                    best = std::min(best, point_distance(q, i, pts_, items_[s]));
                }
            });
            // Every unvisited cell lies beyond a face of the visited box that is not on the grid boundary.
            double bound = std::numeric_limits<double>::infinity();
            bool open = false;
            for (int k = 0; k < dim_; ++k) {
                if (home[k] - r > 0) {
                    open = true;
                    bound = std::min(bound, q(i, k) - (lo_[k] + static_cast<double>(home[k] - r) * cell_));
                }
                if (home[k] + r < counts_[k] - 1) {
                    open = true;
                    bound = std::min(bound, (lo_[k] + static_cast<double>(home[k] + r + 1) * cell_) - q(i, k));
                }
            }
            if (!open || best <= bound) return best;
        }
    }

private:
    long clamp_axis(int k, double v) const {
        const double c = std::floor((v - lo_[k]) / cell_);
        if (!(c >= 0.0)) return 0;
        return std::min(static_cast<long>(c), counts_[k] - 1);
    }

    std::size_t flatten(const std::array<long, 3>& c) const {
        return static_cast<std::size_t>((c[2] * counts_[1] + c[1]) * counts_[0] + c[0]);
    }

    // Cells at Chebyshev distance exactly r from home, clipped to the grid.
    template <typename F>
    void visit_shell(const std::array<long, 3>& home, long r, F&& f) const {
        std::array<long, 3> lo{};
        std::array<long, 3> hi{};
        for (int k = 0; k < 3; ++k) {
            const long rk = k < dim_ ? r : 0;
            lo[k] = std::max(0L, home[k] - rk);
            hi[k] = std::min(counts_[k] - 1, home[k] + rk);
        }
        for (long z = lo[2]; z <= hi[2]; ++z) {
            for (long y = lo[1]; y <= hi[1]; ++y) {
                for (long x = lo[0]; x <= hi[0]; ++x) {
                    const long cheb = std::max({std::abs(x - home[0]), std::abs(y - home[1]), std::abs(z - home[2])});
                    if (cheb == r) f(flatten({x, y, z}));
                }
            }
        }
    }

    Eigen::Ref<const Matrix> pts_;
    int dim_;
    std::array<double, 3> lo_{};
    std::array<long, 3> counts_{};
    double cell_ = 1.0;
    std::vector<std::size_t> start_;
    std::vector<Eigen::Index> items_;
};

double directed_grid(const Eigen::Ref<const Matrix>& a, const GridIndex& index_b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        worst = std::max(worst, index_b.nearest(a, i));
    }
    return worst;
}

void check_clouds(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    if (a.rows() < 1 || b.rows() < 1) throw InvalidArgument("hausdorff: empty point cloud");
    if (a.cols() != b.cols() || a.cols() < 1) throw InvalidArgument("hausdorff: dimension mismatch");
    require_finite(a, "hausdorff");
    require_finite(b, "hausdorff");
}

}  // namespace

double hausdorff_brute(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    check_clouds(a, b);
    return std::max(directed_brute(a, b), directed_brute(b, a));
}

double hausdorff(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    check_clouds(a, b);
    if (a.cols() > 3) return std::max(directed_brute(a, b), directed_brute(b, a));
    const GridIndex ia(a);
    const GridIndex ib(b);
    return std::max(directed_grid(a, ib), directed_grid(b, ia));
}

}  // namespace dar
