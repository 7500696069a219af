#include "dar/design.hpp"

#include <string>

#include "dar/error.hpp"

namespace dar {

void DarConfig::validate() const {
    if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
        throw InvalidArgument("design: variance_threshold must lie in (0, 1]");
    }
    if (fixed_d && *fixed_d < 1) throw InvalidArgument("design: fixed_d must be at least 1");
    if (block_depth < 2) throw InvalidArgument("design: block depth K must be at least 2");
    if (windows < 1) throw InvalidArgument("design: window count W must be at least 1");
    if (!(gamma_mix >= 0.0 && gamma_mix <= 1.0)) throw InvalidArgument("design: gamma_mix must lie in [0, 1]");
}

SpineBasis estimate_spine(const Eigen::Ref<const Matrix>& v, const DarConfig& cfg) {
    cfg.validate();
    if (v.cols() < 2) throw InvalidArgument("estimate_spine: need at least two increments");
    require_finite(v, "estimate_spine");

    const SvdResult f = svd(v);
    const Vector energy = f.S.array().square();
    const double total = energy.sum();
    if (!(total > 0.0)) throw NumericalError("estimate_spine: increment cloud is identically zero");

    Eigen::Index d = 0;
    if (cfg.fixed_d) {
        d = *cfg.fixed_d;
        if (d > f.S.size()) {
            throw InvalidArgument("estimate_spine: fixed_d exceeds the available rank " + std::to_string(f.S.size()));
        }
    } else {
        double acc = 0.0;
        while (d < energy.size()) {
            acc += energy(d);
            ++d;
            if (acc / total >= cfg.variance_threshold) break;
        }
    }

    SpineBasis spine;
    spine.U = f.U.leftCols(d);
    spine.singular_values = f.S;
    spine.variance_captured = energy.head(d).sum() / total;
    return spine;
}

Matrix project_coordinates(const SpineBasis& spine, const Eigen::Ref<const Matrix>& v) {
    if (v.rows() != spine.ambient()) throw InvalidArgument("project_coordinates: dimension mismatch");
    return spine.U.transpose() * v;
}

ProcrustesBlocks build_procrustes_blocks(const Eigen::Ref<const Matrix>& p, std::size_t K, std::size_t W,
                                         RngStream& rng) {
    if (K < 2) throw InvalidArgument("build_procrustes_blocks: K must be at least 2");
    if (W < 1) throw InvalidArgument("build_procrustes_blocks: W must be at least 1");
    const auto length = static_cast<std::size_t>(p.cols());
    if (length < K) throw InvalidArgument("build_procrustes_blocks: sequence shorter than K");
    const std::size_t valid = length - K + 1;
    if (valid < W) {
        throw InvalidArgument("build_procrustes_blocks: " + std::to_string(W) + " windows requested but only " +
                              std::to_string(valid) + " valid starts");
    }

    ProcrustesBlocks out;
    out.starts = sample_without_replacement(valid, W, rng);
    const auto per = static_cast<Eigen::Index>(K - 1);
    out.current.resize(p.rows(), static_cast<Eigen::Index>(W) * per);
    out.next.resize(p.rows(), static_cast<Eigen::Index>(W) * per);
    Eigen::Index col = 0;
    for (std::size_t c : out.starts) {
        const auto ci = static_cast<Eigen::Index>(c);
        out.current.middleCols(col, per) = p.middleCols(ci, per);
        out.next.middleCols(col, per) = p.middleCols(ci + 1, per);
        col += per;
    }
    return out;
}

Matrix kabsch(const Eigen::Ref<const Matrix>& current, const Eigen::Ref<const Matrix>& next) {
    if (current.rows() != next.rows() || current.cols() != next.cols() || current.cols() < 1) {
        throw InvalidArgument("kabsch: P_current and P_next must have equal nonempty shapes");
    }
    const Matrix cross = next * current.transpose();
    const SvdResult f = svd(cross);
    const double smax = f.S(0);
    const double smin = f.S(f.S.size() - 1);
    if (!(smax > 0.0) || smin <= tol::kPolarRank * smax) {
        throw NumericalError("kabsch: cross matrix is rank deficient (sigma_min " + std::to_string(smin) +
                             "); lower d");
    }
    return f.U * f.V.transpose();
}

Matrix lift_align(const SpineBasis& spine, const Eigen::Ref<const Matrix>& R) {
    const Eigen::Index d = spine.dim();
    if (R.rows() != d || R.cols() != d) throw InvalidArgument("lift_align: R must be d x d");
    const Matrix& U = spine.U;
    Matrix out = Matrix::Identity(U.rows(), U.rows());
    out.noalias() -= U * U.transpose();
    out.noalias() += U * R * U.transpose();
    return out;
}

double measure_leakage(const Eigen::Ref<const Matrix>& B, const Eigen::Ref<const Matrix>& U) {
    const Matrix BU = B * U;
    const Matrix transverse = BU - U * (U.transpose() * BU);
    return spectral_norm(transverse);
}

MixResult mix_and_polarize(const Eigen::Ref<const Matrix>& B_align, const SpineBasis& spine, double gamma_mix,
                           RngStream& rng) {
    if (!(gamma_mix >= 0.0 && gamma_mix <= 1.0)) throw InvalidArgument("mix_and_polarize: gamma_mix outside [0, 1]");
    if (B_align.rows() != spine.ambient()) throw InvalidArgument("mix_and_polarize: dimension mismatch");
    MixResult out;
    out.B_rand = haar_orthogonal(B_align.rows(), rng);
    const Matrix mixed = (1.0 - gamma_mix) * B_align + gamma_mix * out.B_rand;
    out.B = polar_factor(mixed);
    out.measured_leakage = measure_leakage(out.B, spine.U);
    return out;
}

Matrix block_invariant_variant(const SpineBasis& spine, const Eigen::Ref<const Matrix>& R, RngStream& rng) {
    const Eigen::Index n = spine.ambient();
    const Eigen::Index d = spine.dim();
    if (d >= n) throw InvalidArgument("block_invariant_variant: spine fills the space, no complement");
    if (R.rows() != d || R.cols() != d) throw InvalidArgument("block_invariant_variant: R must be d x d");
    const Matrix Uc = orthogonal_complement(spine.U);
    const Matrix Rc = haar_orthogonal(n - d, rng);
    Matrix out = spine.U * R * spine.U.transpose();
    out.noalias() += Uc * Rc * Uc.transpose();
    return out;
}

DarResult design_connectivity(const Eigen::Ref<const Matrix>& v, const DarConfig& cfg, const RngStream& rng) {
    cfg.validate();
    DarResult out;
    out.spine = estimate_spine(v, cfg);
    const Matrix p = project_coordinates(out.spine, v);

    RngStream window_rng = rng.child("windows");
    const ProcrustesBlocks blocks = build_procrustes_blocks(p, cfg.block_depth, cfg.windows, window_rng);
    out.block_columns = static_cast<std::size_t>(blocks.current.cols());
    out.R_d = kabsch(blocks.current, blocks.next);
    out.B_align = lift_align(out.spine, out.R_d);

    RngStream haar_rng = rng.child("haar");
    MixResult mix = mix_and_polarize(out.B_align, out.spine, cfg.gamma_mix, haar_rng);
    out.B = std::move(mix.B);
    out.measured_leakage = mix.measured_leakage;
    out.gamma_mix = cfg.gamma_mix;
    return out;
}

}  // namespace dar
