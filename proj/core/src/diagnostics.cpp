#include "dar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "dar/error.hpp"

namespace dar {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

// Orthogonal split of columns: (U^T X, X - U U^T X).
std::pair<Matrix, Matrix> split_columns(const Eigen::Ref<const Matrix>& X, const Matrix& U) {
    Matrix along = U.transpose() * X;
    Matrix across = X - U * along;
    return {std::move(along), std::move(across)};
}

}  // namespace

ConeProfile cone_profile(const Eigen::Ref<const Matrix>& increments, const SpineBasis& spine, double theta_deg) {
    if (spine.dim() < 1) throw InvalidArgument("cone_profile: spine dimension must be at least 1");
    if (increments.rows() != spine.ambient()) throw InvalidArgument("cone_profile: dimension mismatch");

    ConeProfile out;
    out.theta_deg = theta_deg;
    const auto [along, across] = split_columns(increments, spine.U);
    out.angles.resize(static_cast<std::size_t>(increments.cols()));
    std::vector<double> valid;
    valid.reserve(out.angles.size());
    for (Eigen::Index n = 0; n < increments.cols(); ++n) {
        const double a = along.col(n).norm();
        const double b = across.col(n).norm();
        double angle = std::numeric_limits<double>::quiet_NaN();
        if (a > 0.0 || b > 0.0) {
            angle = std::atan2(b, a);
            valid.push_back(angle);
        } else {
            ++out.missing;
        }
        out.angles[static_cast<std::size_t>(n)] = angle;
    }

    std::vector<double> sorted = valid;
    std::sort(sorted.begin(), sorted.end());
    const auto within = [&sorted](double deg) {
        if (sorted.empty()) return 0.0;
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), deg * kDeg);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    };
    for (int deg = 5; deg <= 85; deg += 5) {
        out.theta_grid_deg.push_back(deg);
        out.fraction_within.push_back(within(deg));
    }
    out.fraction_at_theta = within(theta_deg);
    out.alpha = 1.0 - out.fraction_at_theta;
    out.median_angle = median_of(std::move(valid));
    return out;
}

LeakageCheck leakage_check(const Eigen::Ref<const Matrix>& states, const SpineBasis& spine, const Moments& moments) {
    if (states.rows() != spine.ambient() || moments.C.rows() != spine.ambient()) {
        throw InvalidArgument("leakage_check: dimension mismatch");
    }
    LeakageCheck out;
    const Matrix leak = moments.C - spine.U * (spine.U.transpose() * moments.C);
    out.leakage_norm = leak.norm();
    const auto [along, across] = split_columns(states, spine.U);
    out.m_perp = across.cols() > 0 ? across.colwise().norm().maxCoeff() : 0.0;
    out.sigma_y = std::sqrt(std::max(moments.target_energy, 0.0));
    out.leakage_bound = out.m_perp * out.sigma_y;
    out.pass = out.leakage_norm <= out.leakage_bound + 1e-12;
    return out;
}

bool AlignmentCheck::pass() const {
    return std::all_of(records.begin(), records.end(), [](const AlignmentRecord& r) { return r.pass; });
}

AlignmentCheck alignment_check(const Moments& moments, const SpineBasis& spine, double lambda0) {
    if (!(lambda0 > 0.0)) throw InvalidArgument("alignment_check: lambda0 must be positive");
    if (moments.C.rows() != spine.ambient()) throw InvalidArgument("alignment_check: dimension mismatch");

    AlignmentCheck out;
    const Matrix& U = spine.U;
    const Matrix& C = moments.C;
    const Matrix coords = U.transpose() * C;  // d x p
    if (spine.dim() > C.cols()) {
        out.rho = 0.0;
    } else {
        const Vector s = singular_values(coords);
        out.rho = s(s.size() - 1);
    }
    out.delta = spectral_norm(C - U * coords);
    out.degenerate = !(out.rho > 0.0);

    const EigenDecomposition e = sym_eig(moments.Sigma);
    const Matrix qC = e.vectors.transpose() * C;
    const Matrix qU = e.vectors.transpose() * U;  // row i: U^T q_i
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        if (e.values(i) < lambda0) break;
        const double along2 = std::min(qU.row(i).squaredNorm(), 1.0);
        const double eps = std::sqrt(1.0 - along2);
        if (!(eps < 1.0 - 1e-12)) {
            ++out.excluded;
            continue;
        }
        AlignmentRecord r;
        r.mode = static_cast<std::size_t>(i);
        r.eigenvalue = e.values(i);
        r.eps = eps;
        r.actual = qC.row(i).norm();
        r.bound = std::sqrt(along2) * out.rho - eps * out.delta;
        r.pass = r.actual >= r.bound - 1e-10;
        out.records.push_back(r);
    }
    return out;
}

double variance_ratio(const Eigen::Ref<const Matrix>& states, const SpineBasis& spine) {
    if (states.rows() != spine.ambient()) throw InvalidArgument("variance_ratio: dimension mismatch");
    const auto [along, across] = split_columns(states, spine.U);
    const double longitudinal = along.squaredNorm();
    if (!(longitudinal > 0.0)) throw NumericalError("variance_ratio: zero longitudinal variance");
    return across.squaredNorm() / longitudinal;
}

std::string to_string(GateStatus s) {
    switch (s) {
        case GateStatus::pass: return "pass";
        case GateStatus::fail: return "fail";
        case GateStatus::not_applicable: return "not-applicable";
    }
    return "not-applicable";
}

GainBound gain_lower_bound(const Moments& moments, const SpineBasis& spine, double lambda, double lambda0) {
    if (!(lambda > 0.0) || !(lambda0 > 0.0)) throw InvalidArgument("gain_lower_bound: lambda and lambda0 must be positive");
    GainBound out;
    const auto modes = ridge_modes(moments, lambda);
    for (const auto& m : modes) out.score += m.contribution;

    const EigenDecomposition e = sym_eig(moments.Sigma);
    const Matrix qU = e.vectors.transpose() * spine.U;
    const Matrix coords = spine.U.transpose() * moments.C;
    const double rho = spine.dim() > moments.C.cols() ? 0.0 : singular_values(coords).minCoeff();
    const double delta = spectral_norm(moments.C - spine.U * coords);

    std::vector<double> eigen_kept;
    double eps = 0.0;
    for (Eigen::Index i = 0; i < e.values.size() && e.values(i) >= lambda0; ++i) {
        eps = std::max(eps, std::sqrt(1.0 - std::min(qU.row(i).squaredNorm(), 1.0)));
        eigen_kept.push_back(e.values(i));
    }
    out.eps = eps;
    out.modes = eigen_kept.size();
    const double margin = std::sqrt(1.0 - eps * eps) * rho - eps * delta;
    if (eigen_kept.empty() || !(margin > 0.0)) {
        out.status = GateStatus::not_applicable;
        return out;
    }
    for (double ev : eigen_kept) out.bound += margin * margin / (ev + lambda);
    out.status = out.score >= out.bound - 1e-10 ? GateStatus::pass : GateStatus::fail;
    return out;
}

bool GeometryReport::invariants_hold() const {
    return leakage.pass && alignment.pass() && gain.status != GateStatus::fail;
}

GeometryReport diagnose(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                        const Eigen::Ref<const Matrix>& increments, const Matrix* forcing, const SpineBasis& spine,
                        const DiagnoseOptions& opts) {
    GeometryReport r;
    const Moments m = accumulate_moments(states, targets, {.center = true, .standardize = false});
    const Matrix centred = m.state_norm.apply(states);

    r.cone = cone_profile(increments, spine, opts.theta_deg);
    r.leakage = leakage_check(centred, spine, m);
    r.alignment = alignment_check(m, spine, opts.lambda0);
    r.gain = gain_lower_bound(m, spine, opts.lambda, opts.lambda0);
    r.variance_ratio = variance_ratio(centred, spine);

    const Vector inc_norms = increments.colwise().norm();
    r.m_delta = inc_norms.size() > 0 ? inc_norms.maxCoeff() : 0.0;
    r.min_delta = inc_norms.size() > 0 ? inc_norms.minCoeff() : 0.0;

    const EigenDecomposition e = sym_eig(m.Sigma);
    const Matrix qU = e.vectors.transpose() * spine.U;
    r.eps.resize(static_cast<std::size_t>(e.values.size()));
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        r.eps[static_cast<std::size_t>(i)] = std::sqrt(1.0 - std::min(qU.row(i).squaredNorm(), 1.0));
    }

    if (forcing != nullptr && forcing->cols() > 0) {
        const Eigen::Index n = std::min(forcing->cols(), increments.cols());
        const Matrix along = spine.U.transpose() * increments.leftCols(n);
        std::vector<double> ratios;
        ratios.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            const double denom = opts.beta * along.col(k).norm();
            if (denom > 0.0) ratios.push_back(forcing->col(k).norm() / denom);
        }
        r.heuristic_ratio_median = median_of(std::move(ratios));
    }
    return r;
}

nlohmann::ordered_json geometry_to_json(const GeometryReport& r, bool include_angles) {
    nlohmann::ordered_json j;
    auto& cone = j["cone"];
    cone["theta_deg"] = r.cone.theta_deg;
    cone["fraction_at_theta"] = r.cone.fraction_at_theta;
    cone["alpha"] = r.cone.alpha;
    cone["median_angle_deg"] = r.cone.median_angle / kDeg;
    cone["missing"] = r.cone.missing;
    cone["theta_grid_deg"] = r.cone.theta_grid_deg;
    cone["fraction_within"] = r.cone.fraction_within;
    if (include_angles) cone["angles_rad"] = r.cone.angles;

    auto& leak = j["leakage"];
    leak["leakage_norm"] = r.leakage.leakage_norm;
    leak["M_perp"] = r.leakage.m_perp;
    leak["sigma_y"] = r.leakage.sigma_y;
    leak["leakage_bound"] = r.leakage.leakage_bound;
    leak["pass"] = r.leakage.pass;

    auto& al = j["alignment"];
    al["rho"] = r.alignment.rho;
    al["delta"] = r.alignment.delta;
    al["degenerate"] = r.alignment.degenerate;
    al["excluded_modes"] = r.alignment.excluded;
    al["pass"] = r.alignment.pass();
    auto& recs = al["records"] = nlohmann::ordered_json::array();
    for (const auto& rec : r.alignment.records) {
        recs.push_back({{"mode", rec.mode},
                        {"eigenvalue", rec.eigenvalue},
                        {"eps", rec.eps},
                        {"actual", rec.actual},
                        {"bound", rec.bound},
                        {"pass", rec.pass}});
    }

    auto& gain = j["gain"];
    gain["score"] = r.gain.score;
    gain["bound"] = r.gain.bound;
    gain["eps"] = r.gain.eps;
    gain["modes"] = r.gain.modes;
    gain["status"] = to_string(r.gain.status);

    j["variance_ratio"] = r.variance_ratio;
    j["M_delta"] = r.m_delta;
    j["m_delta"] = r.min_delta;
    j["heuristic_ratio_median"] = r.heuristic_ratio_median;
    j["eps"] = r.eps;
    return j;
}

std::vector<std::size_t> cone_histogram(const std::vector<double>& angles, std::size_t bins) {
    if (bins < 1) throw InvalidArgument("cone_histogram: bins must be at least 1");
    std::vector<std::size_t> counts(bins, 0);
    const double width = 90.0 / static_cast<double>(bins);
    for (double a : angles) {
        if (std::isnan(a)) continue;
        auto b = static_cast<std::size_t>(std::floor(a / kDeg / width));
        counts[std::min(b, bins - 1)] += 1;
    }
    return counts;
}

void write_cone_histogram_csv(const std::vector<std::size_t>& counts, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << "theta_bin,count\n";
    const double width = 90.0 / static_cast<double>(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        out << static_cast<double>(b) * width << ',' << counts[b] << '\n';
    }
}

}  // namespace dar
