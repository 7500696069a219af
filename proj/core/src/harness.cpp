#include "dar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "dar/error.hpp"
#include "dar/forecast.hpp"

namespace dar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RngStream stream(std::uint64_t seed, std::string_view label) { return RngStream(seed).child(label); }

}  // namespace

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t index) {
    return derive_seed(cfg.seed, index, "trial");
}

TimeSeries generate_signal(const ExperimentConfig& cfg, std::size_t trial_index) {
    const SignalConfig& s = cfg.signal;
    std::optional<RngStream> redraw;
    if (s.redraw_per_trial) redraw.emplace(derive_seed(cfg.seed, trial_index, "signal"));

    switch (s.source) {
        case SignalSource::lorenz: {
            auto x0 = s.x0;
            if (redraw) {
                for (double& v : x0) v += redraw->normal();
            }
            return gen_lorenz(x0, s.dt, s.length, s.lorenz);
        }
        case SignalSource::mackey_glass: {
            auto p = s.mackey_glass;
            if (redraw) p.history = 0.5 + redraw->uniform();
            return gen_mackey_glass(s.length, p);
        }
        case SignalSource::logistic: {
            double u0 = s.logistic_u0;
            if (redraw) u0 = 0.01 + 0.98 * redraw->uniform();
            return gen_logistic(u0, s.length, s.logistic_discard);
        }
        case SignalSource::file: {
            if (s.file.empty()) throw InvalidArgument("signal.file is required for source 'file'");
            return read_series_csv(s.file);
        }
    }
    throw InvalidArgument("unsupported signal source");
}

TimeSeries prepare_input(const ExperimentConfig& cfg, std::size_t trial_index) {
    TimeSeries input = center(generate_signal(cfg, trial_index).channel(cfg.signal.channel));
    if (cfg.signal.standardize) input = standardize(input);
    return input;
}

nlohmann::ordered_json record_to_json(const TrialRecord& r) {
    nlohmann::ordered_json j;
    j["benchmark"] = r.benchmark;
    j["trial_index"] = r.trial_index;
    j["seed"] = r.seed;
    j["kind"] = std::string(to_string(r.kind));
    j["N"] = r.N;
    j["readout"] = r.readout;
    j["ok"] = r.ok;
    if (!r.ok) {
        j["failed_stage"] = r.failed_stage;
        j["error"] = r.error;
    }
    auto& m = j["metrics"];
    auto& mse = m["mse"];
    mse = nlohmann::ordered_json::object();
    for (const auto& [h, v] : r.mse) mse[std::to_string(h)] = v;
    m["hausdorff"] = r.hausdorff;
    m["validation_mse"] = r.validation_mse;
    m["diverged"] = r.diverged;
    m["diverged_step"] = r.diverged_step;
    m["score"] = r.score;
    m["training_error"] = r.training_error;
    m["target_energy"] = r.target_energy;
    m["identity_residual"] = r.identity_residual;
    m["identity_pass"] = r.identity_pass;
    m["mode_entropy"] = r.mode_entropy;
    auto& d = j["design"];
    d["spine_d"] = r.spine_d;
    d["variance_captured"] = r.variance_captured;
    d["measured_leakage"] = r.measured_leakage;
    d["orthogonality_defect"] = r.orthogonality_defect;
    auto& g = j["geometry"];
    g["cone_median_deg"] = r.cone_median_deg;
    g["cone_fraction_at_theta"] = r.cone_fraction_at_theta;
    g["alpha"] = r.alpha;
    g["M_perp"] = r.m_perp;
    g["leakage_norm"] = r.leakage_norm;
    g["leakage_bound"] = r.leakage_bound;
    g["leakage_pass"] = r.leakage_pass;
    g["rho"] = r.rho;
    g["delta"] = r.delta;
    g["alignment_checked"] = r.alignment_checked;
    g["alignment_pass"] = r.alignment_pass;
    g["alignment_degenerate"] = r.alignment_degenerate;
    g["gain_status"] = r.gain_status;
    g["gain_score"] = r.gain_score;
    g["gain_bound"] = r.gain_bound;
    g["variance_ratio"] = r.variance_ratio;
    g["M_delta"] = r.m_delta;
    g["heuristic_ratio_median"] = r.heuristic_ratio_median;
    j["invariants_ok"] = r.invariants_ok;
    return j;
}

TrialOutputs run_trial_detailed(const ExperimentConfig& cfg, std::size_t index, BKind kind,
                                const TimeSeries* shared_input, TrialStage last) {
    const auto started = std::chrono::steady_clock::now();
    TrialOutputs out;
    TrialRecord& rec = out.record;
    rec.benchmark = cfg.name;
    rec.trial_index = index;
    rec.seed = trial_seed(cfg, index);
    rec.kind = kind;
    rec.N = cfg.reservoir.N;
    rec.readout = cfg.readout.kind;
    rec.hausdorff = kNaN;

    std::string stage = "generate";
    try {
        cfg.validate();
        out.input = shared_input != nullptr ? *shared_input : prepare_input(cfg, index);
        out.ranges = split(out.input.length(), cfg.split);
        const SplitRanges& rg = out.ranges;
        const Matrix& u = out.input.values;
        const auto N = static_cast<Eigen::Index>(cfg.reservoir.N);

        stage = "design";
        ReservoirParams& params = out.params;
        params.beta = cfg.reservoir.beta;
        params.activation = cfg.reservoir.activation;
        params.feature_map.powers = cfg.reservoir.feature_powers;
        {
            RngStream a_rng = stream(rec.seed, "input_matrix");
            params.A = make_input_matrix(N, params.feature_map.output_width(u.cols()), a_rng, cfg.reservoir.input_scale);
        }
        const auto tb = static_cast<Eigen::Index>(rg.train.begin);
        const auto tlen = static_cast<Eigen::Index>(rg.train.size());
        const Eigen::Index forcing_rows = std::min<Eigen::Index>(tlen + 1, u.rows() - tb);
        const Matrix forcing = forcing_increments(params, u.middleRows(tb, forcing_rows));

        switch (kind) {
            case BKind::random: {
                RngStream b_rng = stream(rec.seed, "random_b");
                params.B = haar_orthogonal(N, b_rng);
                out.spine = estimate_spine(forcing, cfg.design);
                break;
            }
            case BKind::designed:
            case BKind::block_invariant: {
                out.design = design_connectivity(forcing, cfg.design, stream(rec.seed, "design"));
                out.spine = out.design->spine;
                if (kind == BKind::designed) {
                    params.B = out.design->B;
                } else {
                    RngStream blk_rng = stream(rec.seed, "block_b");
                    params.B = block_invariant_variant(out.spine, out.design->R_d, blk_rng);
                }
                break;
            }
        }
        rec.spine_d = out.spine.dim();
        rec.variance_captured = out.spine.variance_captured;
        rec.measured_leakage = measure_leakage(params.B, out.spine.U);
        rec.orthogonality_defect = orthogonality_defect(params.B);
        if (last == TrialStage::design) {
            rec.ok = true;
            rec.invariants_ok = rec.orthogonality_defect <= 1e-8 * static_cast<double>(N);
            rec.elapsed_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            return out;
        }

        stage = "drive";
        const auto fb = static_cast<Eigen::Index>(rg.test.begin);
        out.trajectory = drive(params, u.topRows(fb), Vector::Zero(N));
        const Matrix& states = out.trajectory.states;

        stage = "train";
        const auto pb = tb + static_cast<Eigen::Index>(cfg.sub_washout);
        const Eigen::Index plen = tb + tlen - pb;
        const Matrix X = states.middleCols(pb, plen);
        const Matrix Y = u.middleRows(pb, plen).transpose();
        const Moments mom =
            accumulate_moments(X, Y, {.center = true, .standardize = cfg.reservoir.standardize_states});
        out.ridge = ridge_solve(mom, cfg.readout.lambda);
        rec.score = out.ridge->score;
        rec.training_error = out.ridge->training_error;
        rec.target_energy = mom.target_energy;
        rec.identity_residual = ridge_identity_check(mom, *out.ridge, X, Y);
        rec.identity_pass = rec.identity_residual <= 1e-8 * mom.target_energy;
        out.modes = ridge_modes(mom, cfg.readout.lambda);
        rec.mode_entropy = mode_entropy(out.modes);

        ReadoutFn readout;
        if (cfg.readout.kind == "nn") {
            out.nn = mlp_train(X, Y, cfg.readout.nn, stream(rec.seed, "nn"));
            readout = [model = &out.nn->model](const Vector& x) { return mlp_forward(*model, x); };
        } else {
            readout = [r = &*out.ridge](const Vector& x) { return r->predict(x); };
        }

        const double unit2 = out.input.scale(0) * out.input.scale(0);
        {
            const auto vb = static_cast<Eigen::Index>(rg.validation.begin);
            const auto vlen = static_cast<Eigen::Index>(rg.validation.size());
            if (vlen > 0) {
                double sum = 0.0;
                for (Eigen::Index n = vb; n < vb + vlen; ++n) {
                    sum += (readout(states.col(n)) - u.row(n).transpose()).squaredNorm();
                }
                rec.validation_mse = sum / static_cast<double>(vlen * u.cols()) * unit2;
            }
        }
        if (last == TrialStage::train) {
            rec.ok = true;
            rec.invariants_ok = rec.identity_pass && rec.orthogonality_defect <= 1e-8 * static_cast<double>(N);
            rec.elapsed_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            return out;
        }

        stage = "forecast";
        std::size_t horizon = cfg.forecast.hausdorff_window;
        for (std::size_t h : cfg.forecast.horizons) horizon = std::max(horizon, h);
        horizon = std::min(horizon, rg.test.size());
        const double amplitude = u.middleRows(tb, tlen).cwiseAbs().maxCoeff();
        RolloutOptions ropts;
        ropts.divergence_threshold = cfg.forecast.divergence_factor * amplitude;
        const SignalTransform transform{out.input.offset, out.input.scale};
        const RolloutResult roll = rollout(params, readout, states.col(fb), horizon, transform, ropts);
        out.predicted = roll.predicted;
        out.truth = out.input.to_original_units(u.middleRows(fb, static_cast<Eigen::Index>(horizon)));
        rec.diverged = roll.diverged;
        rec.diverged_step = roll.diverged_step;
        if (!cfg.forecast.horizons.empty() && horizon > 0) {
            rec.mse = horizon_mse(out.predicted, out.truth, cfg.forecast.horizons);
        }
        const std::size_t window = std::min(cfg.forecast.hausdorff_window, horizon);
        const std::size_t span = (cfg.forecast.embed_dim - 1) * cfg.forecast.embed_delay;
        if (window > span) {
            const auto w = static_cast<Eigen::Index>(window);
            const Matrix pa = delay_embed(out.predicted.col(0).head(w), cfg.forecast.embed_dim, cfg.forecast.embed_delay);
            const Matrix pb2 = delay_embed(out.truth.col(0).head(w), cfg.forecast.embed_dim, cfg.forecast.embed_delay);
            rec.hausdorff = hausdorff(pa, pb2);
        }

        stage = "diagnose";
        const Matrix inc = out.trajectory.increments(tb, tb + tlen);
        DiagnoseOptions dopts;
        dopts.theta_deg = cfg.diagnostics.theta_deg;
        dopts.lambda = cfg.readout.lambda;
        dopts.lambda0 = cfg.diagnostics.lambda0;
        dopts.beta = params.beta;
        const Matrix Xd = states.middleCols(tb, tlen);
        const Matrix Yd = u.middleRows(tb, tlen).transpose();
        out.geometry = diagnose(Xd, Yd, inc, &forcing, out.spine, dopts);
        const GeometryReport& g = out.geometry;
        rec.cone_median_deg = g.cone.median_angle * 180.0 / std::numbers::pi;
        rec.cone_fraction_at_theta = g.cone.fraction_at_theta;
        rec.alpha = g.cone.alpha;
        rec.m_perp = g.leakage.m_perp;
        rec.leakage_norm = g.leakage.leakage_norm;
        rec.leakage_bound = g.leakage.leakage_bound;
        rec.leakage_pass = g.leakage.pass;
        rec.rho = g.alignment.rho;
        rec.delta = g.alignment.delta;
        rec.alignment_checked = g.alignment.records.size();
        rec.alignment_pass = g.alignment.pass();
        rec.alignment_degenerate = g.alignment.degenerate;
        rec.gain_status = to_string(g.gain.status);
        rec.gain_score = g.gain.score;
        rec.gain_bound = g.gain.bound;
        rec.variance_ratio = g.variance_ratio;
        rec.m_delta = g.m_delta;
        rec.heuristic_ratio_median = g.heuristic_ratio_median;

        rec.ok = true;
        rec.invariants_ok = rec.identity_pass && g.invariants_hold() &&
                            rec.orthogonality_defect <= 1e-8 * static_cast<double>(N);
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.invariants_ok = false;
        rec.failed_stage = stage;
        rec.error = e.what();
    }
    rec.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t index, BKind kind, const TimeSeries* shared_input) {
    return run_trial_detailed(cfg, index, kind, shared_input).record;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Stats describe(const std::vector<double>& values) {
    std::vector<double> finite;
    finite.reserve(values.size());
    for (double v : values) {
        if (std::isfinite(v)) finite.push_back(v);
    }
    Stats s;
    s.count = finite.size();
    if (finite.empty()) {
        s.mean = s.p10 = s.p50 = s.p90 = kNaN;
        return s;
    }
    double sum = 0.0;
    for (double v : finite) sum += v;
    s.mean = sum / static_cast<double>(finite.size());
    s.p10 = percentile(finite, 0.10);
    s.p50 = percentile(finite, 0.50);
    s.p90 = percentile(finite, 0.90);
    return s;
}

bool SweepResult::all_ok() const {
    return std::all_of(trials.begin(), trials.end(),
                       [](const TrialSummary& t) { return t.record.ok && t.record.invariants_ok; });
}

namespace {

TrialSummary summarise(TrialOutputs&& o) {
    TrialSummary s;
    s.record = std::move(o.record);
    s.cone_hist = cone_histogram(o.geometry.cone.angles, 90);
    double total = 0.0;
    for (const auto& m : o.modes) total += std::max(m.contribution, 0.0);
    if (total > 0.0) {
        for (const auto& m : o.modes) s.mode_weights.push_back(std::max(m.contribution, 0.0) / total);
    }
    return s;
}

std::size_t kind_rank(const ExperimentConfig& cfg, BKind k) {
    return static_cast<std::size_t>(std::find(cfg.b_kinds.begin(), cfg.b_kinds.end(), k) - cfg.b_kinds.begin());
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes, std::size_t trials,
                      std::size_t workers) {
    if (trials < 1) throw InvalidArgument("run_sweep: trials must be at least 1");
    if (sizes.empty()) throw InvalidArgument("run_sweep: no reservoir sizes");

    std::optional<TimeSeries> shared;
    if (!cfg.signal.redraw_per_trial) shared = prepare_input(cfg, 0);

    struct Task {
        std::size_t N;
        std::size_t index;
        BKind kind;
    };
    std::vector<Task> tasks;
    for (std::size_t N : sizes) {
        for (std::size_t i = 0; i < trials; ++i) {
            for (BKind k : cfg.b_kinds) tasks.push_back({N, i, k});
        }
    }

    SweepResult result;
    result.trials.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&]() {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            ExperimentConfig local = cfg;
            local.reservoir.N = tasks[t].N;
            result.trials[t] =
                summarise(run_trial_detailed(local, tasks[t].index, tasks[t].kind, shared ? &*shared : nullptr));
        }
    };
    const std::size_t pool = std::clamp<std::size_t>(workers, 1, tasks.size());
    if (pool == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (std::size_t w = 0; w < pool; ++w) threads.emplace_back(work);
        for (auto& th : threads) th.join();
    }

    std::stable_sort(result.trials.begin(), result.trials.end(), [&cfg](const TrialSummary& a, const TrialSummary& b) {
        if (a.record.N != b.record.N) return a.record.N < b.record.N;
        if (a.record.trial_index != b.record.trial_index) return a.record.trial_index < b.record.trial_index;
        return kind_rank(cfg, a.record.kind) < kind_rank(cfg, b.record.kind);
    });

    for (std::size_t N : sizes) {
        for (BKind k : cfg.b_kinds) {
            CellSummary cell;
            cell.N = N;
            cell.kind = k;
            std::map<std::size_t, std::vector<double>> mse;
            std::vector<double> haus;
            std::vector<double> cone;
            std::vector<double> entropy;
            for (const auto& t : result.trials) {
                const TrialRecord& r = t.record;
                if (r.N != N || r.kind != k) continue;
                ++cell.trials;
                if (!r.ok) {
                    ++cell.failures;
                    continue;
                }
                if (!r.invariants_ok) ++cell.invariant_failures;
                if (r.diverged) ++cell.diverged;
                for (const auto& [h, v] : r.mse) mse[h].push_back(v);
                haus.push_back(r.hausdorff);
                cone.push_back(r.cone_median_deg);
                entropy.push_back(r.mode_entropy);
            }
            for (std::size_t h : cfg.forecast.horizons) cell.mse[h] = describe(mse[h]);
            cell.hausdorff = describe(haus);
            cell.cone_median_deg = describe(cone);
            cell.mode_entropy = describe(entropy);
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {

nlohmann::ordered_json stats_json(const Stats& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"p10", s.p10}, {"p50", s.p50}, {"p90", s.p90}};
}

}  // namespace

nlohmann::ordered_json cell_to_json(const CellSummary& c) {
    nlohmann::ordered_json j;
    j["N"] = c.N;
    j["kind"] = std::string(to_string(c.kind));
    j["trials"] = c.trials;
    j["successes"] = c.trials - c.failures;
    j["failures"] = c.failures;
    j["diverged"] = c.diverged;
    j["invariant_failures"] = c.invariant_failures;
    auto& mse = j["mse"];
    mse = nlohmann::ordered_json::object();
    for (const auto& [h, s] : c.mse) mse[std::to_string(h)] = stats_json(s);
    j["hausdorff"] = stats_json(c.hausdorff);
    j["cone_median_deg"] = stats_json(c.cone_median_deg);
    j["mode_entropy"] = stats_json(c.mode_entropy);
    return j;
}

}  // namespace dar
