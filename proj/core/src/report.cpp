#include "dar/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dar/error.hpp"

namespace dar {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::string> trials_csv_columns(const std::vector<std::size_t>& horizons) {
    std::vector<std::string> cols{"benchmark", "N", "kind", "trial_index", "seed", "status", "failed_stage"};
    for (std::size_t h : horizons) cols.push_back("mse_" + std::to_string(h));
    for (const char* c : {"hausdorff", "validation_mse", "diverged", "score", "training_error", "identity_residual",
                          "spine_d", "measured_leakage", "cone_median_deg", "alpha", "leakage_norm", "leakage_bound",
                          "leakage_pass", "variance_ratio", "mode_entropy", "invariants_ok", "elapsed_s"}) {
        cols.emplace_back(c);
    }
    return cols;
}

void write_trials_csv(const SweepResult& sweep, const std::vector<std::size_t>& horizons,
                      const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    const auto cols = trials_csv_columns(horizons);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& t : sweep.trials) {
        const TrialRecord& r = t.record;
        out << r.benchmark << ',' << r.N << ',' << to_string(r.kind) << ',' << r.trial_index << ',' << r.seed << ','
            << (r.ok ? "ok" : "failed") << ',' << r.failed_stage;
        for (std::size_t h : horizons) {
            const auto it = r.mse.find(h);
            out << ',' << num(r.ok && it != r.mse.end() ? it->second : std::nan(""));
        }
        out << ',' << num(r.hausdorff) << ',' << num(r.validation_mse) << ',' << (r.diverged ? 1 : 0) << ','
            << num(r.score) << ',' << num(r.training_error) << ',' << num(r.identity_residual) << ',' << r.spine_d
            << ',' << num(r.measured_leakage) << ',' << num(r.cone_median_deg) << ',' << num(r.alpha) << ','
            << num(r.leakage_norm) << ',' << num(r.leakage_bound) << ',' << (r.leakage_pass ? 1 : 0) << ','
            << num(r.variance_ratio) << ',' << num(r.mode_entropy) << ',' << (r.invariants_ok ? 1 : 0) << ','
            << num(r.elapsed_seconds) << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<std::size_t> log_weight_histogram(const std::vector<double>& weights, int lo) {
    if (lo >= 0) throw InvalidArgument("log_weight_histogram: lower edge must be negative");
    std::vector<std::size_t> counts(static_cast<std::size_t>(-lo), 0);
    for (double w : weights) {
        if (!(w > 0.0)) {
            counts.front() += 1;
            continue;
        }
        const double e = std::floor(std::log10(w));
        const long b = std::clamp(static_cast<long>(e) - lo, 0L, static_cast<long>(counts.size()) - 1);
        counts[static_cast<std::size_t>(b)] += 1;
    }
    return counts;
}

void emit_report(const ExperimentConfig& cfg, const SweepResult& sweep, const std::filesystem::path& dir) {
    if (sweep.trials.empty()) throw InvalidArgument("emit_report: no records");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

    write_trials_csv(sweep, cfg.forecast.horizons, dir / "trials.csv");

    nlohmann::ordered_json summary;
    summary["benchmark"] = cfg.name;
    summary["config"] = config_to_json(cfg);
    std::size_t failures = 0;
    std::size_t violations = 0;
    for (const auto& t : sweep.trials) {
        if (!t.record.ok) ++failures;
        else if (!t.record.invariants_ok) ++violations;
    }
    summary["trials"] = sweep.trials.size();
    summary["failures"] = failures;
    summary["invariant_violations"] = violations;
    summary["all_ok"] = sweep.all_ok();
    auto& cells = summary["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : sweep.cells) cells.push_back(cell_to_json(c));
    {
        std::ofstream out = open_out(dir / "summary.json");
        out << summary.dump(2) << '\n';
    }

    for (const auto& c : sweep.cells) {
        const std::string tag = std::string(to_string(c.kind)) + "_N" + std::to_string(c.N);
        std::vector<std::size_t> cone(90, 0);
        std::vector<double> weights;
        for (const auto& t : sweep.trials) {
            if (t.record.N != c.N || t.record.kind != c.kind || !t.record.ok) continue;
            for (std::size_t b = 0; b < cone.size() && b < t.cone_hist.size(); ++b) cone[b] += t.cone_hist[b];
            weights.insert(weights.end(), t.mode_weights.begin(), t.mode_weights.end());
        }
        write_cone_histogram_csv(cone, dir / ("cone_hist_" + tag + ".csv"));
        const auto modes = log_weight_histogram(weights);
        std::ofstream out = open_out(dir / ("ridge_modes_" + tag + ".csv"));
        out << "log10_weight_bin,count\n";
        for (std::size_t b = 0; b < modes.size(); ++b) out << (static_cast<int>(b) - 12) << ',' << modes[b] << '\n';
    }

    for (BKind k : cfg.b_kinds) {
        for (std::size_t h : cfg.forecast.horizons) {
            std::ofstream out = open_out(dir / ("plot_mse" + std::to_string(h) + "_" + std::string(to_string(k)) + ".csv"));
            out << "x,y,ylo,yhi\n";
            for (const auto& c : sweep.cells) {
                if (c.kind != k) continue;
                const Stats& s = c.mse.at(h);
                out << c.N << ',' << num(s.mean) << ',' << num(s.p10) << ',' << num(s.p90) << '\n';
            }
        }
    }
}

}  // namespace dar
