// Command-line front end: generate, design, train, forecast, diagnose, run, sweep.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "dar/config.hpp"
#include "dar/diagnostics.hpp"
#include "dar/error.hpp"
#include "dar/harness.hpp"
#include "dar/matrix_io.hpp"
#include "dar/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::string preset = "lorenz";
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    bool full = false;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::optional<std::size_t> trials;
    std::size_t index = 0;
    std::string kind = "designed";
    std::string series;
    bool dump_states = false;
};

dar::ExperimentConfig resolve(const Common& c) {
    dar::ExperimentConfig cfg = c.config.empty() ? dar::preset(c.preset) : dar::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.trials) cfg.trials = *c.trials;
    if (!c.series.empty()) {
        cfg.signal.source = dar::SignalSource::file;
        cfg.signal.file = c.series;
        cfg.signal.length = dar::read_series_csv(c.series).length();
    }
    cfg.validate();
    return cfg;
}

fs::path out_dir(const Common& c) {
    fs::path p(c.out);
    fs::create_directories(p);
    return p;
}

void write_json(const nlohmann::ordered_json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw dar::Error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

int finish(const dar::TrialRecord& r) {
    if (!r.ok) {
        std::cerr << "trial failed in stage '" << r.failed_stage << "': " << r.error << '\n';
        return 1;
    }
    if (!r.invariants_ok) {
        std::cerr << "asserted invariants failed, see the JSON report\n";
        return 1;
    }
    return 0;
}

dar::TrialOutputs single(const Common& c, const dar::ExperimentConfig& cfg, dar::TrialStage last) {
    return dar::run_trial_detailed(cfg, c.index, dar::b_kind_from_string(c.kind), nullptr, last);
}

int cmd_generate(const Common& c) {
    const auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const dar::TimeSeries raw = dar::generate_signal(cfg, c.index);
    const dar::TimeSeries input = dar::prepare_input(cfg, c.index);
    dar::write_series_csv(raw, dir / "series.csv");
    dar::write_series_csv(input, dir / "input.csv");
    nlohmann::ordered_json j;
    j["source"] = std::string(dar::to_string(raw.source));
    j["length"] = raw.length();
    j["channels"] = raw.channels();
    j["dt"] = raw.dt;
    j["input_channel"] = cfg.signal.channel;
    j["input_offset"] = input.offset(0);
    j["input_scale"] = input.scale(0);
    write_json(j, dir / "signal.json");
    std::cout << "wrote " << raw.length() << " samples to " << (dir / "series.csv").string() << '\n';
    return 0;
}

int cmd_design(const Common& c) {
    const auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const auto o = single(c, cfg, dar::TrialStage::design);
    if (o.record.ok) {
        dar::write_matrix_csv(o.params.B, dir / "B.csv");
        dar::write_matrix_csv(o.spine.U, dir / "U.csv");
        if (o.design) dar::write_matrix_csv(o.design->B_align, dir / "B_align.csv");
        nlohmann::ordered_json j;
        j["kind"] = c.kind;
        j["N"] = cfg.reservoir.N;
        j["d"] = o.spine.dim();
        j["variance_captured"] = o.spine.variance_captured;
        j["measured_leakage"] = o.record.measured_leakage;
        j["gamma_mix"] = cfg.design.gamma_mix;
        j["orthogonality_defect"] = o.record.orthogonality_defect;
        if (o.design) j["block_columns"] = o.design->block_columns;
        write_json(j, dir / "design.json");
        std::cout << "d=" << o.spine.dim() << " variance_captured=" << o.spine.variance_captured
                  << " leakage=" << o.record.measured_leakage << '\n';
    }
    return finish(o.record);
}

int cmd_train(const Common& c) {
    const auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const auto o = single(c, cfg, dar::TrialStage::train);
    if (o.record.ok) {
        if (o.ridge) dar::write_matrix_csv(o.ridge->W, dir / "W.csv");
        if (o.nn) {
            dar::write_matrix_csv(o.nn->model.W1, dir / "nn_W1.csv");
            dar::write_matrix_csv(o.nn->model.b1, dir / "nn_b1.csv");
            dar::write_matrix_csv(o.nn->model.W2, dir / "nn_W2.csv");
            dar::write_matrix_csv(o.nn->model.b2, dir / "nn_b2.csv");
            std::ofstream trace(dir / "loss_trace.csv");
            trace << "epoch,step,loss\n";
            trace.precision(17);
            for (const auto& e : o.nn->trace) trace << e.epoch << ',' << e.step << ',' << e.loss << '\n';
        }
        nlohmann::ordered_json j;
        j["readout"] = cfg.readout.kind;
        j["lambda"] = cfg.readout.lambda;
        j["score"] = o.record.score;
        j["training_error"] = o.record.training_error;
        j["target_energy"] = o.record.target_energy;
        j["identity_residual"] = o.record.identity_residual;
        j["identity_pass"] = o.record.identity_pass;
        j["validation_mse"] = o.record.validation_mse;
        write_json(j, dir / "train.json");
        std::cout << "score=" << o.record.score << " training_error=" << o.record.training_error
                  << " identity_residual=" << o.record.identity_residual << '\n';
    }
    return finish(o.record);
}

int cmd_forecast(const Common& c) {
    const auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const auto o = single(c, cfg, dar::TrialStage::diagnose);
    if (o.record.ok) {
        std::ofstream f(dir / "forecast.csv");
        f << "t,predicted,truth\n";
        f.precision(17);
        for (Eigen::Index t = 0; t < o.predicted.rows(); ++t) {
            f << t << ',' << o.predicted(t, 0) << ',' << o.truth(t, 0) << '\n';
        }
        write_json(dar::record_to_json(o.record), dir / "metrics.json");
        for (const auto& [h, v] : o.record.mse) std::cout << "mse@" << h << "=" << v << ' ';
        std::cout << "hausdorff=" << o.record.hausdorff << (o.record.diverged ? " (diverged)" : "") << '\n';
    }
    return finish(o.record);
}

int cmd_diagnose(const Common& c) {
    const auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const auto o = single(c, cfg, dar::TrialStage::diagnose);
    if (o.record.ok) {
        write_json(dar::geometry_to_json(o.geometry), dir / "geometry.json");
        dar::write_cone_histogram_csv(dar::cone_histogram(o.geometry.cone.angles), dir / "cone_hist.csv");
        write_json(dar::ridge_modes_to_json(o.modes, cfg.readout.lambda), dir / "ridge_modes.json");
        if (c.dump_states) dar::write_matrix_csv(o.trajectory.states.transpose(), dir / "states.csv");
        std::cout << "median cone angle " << o.record.cone_median_deg << " deg, leakage "
                  << o.record.leakage_norm << " <= " << o.record.leakage_bound
                  << (o.record.leakage_pass ? " ok" : " VIOLATED") << '\n';
    }
    return finish(o.record);
}

void print_cells(const dar::SweepResult& s) {
    std::printf("%6s %-16s %6s %6s %12s %12s %12s %12s\n", "N", "kind", "ok", "fail", "mse100_mean", "p10", "p50",
                "p90");
    for (const auto& c : s.cells) {
        const auto it = c.mse.find(100);
        const dar::Stats st = it != c.mse.end() ? it->second : dar::Stats{};
        std::printf("%6zu %-16s %6zu %6zu %12.6g %12.6g %12.6g %12.6g\n", c.N, std::string(dar::to_string(c.kind)).c_str(),
                    c.trials - c.failures, c.failures, st.mean, st.p10, st.p50, st.p90);
    }
}

int report_and_exit(const dar::ExperimentConfig& cfg, const dar::SweepResult& s, const fs::path& dir) {
    dar::emit_report(cfg, s, dir);
    std::ofstream records(dir / "records.jsonl");
    for (const auto& t : s.trials) records << dar::record_to_json(t.record).dump() << '\n';
    print_cells(s);
    std::cout << "report written to " << dir.string() << '\n';
    if (!s.all_ok()) {
        std::cerr << "some trials failed or violated asserted invariants\n";
        return 1;
    }
    return 0;
}

int cmd_run(const Common& c) {
    const auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const auto s = dar::run_sweep(cfg, {cfg.reservoir.N}, cfg.trials, c.workers);
    return report_and_exit(cfg, s, dir);
}

int cmd_sweep(const Common& c) {
    auto cfg = resolve(c);
    const fs::path dir = out_dir(c);
    const auto& sizes = c.full ? cfg.sweep.full_sizes : cfg.sweep.sizes;
    const std::size_t trials = c.full && !c.trials ? cfg.sweep.full_trials : cfg.trials;
    cfg.trials = trials;
    const auto s = dar::run_sweep(cfg, sizes, trials, c.workers);
    return report_and_exit(cfg, s, dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-aligned reservoir design, training and forecasting"};
    app.require_subcommand(1);
    Common c;

    const auto add_common = [&c](CLI::App* sub) {
        sub->add_option("--config", c.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--preset", c.preset, "Built-in config when --config is absent")
            ->check(CLI::IsMember({"lorenz", "mackey_glass", "logistic"}));
        sub->add_option("--seed", c.seed, "Master seed (overrides the config)");
        sub->add_option("--out", c.out, "Output directory");
        sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--full", c.full, "Paper-scale sweep sizes and trial count");
    };
    const auto add_trial = [&c](CLI::App* sub) {
        sub->add_option("--index", c.index, "Trial index");
        sub->add_option("--kind", c.kind, "Connectivity kind")
            ->check(CLI::IsMember({"designed", "random", "block_invariant"}));
        sub->add_option("--series", c.series, "Input series CSV instead of the generator")->check(CLI::ExistingFile);
    };

    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const Common&);
        bool trial;
    };
    const Entry entries[] = {
        {"generate", "Generate the benchmark signal", cmd_generate, false},
        {"design", "Build the connectivity matrix", cmd_design, true},
        {"train", "Train the readout", cmd_train, true},
        {"forecast", "Closed-loop forecast and error metrics", cmd_forecast, true},
        {"diagnose", "Geometric diagnostics and theorem checks", cmd_diagnose, true},
        {"run", "Seeded trials for every B kind at the configured N", cmd_run, false},
        {"sweep", "Trials over a range of reservoir sizes", cmd_sweep, false},
    };
    int (*selected)(const Common&) = nullptr;
    for (const auto& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        add_common(sub);
        if (e.trial) add_trial(sub);
        if (std::string(e.name) == "generate") sub->add_option("--index", c.index, "Trial index (signal redraw)");
        if (std::string(e.name) == "diagnose") sub->add_flag("--dump-states", c.dump_states, "Also write states.csv");
        if (std::string(e.name) == "run" || std::string(e.name) == "sweep") {
            sub->add_option("--trials", c.trials, "Trials per cell (overrides the config)");
        }
        sub->callback([&selected, fn = e.fn]() { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        return selected(c);
    } catch (const dar::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
