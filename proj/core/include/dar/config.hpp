#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dar/design.hpp"
#include "dar/mlp.hpp"
#include "dar/reservoir.hpp"
#include "dar/signals.hpp"

namespace dar {

enum class BKind { designed, random, block_invariant };

std::string_view to_string(BKind k);
BKind b_kind_from_string(std::string_view name);

struct SignalConfig {
    SignalSource source = SignalSource::lorenz;
    std::size_t length = 16000;
    double dt = 0.01;                    // Lorenz integration step
    std::array<double, 3> x0{1.0, 1.0, 1.0};
    LorenzParams lorenz;
    MackeyGlassParams mackey_glass;
    double logistic_u0 = 0.3;
    std::size_t logistic_discard = 1000;
    std::string file;                    // series CSV when source == file
    std::size_t channel = 0;
    bool standardize = true;             // divide the centred input by its standard deviation
    bool redraw_per_trial = false;       // perturb the initial condition per trial
};

struct ReservoirConfig {
    std::size_t N = 100;
    double beta = 0.9785;
    Activation activation = Activation::tanh;
    double input_scale = 0.05;
    std::vector<int> feature_powers;     // empty: identity
    bool standardize_states = true;      // z-score states before the ridge solve
};

struct ReadoutConfig {
    std::string kind = "ridge";          // ridge | nn
    double lambda = 1e-2;
    TrainConfig nn;
};

struct ForecastConfig {
    std::vector<std::size_t> horizons{25, 50, 100, 400};
    std::size_t hausdorff_window = 2000;
    std::size_t embed_dim = 2;
    std::size_t embed_delay = 10;
    double divergence_factor = 1e3;
};

struct DiagnosticsConfig {
    double theta_deg = 30.0;
    double lambda0 = 1e-2;
};

struct SweepConfig {
    std::vector<std::size_t> sizes{100, 200, 300};
    std::vector<std::size_t> full_sizes{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    std::size_t full_trials = 500;
};

struct ExperimentConfig {
    std::string name = "lorenz";
    SignalConfig signal;
    SplitSpec split{1000, 9800, 2100, 2100};
    std::size_t sub_washout = 0;         // training pairs skipped at the start of the train range
    ReservoirConfig reservoir;
    DarConfig design;
    ReadoutConfig readout;
    ForecastConfig forecast;
    DiagnosticsConfig diagnostics;
    std::vector<BKind> b_kinds{BKind::designed, BKind::random};
    std::uint64_t seed = 20240601;
    std::size_t trials = 20;
    SweepConfig sweep;

    /// Throws InvalidArgument on inconsistent settings.
    void validate() const;
};

ExperimentConfig preset_lorenz();
ExperimentConfig preset_mackey_glass();
ExperimentConfig preset_logistic();
/// "lorenz", "mackey_glass" or "logistic".
ExperimentConfig preset(std::string_view name);

/// Starts from the preset named by the optional "preset" key (default lorenz) and applies
/// the remaining keys. Unknown keys are rejected with their dotted path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

}  // namespace dar
