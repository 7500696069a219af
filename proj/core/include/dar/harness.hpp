#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dar/config.hpp"
#include "dar/design.hpp"
#include "dar/diagnostics.hpp"
#include "dar/mlp.hpp"
#include "dar/reservoir.hpp"
#include "dar/ridge.hpp"
#include "dar/signals.hpp"

namespace dar {

/// Raw generator output for the configured source (all channels).
TimeSeries generate_signal(const ExperimentConfig& cfg, std::size_t trial_index = 0);

/// Selected channel, centred and optionally standardised: the reservoir input.
TimeSeries prepare_input(const ExperimentConfig& cfg, std::size_t trial_index = 0);

/// Seed of trial `index`; every random stream of the trial is a labelled child of it.
std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t index);

struct TrialRecord {
    std::string benchmark;
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    BKind kind = BKind::designed;
    std::size_t N = 0;
    std::string readout;
    bool ok = false;
    std::string failed_stage;
    std::string error;

    std::map<std::size_t, double> mse;
    double hausdorff = 0.0;
    double validation_mse = 0.0;
    bool diverged = false;
    std::size_t diverged_step = 0;

    double score = 0.0;
    double training_error = 0.0;
    double target_energy = 0.0;
    double identity_residual = 0.0;
    bool identity_pass = false;
    double mode_entropy = 0.0;

    Eigen::Index spine_d = 0;
    double variance_captured = 0.0;
    double measured_leakage = 0.0;
    double orthogonality_defect = 0.0;

    double cone_median_deg = 0.0;
    double cone_fraction_at_theta = 0.0;
    double alpha = 0.0;
    double m_perp = 0.0;
    double leakage_norm = 0.0;
    double leakage_bound = 0.0;
    bool leakage_pass = false;
    double rho = 0.0;
    double delta = 0.0;
    std::size_t alignment_checked = 0;
    bool alignment_pass = false;
    bool alignment_degenerate = false;
    std::string gain_status;
    double gain_score = 0.0;
    double gain_bound = 0.0;
    double variance_ratio = 0.0;
    double m_delta = 0.0;
    double heuristic_ratio_median = 0.0;

    bool invariants_ok = false;
    double elapsed_seconds = 0.0;  // not part of the canonical JSON
};

/// Canonical record JSON. Timing is excluded so equal seeds give byte-identical output.
nlohmann::ordered_json record_to_json(const TrialRecord& r);

/// Everything a single trial produced, for the CLI subcommands that dump intermediates.
struct TrialOutputs {
    TrialRecord record;
    TimeSeries input;
    SplitRanges ranges;
    ReservoirParams params;
    SpineBasis spine;
    std::optional<DarResult> design;
    StateTrajectory trajectory;
    std::optional<RidgeReadout> ridge;
    std::optional<MlpTrainResult> nn;
    std::vector<RidgeMode> modes;
    GeometryReport geometry;
    Matrix predicted;  // horizon x 1, original units
    Matrix truth;
};

/// Last stage a trial runs through.
enum class TrialStage { design, train, forecast, diagnose };

/// Runs generate, design (or random B), drive, train, forecast and diagnose.
/// Stage errors are caught and recorded; `shared_input` skips signal generation.
TrialOutputs run_trial_detailed(const ExperimentConfig& cfg, std::size_t index, BKind kind,
                                const TimeSeries* shared_input = nullptr, TrialStage last = TrialStage::diagnose);

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t index, BKind kind,
                      const TimeSeries* shared_input = nullptr);

/// Light per-trial output kept by sweeps.
struct TrialSummary {
    TrialRecord record;
    std::vector<std::size_t> cone_hist;  // 90 one-degree bins
    std::vector<double> mode_weights;    // ridge-mode contributions normalised to sum 1
};

struct Stats {
    std::size_t count = 0;
    double mean = 0.0;
    double p10 = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
};

/// Percentile with linear interpolation between order statistics, q in [0, 1].
double percentile(std::vector<double> values, double q);
/// Statistics over finite values only.
Stats describe(const std::vector<double>& values);

struct CellSummary {
    std::size_t N = 0;
    BKind kind = BKind::designed;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t diverged = 0;
    std::size_t invariant_failures = 0;
    std::map<std::size_t, Stats> mse;
    Stats hausdorff;
    Stats cone_median_deg;
    Stats mode_entropy;
};

struct SweepResult {
    std::vector<TrialSummary> trials;  // ordered by (N, trial_index, kind)
    std::vector<CellSummary> cells;    // ordered by (N, kind)
    [[nodiscard]] bool all_ok() const;
};

/// Every (N, trial, kind) combination on a pool of `workers` threads. Output is independent of
/// the worker count.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes, std::size_t trials,
                      std::size_t workers);

nlohmann::ordered_json cell_to_json(const CellSummary& c);

}  // namespace dar
