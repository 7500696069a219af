#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dar/config.hpp"
#include "dar/harness.hpp"

namespace dar {

/// trials.csv header for the configured horizons, in the order rows are written:
/// benchmark, N, kind, trial_index, seed, status, failed_stage, mse_<h>..., hausdorff, validation_mse,
/// diverged, score, training_error, identity_residual, spine_d, measured_leakage, cone_median_deg, alpha,
/// leakage_norm, leakage_bound, leakage_pass, variance_ratio, mode_entropy, invariants_ok, elapsed_s.
std::vector<std::string> trials_csv_columns(const std::vector<std::size_t>& horizons);

void write_trials_csv(const SweepResult& sweep, const std::vector<std::size_t>& horizons,
                      const std::filesystem::path& path);

/// Counts of log10 weights in unit-width bins over [lo, 0); smaller weights land in the first bin.
std::vector<std::size_t> log_weight_histogram(const std::vector<double>& weights, int lo = -12);

/// Writes trials.csv, summary.json, cone_hist_<kind>_N<n>.csv, ridge_modes_<kind>_N<n>.csv and
/// plot_mse<h>_<kind>.csv (x = N, y = mean, ylo = p10, yhi = p90) into `dir`.
void emit_report(const ExperimentConfig& cfg, const SweepResult& sweep, const std::filesystem::path& dir);

}  // namespace dar
