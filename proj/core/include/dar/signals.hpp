#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "dar/numerics.hpp"

namespace dar {

enum class SignalSource { lorenz, mackey_glass, logistic, file };

std::string_view to_string(SignalSource s);
SignalSource signal_source_from_string(std::string_view name);

/// A sampled signal. Row t of `values` is the sample at time t * dt; one column per channel.
///
/// `offset` and `scale` record the affine normalisation applied so far: the
/// original signal is `values * scale + offset`, channel-wise.
struct TimeSeries {
    Matrix values;
    double dt = 1.0;
    SignalSource source = SignalSource::file;
    Vector offset;
    Vector scale;

    [[nodiscard]] std::size_t length() const { return static_cast<std::size_t>(values.rows()); }
    [[nodiscard]] std::size_t channels() const { return static_cast<std::size_t>(values.cols()); }

    /// Single-channel view of channel c as a new series (normalisation carried over).
    [[nodiscard]] TimeSeries channel(std::size_t c) const;

    /// Undo the recorded normalisation on a block of rows in normalised units.
    [[nodiscard]] Matrix to_original_units(const Eigen::Ref<const Matrix>& normalised) const;
};

/// Builds a series from raw values with identity normalisation.
TimeSeries make_series(Matrix values, double dt, SignalSource source);

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

/// One classical RK4 step of the Lorenz system.
std::array<double, 3> lorenz_rk4_step(const std::array<double, 3>& x, double dt, const LorenzParams& p);

/// Lorenz trajectory by fixed-step RK4. Row 0 is x0; `steps` rows, three channels.
TimeSeries gen_lorenz(const std::array<double, 3>& x0, double dt, std::size_t steps,
                      const LorenzParams& params = {});

struct MackeyGlassParams {
    double beta = 0.2;
    double alpha = 0.1;
    double exponent = 10.0;
    double tau = 17.0;
    double history = 1.2;        // constant initial history over the delay window
    double dt_internal = 0.1;
    std::size_t subsample = 10;  // output every `subsample` internal steps
    std::size_t discard = 1000;  // output samples dropped as transient
};

/// Mackey-Glass series by explicit Euler with a delay ring buffer of length tau/dt_internal.
TimeSeries gen_mackey_glass(std::size_t steps, const MackeyGlassParams& params = {});

/// Fully chaotic logistic map u <- 4u(1-u). Row 0 is the state after `discard` iterations of u0.
TimeSeries gen_logistic(double u0, std::size_t steps, std::size_t discard = 0);

/// Subtracts the per-channel empirical mean.
TimeSeries center(const TimeSeries& series);

/// Divides each channel by its empirical standard deviation (population convention).
TimeSeries standardize(const TimeSeries& series);

struct SplitSpec {
    std::size_t washout = 0;
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;

    [[nodiscard]] std::size_t total() const { return washout + train + validation + test; }
};

/// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const { return end - begin; }
    bool operator==(const IndexRange&) const = default;
};

struct SplitRanges {
    IndexRange washout;
    IndexRange train;
    IndexRange validation;
    IndexRange test;
};

/// Contiguous, ordered, disjoint ranges. Throws when the spec overflows `length`.
SplitRanges split(std::size_t length, const SplitSpec& spec);

/// CSV with header `t,u0[,u1,...]`, one row per sample; t is the sample time.
void write_series_csv(const TimeSeries& series, const std::filesystem::path& path);
TimeSeries read_series_csv(const std::filesystem::path& path);

}  // namespace dar
