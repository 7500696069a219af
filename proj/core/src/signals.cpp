#include "dar/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "dar/error.hpp"

namespace dar {

std::string_view to_string(SignalSource s) {
    switch (s) {
        case SignalSource::lorenz: return "lorenz";
        case SignalSource::mackey_glass: return "mackey_glass";
        case SignalSource::logistic: return "logistic";
        case SignalSource::file: return "file";
    }
    return "file";
}

SignalSource signal_source_from_string(std::string_view name) {
    if (name == "lorenz") return SignalSource::lorenz;
    if (name == "mackey_glass") return SignalSource::mackey_glass;
    if (name == "logistic") return SignalSource::logistic;
    if (name == "file") return SignalSource::file;
    throw InvalidArgument("unknown signal source '" + std::string(name) + "'");
}

TimeSeries make_series(Matrix values, double dt, SignalSource source) {
    TimeSeries s;
    const auto c = values.cols();
    s.values = std::move(values);
    s.dt = dt;
    s.source = source;
    s.offset = Vector::Zero(c);
    s.scale = Vector::Ones(c);
    return s;
}

TimeSeries TimeSeries::channel(std::size_t c) const {
    if (c >= channels()) {
        throw InvalidArgument("TimeSeries::channel: index out of range");
    }
    const auto ci = static_cast<Eigen::Index>(c);
    TimeSeries out = make_series(values.col(ci), dt, source);
    out.offset(0) = offset(ci);
    out.scale(0) = scale(ci);
    return out;
}

Matrix TimeSeries::to_original_units(const Eigen::Ref<const Matrix>& normalised) const {
    if (normalised.cols() != values.cols()) {
        throw InvalidArgument("to_original_units: channel count mismatch");
    }
    Matrix out = normalised;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        out.col(c) = out.col(c).array() * scale(c) + offset(c);
    }
    return out;
}

std::array<double, 3> lorenz_rk4_step(const std::array<double, 3>& x, double dt, const LorenzParams& p) {
    const auto f = [&p](const std::array<double, 3>& v) {
        return std::array<double, 3>{p.sigma * (v[1] - v[0]), v[0] * (p.rho - v[2]) - v[1],
                                     v[0] * v[1] - p.beta * v[2]};
    };
    const auto axpy = [](const std::array<double, 3>& a, double h, const std::array<double, 3>& k) {
        return std::array<double, 3>{a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2]};
    };
    const auto k1 = f(x);
    const auto k2 = f(axpy(x, 0.5 * dt, k1));
    const auto k3 = f(axpy(x, 0.5 * dt, k2));
    const auto k4 = f(axpy(x, dt, k3));
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

TimeSeries gen_lorenz(const std::array<double, 3>& x0, double dt, std::size_t steps, const LorenzParams& params) {
    if (!(dt > 0.0)) throw InvalidArgument("gen_lorenz: dt must be positive");
    if (steps < 1) throw InvalidArgument("gen_lorenz: steps must be at least 1");

    Matrix values(static_cast<Eigen::Index>(steps), 3);
    std::array<double, 3> x = x0;
    for (std::size_t t = 0; t < steps; ++t) {
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
            throw DivergenceError("gen_lorenz: trajectory became non-finite", t);
        }
        const auto ti = static_cast<Eigen::Index>(t);
        values(ti, 0) = x[0];
        values(ti, 1) = x[1];
        values(ti, 2) = x[2];
        x = lorenz_rk4_step(x, dt, params);
    }
    return make_series(std::move(values), dt, SignalSource::lorenz);
}

TimeSeries gen_mackey_glass(std::size_t steps, const MackeyGlassParams& p) {
    if (steps < 1) throw InvalidArgument("gen_mackey_glass: steps must be at least 1");
    if (!(p.dt_internal > 0.0)) throw InvalidArgument("gen_mackey_glass: dt_internal must be positive");
    if (p.subsample < 1) throw InvalidArgument("gen_mackey_glass: subsample must be at least 1");
    const double ratio = p.tau / p.dt_internal;
    const double lag_rounded = std::round(ratio);
    if (lag_rounded < 1.0 || std::abs(ratio - lag_rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidArgument("gen_mackey_glass: tau/dt_internal must be a positive integer");
    }
    const auto lag = static_cast<std::size_t>(lag_rounded);

    // ring[head] holds x(t - tau) at the current internal step.
    std::vector<double> ring(lag, p.history);
    std::size_t head = 0;
    double x = p.history;

    const std::size_t total = p.discard + steps;
    Matrix values(static_cast<Eigen::Index>(steps), 1);
    std::size_t emitted = 0;
    for (std::size_t i = 0; emitted < total; ++i) {
        if (i % p.subsample == 0) {
            if (emitted >= p.discard) {
                values(static_cast<Eigen::Index>(emitted - p.discard), 0) = x;
            }
            ++emitted;
            if (emitted == total) break;
        }
        const double delayed = ring[head];
        const double dx = p.beta * delayed / (1.0 + std::pow(delayed, p.exponent)) - p.alpha * x;
        ring[head] = x;
        head = (head + 1) % lag;
        x += p.dt_internal * dx;
        if (!std::isfinite(x)) {
            throw DivergenceError("gen_mackey_glass: integration became non-finite", i);
        }
    }
    return make_series(std::move(values), p.dt_internal * static_cast<double>(p.subsample),
                       SignalSource::mackey_glass);
}

TimeSeries gen_logistic(double u0, std::size_t steps, std::size_t discard) {
    if (!(u0 > 0.0 && u0 < 1.0)) throw InvalidArgument("gen_logistic: u0 must lie in (0, 1)");
    if (steps < 1) throw InvalidArgument("gen_logistic: steps must be at least 1");
    double u = u0;
    for (std::size_t i = 0; i < discard; ++i) {
        u = 4.0 * u * (1.0 - u);
    }
    Matrix values(static_cast<Eigen::Index>(steps), 1);
    for (std::size_t t = 0; t < steps; ++t) {
        values(static_cast<Eigen::Index>(t), 0) = u;
        u = 4.0 * u * (1.0 - u);
    }
    return make_series(std::move(values), 1.0, SignalSource::logistic);
}

TimeSeries center(const TimeSeries& series) {
    if (series.length() == 0) throw InvalidArgument("center: empty series");
    TimeSeries out = series;
    for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
        const double mean = out.values.col(c).mean();
        out.values.col(c).array() -= mean;
        // Fold into the recorded affine map: original = v*scale + offset.
        out.offset(c) += mean * out.scale(c);
    }
    return out;
}

TimeSeries standardize(const TimeSeries& series) {
    if (series.length() == 0) throw InvalidArgument("standardize: empty series");
    TimeSeries out = series;
    for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
        const double mean = out.values.col(c).mean();
        const double sd = std::sqrt((out.values.col(c).array() - mean).square().mean());
        if (!(sd > 0.0)) {
            throw NumericalError("standardize: channel " + std::to_string(c) + " has zero variance");
        }
        out.values.col(c) /= sd;
        out.scale(c) *= sd;
    }
    return out;
}

SplitRanges split(std::size_t length, const SplitSpec& spec) {
    if (spec.total() > length) {
        throw InvalidArgument("split: spec needs " + std::to_string(spec.total()) + " samples but series has " +
                              std::to_string(length));
    }
    SplitRanges r;
    std::size_t at = 0;
    r.washout = {at, at + spec.washout};
    at += spec.washout;
    r.train = {at, at + spec.train};
    at += spec.train;
    r.validation = {at, at + spec.validation};
    at += spec.validation;
    r.test = {at, at + spec.test};
    return r;
}

void write_series_csv(const TimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << "t";
    for (std::size_t c = 0; c < series.channels(); ++c) out << ",u" << c;
    out << '\n';
    out.precision(17);
    for (Eigen::Index t = 0; t < series.values.rows(); ++t) {
        out << static_cast<double>(t) * series.dt;
        for (Eigen::Index c = 0; c < series.values.cols(); ++c) out << ',' << series.values(t, c);
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,u0", 0) != 0) {
        throw InvalidArgument("read_series_csv: expected header 't,u0[,u1,...]' in '" + path.string() + "'");
    }
    const auto channels = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<double> times;
    std::vector<double> flat;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidArgument("read_series_csv: bad number '" + cell + "' on data row " +
                                      std::to_string(row));
            }
        }
        if (cells.size() != channels + 1) {
            throw InvalidArgument("read_series_csv: wrong column count on data row " + std::to_string(row));
        }
        times.push_back(cells[0]);
        flat.insert(flat.end(), cells.begin() + 1, cells.end());
    }
    if (times.empty()) throw InvalidArgument("read_series_csv: no data rows");
    Matrix values(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(channels));
    for (std::size_t t = 0; t < times.size(); ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = flat[t * channels + c];
        }
    }
    require_finite(values, "read_series_csv");
    const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    return make_series(std::move(values), dt > 0.0 ? dt : 1.0, SignalSource::file);
}

}  // namespace dar
