#include "dar/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "dar/error.hpp"

namespace dar {

std::string_view to_string(BKind k) {
    switch (k) {
        case BKind::designed: return "designed";
        case BKind::random: return "random";
        case BKind::block_invariant: return "block_invariant";
    }
    return "designed";
}

BKind b_kind_from_string(std::string_view name) {
    if (name == "designed") return BKind::designed;
    if (name == "random") return BKind::random;
    if (name == "block_invariant") return BKind::block_invariant;
    throw InvalidArgument("unknown B kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    design.validate();
    readout.nn.validate();
    if (reservoir.N < 1) throw InvalidArgument("config: reservoir.N must be at least 1");
    if (!(reservoir.beta > 0.0 && reservoir.beta < 1.0)) throw InvalidArgument("config: reservoir.beta must lie in (0, 1)");
    if (readout.kind != "ridge" && readout.kind != "nn") throw InvalidArgument("config: readout.kind must be ridge or nn");
    if (!(readout.lambda > 0.0)) throw InvalidArgument("config: readout.lambda must be positive");
    if (split.train <= sub_washout + 1) throw InvalidArgument("config: train range too short after sub_washout");
    if (split.washout + split.train + split.validation + split.test > signal.length) {
        throw InvalidArgument("config: split needs more samples than signal.length");
    }
    if (trials < 1) throw InvalidArgument("config: trials must be at least 1");
    if (b_kinds.empty()) throw InvalidArgument("config: b_kinds must not be empty");
    if (forecast.embed_dim < 1) throw InvalidArgument("config: forecast.embed_dim must be at least 1");
    for (std::size_t h : forecast.horizons) {
        if (h == 0 || h > split.test) throw InvalidArgument("config: forecast horizons must lie in [1, split.test]");
    }
    if (forecast.hausdorff_window > split.test) {
        throw InvalidArgument("config: forecast.hausdorff_window exceeds split.test");
    }
}

ExperimentConfig preset_lorenz() { return ExperimentConfig{}; }

ExperimentConfig preset_mackey_glass() {
    ExperimentConfig c;
    c.name = "mackey_glass";
    c.signal.source = SignalSource::mackey_glass;
    c.signal.length = 15000;
    c.forecast.embed_delay = 1;
    return c;
}

ExperimentConfig preset_logistic() {
    ExperimentConfig c;
    c.name = "logistic";
    c.signal.source = SignalSource::logistic;
    c.signal.length = 15000;
    c.forecast.embed_delay = 1;
    return c;
}

ExperimentConfig preset(std::string_view name) {
    if (name == "lorenz") return preset_lorenz();
    if (name == "mackey_glass") return preset_mackey_glass();
    if (name == "logistic") return preset_logistic();
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

namespace {

using json = nlohmann::json;

void only_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& path) {
    if (!j.is_object()) throw InvalidArgument("config: '" + path + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InvalidArgument("config: unknown key '" + (path.empty() ? key : path + "." + key) + "'");
        }
    }
}

template <typename T>
void take(const json& j, const char* key, T& out, const std::string& path) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument("config: bad value for '" + path + (path.empty() ? "" : ".") + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    only_keys(j,
              {"preset", "name", "signal", "split", "sub_washout", "reservoir", "design", "readout", "forecast",
               "diagnostics", "b_kinds", "seed", "trials", "sweep"},
              "");
    std::string base = "lorenz";
    take(j, "preset", base, "");
    ExperimentConfig c = preset(base);
    take(j, "name", c.name, "");

    if (j.contains("signal")) {
        const json& s = j["signal"];
        only_keys(s,
                  {"source", "length", "dt", "x0", "lorenz", "mackey_glass", "logistic_u0", "logistic_discard", "file",
                   "channel", "standardize", "redraw_per_trial"},
                  "signal");
        std::string src(to_string(c.signal.source));
        take(s, "source", src, "signal");
        c.signal.source = signal_source_from_string(src);
        take(s, "length", c.signal.length, "signal");
        take(s, "dt", c.signal.dt, "signal");
        take(s, "x0", c.signal.x0, "signal");
        if (s.contains("lorenz")) {
            const json& l = s["lorenz"];
            only_keys(l, {"sigma", "rho", "beta"}, "signal.lorenz");
            take(l, "sigma", c.signal.lorenz.sigma, "signal.lorenz");
            take(l, "rho", c.signal.lorenz.rho, "signal.lorenz");
            take(l, "beta", c.signal.lorenz.beta, "signal.lorenz");
        }
        if (s.contains("mackey_glass")) {
            const json& m = s["mackey_glass"];
            only_keys(m, {"beta", "alpha", "exponent", "tau", "history", "dt_internal", "subsample", "discard"},
                      "signal.mackey_glass");
            auto& p = c.signal.mackey_glass;
            take(m, "beta", p.beta, "signal.mackey_glass");
            take(m, "alpha", p.alpha, "signal.mackey_glass");
            take(m, "exponent", p.exponent, "signal.mackey_glass");
            take(m, "tau", p.tau, "signal.mackey_glass");
            take(m, "history", p.history, "signal.mackey_glass");
            take(m, "dt_internal", p.dt_internal, "signal.mackey_glass");
            take(m, "subsample", p.subsample, "signal.mackey_glass");
            take(m, "discard", p.discard, "signal.mackey_glass");
        }
        take(s, "logistic_u0", c.signal.logistic_u0, "signal");
        take(s, "logistic_discard", c.signal.logistic_discard, "signal");
        take(s, "file", c.signal.file, "signal");
        take(s, "channel", c.signal.channel, "signal");
        take(s, "standardize", c.signal.standardize, "signal");
        take(s, "redraw_per_trial", c.signal.redraw_per_trial, "signal");
    }
    if (j.contains("split")) {
        const json& s = j["split"];
        only_keys(s, {"washout", "train", "validation", "test"}, "split");
        take(s, "washout", c.split.washout, "split");
        take(s, "train", c.split.train, "split");
        take(s, "validation", c.split.validation, "split");
        take(s, "test", c.split.test, "split");
    }
    take(j, "sub_washout", c.sub_washout, "");
    if (j.contains("reservoir")) {
        const json& r = j["reservoir"];
        only_keys(r, {"N", "beta", "activation", "input_scale", "feature_powers", "standardize_states"}, "reservoir");
        take(r, "N", c.reservoir.N, "reservoir");
        take(r, "beta", c.reservoir.beta, "reservoir");
        std::string act(to_string(c.reservoir.activation));
        take(r, "activation", act, "reservoir");
        c.reservoir.activation = activation_from_string(act);
        take(r, "input_scale", c.reservoir.input_scale, "reservoir");
        take(r, "feature_powers", c.reservoir.feature_powers, "reservoir");
        take(r, "standardize_states", c.reservoir.standardize_states, "reservoir");
    }
    if (j.contains("design")) {
        const json& d = j["design"];
        only_keys(d, {"variance_threshold", "fixed_d", "K", "windows", "gamma_mix"}, "design");
        take(d, "variance_threshold", c.design.variance_threshold, "design");
        if (d.contains("fixed_d")) {
            if (d["fixed_d"].is_null()) {
                c.design.fixed_d.reset();
            } else {
                Eigen::Index fd = 0;
                take(d, "fixed_d", fd, "design");
                c.design.fixed_d = fd;
            }
        }
        take(d, "K", c.design.block_depth, "design");
        take(d, "windows", c.design.windows, "design");
        take(d, "gamma_mix", c.design.gamma_mix, "design");
    }
    if (j.contains("readout")) {
        const json& r = j["readout"];
        only_keys(r, {"kind", "lambda", "nn"}, "readout");
        take(r, "kind", c.readout.kind, "readout");
        take(r, "lambda", c.readout.lambda, "readout");
        if (r.contains("nn")) {
            const json& n = r["nn"];
            only_keys(n,
                      {"hidden", "epochs", "batch_size", "learning_rate", "adam_beta1", "adam_beta2", "adam_eps",
                       "standardize_inputs"},
                      "readout.nn");
            auto& t = c.readout.nn;
            take(n, "hidden", t.hidden, "readout.nn");
            take(n, "epochs", t.epochs, "readout.nn");
            take(n, "batch_size", t.batch_size, "readout.nn");
            take(n, "learning_rate", t.learning_rate, "readout.nn");
            take(n, "adam_beta1", t.adam_beta1, "readout.nn");
            take(n, "adam_beta2", t.adam_beta2, "readout.nn");
            take(n, "adam_eps", t.adam_eps, "readout.nn");
            take(n, "standardize_inputs", t.standardize_inputs, "readout.nn");
        }
    }
    if (j.contains("forecast")) {
        const json& f = j["forecast"];
        only_keys(f, {"horizons", "hausdorff_window", "embed_dim", "embed_delay", "divergence_factor"}, "forecast");
        take(f, "horizons", c.forecast.horizons, "forecast");
        take(f, "hausdorff_window", c.forecast.hausdorff_window, "forecast");
        take(f, "embed_dim", c.forecast.embed_dim, "forecast");
        take(f, "embed_delay", c.forecast.embed_delay, "forecast");
        take(f, "divergence_factor", c.forecast.divergence_factor, "forecast");
    }
    if (j.contains("diagnostics")) {
        const json& d = j["diagnostics"];
        only_keys(d, {"theta_deg", "lambda0"}, "diagnostics");
        take(d, "theta_deg", c.diagnostics.theta_deg, "diagnostics");
        take(d, "lambda0", c.diagnostics.lambda0, "diagnostics");
    }
    if (j.contains("b_kinds")) {
        std::vector<std::string> kinds;
        take(j, "b_kinds", kinds, "");
        c.b_kinds.clear();
        for (const auto& k : kinds) c.b_kinds.push_back(b_kind_from_string(k));
    }
    take(j, "seed", c.seed, "");
    take(j, "trials", c.trials, "");
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        only_keys(s, {"sizes", "full_sizes", "full_trials"}, "sweep");
        take(s, "sizes", c.sweep.sizes, "sweep");
        take(s, "full_sizes", c.sweep.full_sizes, "sweep");
        take(s, "full_trials", c.sweep.full_trials, "sweep");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    auto& s = j["signal"];
    s["source"] = std::string(to_string(c.signal.source));
    s["length"] = c.signal.length;
    s["dt"] = c.signal.dt;
    s["x0"] = c.signal.x0;
    s["lorenz"] = {{"sigma", c.signal.lorenz.sigma}, {"rho", c.signal.lorenz.rho}, {"beta", c.signal.lorenz.beta}};
    const auto& mg = c.signal.mackey_glass;
    s["mackey_glass"] = {{"beta", mg.beta},       {"alpha", mg.alpha},           {"exponent", mg.exponent},
                         {"tau", mg.tau},         {"history", mg.history},       {"dt_internal", mg.dt_internal},
                         {"subsample", mg.subsample}, {"discard", mg.discard}};
    s["logistic_u0"] = c.signal.logistic_u0;
    s["logistic_discard"] = c.signal.logistic_discard;
    s["file"] = c.signal.file;
    s["channel"] = c.signal.channel;
    s["standardize"] = c.signal.standardize;
    s["redraw_per_trial"] = c.signal.redraw_per_trial;
    j["split"] = {{"washout", c.split.washout},
                  {"train", c.split.train},
                  {"validation", c.split.validation},
                  {"test", c.split.test}};
    j["sub_washout"] = c.sub_washout;
    auto& r = j["reservoir"];
    r["N"] = c.reservoir.N;
    r["beta"] = c.reservoir.beta;
    r["activation"] = std::string(to_string(c.reservoir.activation));
    r["input_scale"] = c.reservoir.input_scale;
    r["feature_powers"] = c.reservoir.feature_powers;
    r["standardize_states"] = c.reservoir.standardize_states;
    auto& d = j["design"];
    d["variance_threshold"] = c.design.variance_threshold;
    d["fixed_d"] = c.design.fixed_d ? nlohmann::ordered_json(*c.design.fixed_d) : nlohmann::ordered_json(nullptr);
    d["K"] = c.design.block_depth;
    d["windows"] = c.design.windows;
    d["gamma_mix"] = c.design.gamma_mix;
    auto& ro = j["readout"];
    ro["kind"] = c.readout.kind;
    ro["lambda"] = c.readout.lambda;
    const auto& nn = c.readout.nn;
    ro["nn"] = {{"hidden", nn.hidden},
                {"epochs", nn.epochs},
                {"batch_size", nn.batch_size},
                {"learning_rate", nn.learning_rate},
                {"adam_beta1", nn.adam_beta1},
                {"adam_beta2", nn.adam_beta2},
                {"adam_eps", nn.adam_eps},
                {"standardize_inputs", nn.standardize_inputs}};
    j["forecast"] = {{"horizons", c.forecast.horizons},
                     {"hausdorff_window", c.forecast.hausdorff_window},
                     {"embed_dim", c.forecast.embed_dim},
                     {"embed_delay", c.forecast.embed_delay},
                     {"divergence_factor", c.forecast.divergence_factor}};
    j["diagnostics"] = {{"theta_deg", c.diagnostics.theta_deg}, {"lambda0", c.diagnostics.lambda0}};
    auto kinds = nlohmann::ordered_json::array();
    for (BKind k : c.b_kinds) kinds.push_back(std::string(to_string(k)));
    j["b_kinds"] = kinds;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["sweep"] = {{"sizes", c.sweep.sizes}, {"full_sizes", c.sweep.full_sizes}, {"full_trials", c.sweep.full_trials}};
    return j;
}

}  // namespace dar
