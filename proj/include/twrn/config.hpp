#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twrn/errors.hpp"
#include "twrn/estimators.hpp"
#include "twrn/signal_model.hpp"

namespace twrn {

using json = nlohmann::ordered_json;

enum class ExperimentKind { kMse, kBer, kCrlbOnly, kComplexity };
enum class EstimatorKind { kMl, kDe };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kMse: return "mse";
        case ExperimentKind::kBer: return "ber";
        case ExperimentKind::kCrlbOnly: return "crlb-only";
        case ExperimentKind::kComplexity: return "complexity";
    }
    throw ConfigError("unknown experiment kind");
}

inline ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "mse") return ExperimentKind::kMse;
    if (s == "ber") return ExperimentKind::kBer;
    if (s == "crlb-only") return ExperimentKind::kCrlbOnly;
    if (s == "complexity") return ExperimentKind::kComplexity;
    throw ConfigError("unknown experiment kind: " + s);
}

inline std::string to_string(EstimatorKind k) {
    return k == EstimatorKind::kMl ? "ml" : "de";
}

inline EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "ml") return EstimatorKind::kMl;
    if (s == "de") return EstimatorKind::kDe;
    throw ConfigError("unknown estimator kind: " + s);
}

/// Optional coarse-then-refine schedule for the exhaustive estimator. The
/// full-resolution grid is prohibitively large for routine runs, so the
/// campaign first scans a coarse grid and then re-searches a small box
/// around the incumbent at the configured fine steps.
struct TwoStageSpec {
    bool enabled = true;
    double coarse_tau_step = 0.05;
    double coarse_nu_step = 1e-3;
    double refine_radius_tau = 0.05;
    double refine_radius_nu = 1e-3;

    void validate() const {
        if (!(coarse_tau_step > 0.0) || !(coarse_nu_step > 0.0) ||
            !(refine_radius_tau > 0.0) || !(refine_radius_nu > 0.0))
            throw ConfigError("two-stage grid parameters must be positive");
    }
};

/// Full description of one experiment run. Defaults reproduce the reference
/// campaign: L_t = 80 training / L_d = 400 data symbols, Q = 2, both noise
/// variances 1/SNR, offsets uniform on (-0.5, 0.5), unit-variance Rayleigh
/// gains, 600 frames per SNR point.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::kMse;
    std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45};
    int frames = 600;
    int training_length = 80;
    int data_length = 400;
    int oversampling = 2;
    double rolloff = 0.3;
    double span = 6.0;
    EstimatorKind estimator = EstimatorKind::kDe;
    GridSpec grid;
    DeConfig de;
    TwoStageSpec two_stage;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool keep_trials = false;
    bool noiseless = false;
    double sigma_h2 = 1.0;
    int threads = 0;  // 0 = use hardware concurrency

    ModelGeometry geometry() const { return {oversampling, rolloff, span}; }

    void validate() const {
        if (snr_db.empty()) throw ConfigError("snr_db list must not be empty");
        if (frames < 1) throw ConfigError("frames must be >= 1");
        if (training_length < 2) throw ConfigError("training_length must be >= 2");
        if (data_length < 1) throw ConfigError("data_length must be >= 1");
        if (oversampling < 2) throw ConfigError("oversampling must be >= 2");
        if (!(rolloff > 0.0) || rolloff > 1.0) throw ConfigError("rolloff must lie in (0, 1]");
        if (!(span >= 1.0)) throw ConfigError("span must be >= 1");
        if (!(sigma_h2 > 0.0)) throw ConfigError("sigma_h2 must be positive");
        if (threads < 0) throw ConfigError("threads must be >= 0");
        grid.validate();
        de.validate();
        two_stage.validate();
    }
};

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["snr_db"] = c.snr_db;
    j["frames"] = c.frames;
    j["training_length"] = c.training_length;
    j["data_length"] = c.data_length;
    j["oversampling"] = c.oversampling;
    j["rolloff"] = c.rolloff;
    j["span"] = c.span;
    j["estimator"] = to_string(c.estimator);
    j["grid"] = {{"tau_step", c.grid.tau_step},
                 {"nu_step", c.grid.nu_step},
                 {"tau_lo", c.grid.box.tau_lo},
                 {"tau_hi", c.grid.box.tau_hi},
                 {"nu_lo", c.grid.box.nu_lo},
                 {"nu_hi", c.grid.box.nu_hi}};
    j["de"] = {{"population", c.de.population},
               {"weight", c.de.weight},
               {"crossover", c.de.crossover},
               {"max_generations", c.de.max_generations},
               {"tolerance", c.de.tolerance},
               {"seed", c.de.seed}};
    j["two_stage"] = {{"enabled", c.two_stage.enabled},
                      {"coarse_tau_step", c.two_stage.coarse_tau_step},
                      {"coarse_nu_step", c.two_stage.coarse_nu_step},
                      {"refine_radius_tau", c.two_stage.refine_radius_tau},
                      {"refine_radius_nu", c.two_stage.refine_radius_nu}};
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["keep_trials"] = c.keep_trials;
    j["noiseless"] = c.noiseless;
    j["sigma_h2"] = c.sigma_h2;
    j["threads"] = c.threads;
    return j;
}

namespace detail {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& item : j.items()) {
        bool found = false;
        for (const char* k : known) found = found || (item.key() == k);
        if (!found)
            throw ConfigError("unknown config key '" + item.key() + "' in " + where);
    }
}

} // namespace detail

/// Parses a config object. Missing fields keep their defaults; unknown keys
/// are rejected. A metadata file produced by emit_metadata can be fed back
/// verbatim: its "config" object is used and the surrounding bookkeeping
/// ignored.
inline ExperimentConfig config_from_json(const json& root) {
    const json& j = root.contains("config") ? root.at("config") : root;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown_keys(
        j,
        {"experiment", "snr_db", "frames", "training_length", "data_length",
         "oversampling", "rolloff", "span", "estimator", "grid", "de", "two_stage",
         "seed", "out_dir", "keep_trials", "noiseless", "sigma_h2", "threads"},
        "config");

    ExperimentConfig c;
    if (j.contains("experiment"))
        c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    detail::read_field(j, "snr_db", c.snr_db);
    detail::read_field(j, "frames", c.frames);
    detail::read_field(j, "training_length", c.training_length);
    detail::read_field(j, "data_length", c.data_length);
    detail::read_field(j, "oversampling", c.oversampling);
    detail::read_field(j, "rolloff", c.rolloff);
    detail::read_field(j, "span", c.span);
    if (j.contains("estimator"))
        c.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        detail::reject_unknown_keys(
            g, {"tau_step", "nu_step", "tau_lo", "tau_hi", "nu_lo", "nu_hi"}, "grid");
        detail::read_field(g, "tau_step", c.grid.tau_step);
        detail::read_field(g, "nu_step", c.grid.nu_step);
        detail::read_field(g, "tau_lo", c.grid.box.tau_lo);
        detail::read_field(g, "tau_hi", c.grid.box.tau_hi);
        detail::read_field(g, "nu_lo", c.grid.box.nu_lo);
        detail::read_field(g, "nu_hi", c.grid.box.nu_hi);
    }
    if (j.contains("de")) {
        const json& d = j.at("de");
        detail::reject_unknown_keys(
            d, {"population", "weight", "crossover", "max_generations", "tolerance", "seed"},
            "de");
        detail::read_field(d, "population", c.de.population);
        detail::read_field(d, "weight", c.de.weight);
        detail::read_field(d, "crossover", c.de.crossover);
        detail::read_field(d, "max_generations", c.de.max_generations);
        detail::read_field(d, "tolerance", c.de.tolerance);
        detail::read_field(d, "seed", c.de.seed);
    }
    if (j.contains("two_stage")) {
        const json& t = j.at("two_stage");
        detail::reject_unknown_keys(t,
                                    {"enabled", "coarse_tau_step", "coarse_nu_step",
                                     "refine_radius_tau", "refine_radius_nu"},
                                    "two_stage");
        detail::read_field(t, "enabled", c.two_stage.enabled);
        detail::read_field(t, "coarse_tau_step", c.two_stage.coarse_tau_step);
        detail::read_field(t, "coarse_nu_step", c.two_stage.coarse_nu_step);
        detail::read_field(t, "refine_radius_tau", c.two_stage.refine_radius_tau);
        detail::read_field(t, "refine_radius_nu", c.two_stage.refine_radius_nu);
    }
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "out_dir", c.out_dir);
    detail::read_field(j, "keep_trials", c.keep_trials);
    detail::read_field(j, "noiseless", c.noiseless);
    detail::read_field(j, "sigma_h2", c.sigma_h2);
    detail::read_field(j, "threads", c.threads);
    c.validate();
    return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

} // namespace twrn
