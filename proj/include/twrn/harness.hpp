#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "twrn/config.hpp"
#include "twrn/crlb.hpp"
#include "twrn/errors.hpp"
#include "twrn/estimators.hpp"
#include "twrn/receiver.hpp"
#include "twrn/rng.hpp"
#include "twrn/signal_model.hpp"
#include "twrn/version.hpp"

namespace twrn {

/// One Monte Carlo trial: truth, estimate, per-parameter squared errors and
/// bounds, and the bit-error tallies of both receivers.
struct TrialRecord {
    int snr_index = 0;
    double snr_db = 0.0;
    int frame = 0;
    std::uint64_t sub_seed = 0;  // base of this frame's derived streams
    CombinedParams truth;
    EstimationResult estimate;
    double sqerr_alpha_1 = std::numeric_limits<double>::quiet_NaN();
    double sqerr_alpha_2 = std::numeric_limits<double>::quiet_NaN();
    double sqerr_tau_1 = std::numeric_limits<double>::quiet_NaN();
    double sqerr_tau_2 = std::numeric_limits<double>::quiet_NaN();
    double sqerr_nu_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_alpha_1 = std::numeric_limits<double>::quiet_NaN();
    double crlb_alpha_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_tau_1 = std::numeric_limits<double>::quiet_NaN();
    double crlb_tau_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_nu_2 = std::numeric_limits<double>::quiet_NaN();
    std::size_t bit_errors_est = 0;
    std::size_t bit_errors_benchmark = 0;
    std::size_t bits_total = 0;
};

struct SnrSummary {
    double snr_db = 0.0;
    double mse_alpha_1 = std::numeric_limits<double>::quiet_NaN();
    double mse_alpha_2 = std::numeric_limits<double>::quiet_NaN();
    double mse_tau_1 = std::numeric_limits<double>::quiet_NaN();
    double mse_tau_2 = std::numeric_limits<double>::quiet_NaN();
    double mse_nu_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_alpha_1 = std::numeric_limits<double>::quiet_NaN();
    double crlb_alpha_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_tau_1 = std::numeric_limits<double>::quiet_NaN();
    double crlb_tau_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_nu_2 = std::numeric_limits<double>::quiet_NaN();
    double ber_est = std::numeric_limits<double>::quiet_NaN();
    double ber_benchmark = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t evals = 0;
};

struct CampaignSummary {
    std::vector<SnrSummary> rows;
    std::vector<TrialRecord> trials;  // retained when keep_trials is set
};

namespace detail {

// Stream purposes for the documented sub-seed scheme:
// derive_seed(master, {purpose, snr_index, frame}).
enum StreamPurpose : std::uint64_t {
    kStreamTraining = 1,  // campaign-wide, snr/frame fixed to zero
    kStreamChannel = 2,
    kStreamOffsets = 3,
    kStreamNoiseTraining = 4,
    kStreamNoiseData = 5,
    kStreamDataUser1 = 6,
    kStreamDataUser2 = 7,
    kStreamDe = 8,
};

inline double open_uniform(Rng& rng, double lo, double hi) {
    double v = rng.uniform(lo, hi);
    while (!(v > lo && v < hi)) v = rng.uniform(lo, hi);
    return v;
}

/// Draws one frame's impairments: the estimable offsets uniform on the
/// admissible box, split into per-hop components so the full cascade model
/// (including the relay-path rotation of the noise) is exercised.
inline HopParams draw_hop(const ExperimentConfig& cfg, int snr_index, int frame) {
    Rng chan(derive_seed(cfg.seed, {kStreamChannel, static_cast<std::uint64_t>(snr_index),
                                    static_cast<std::uint64_t>(frame)}));
    Rng offs(derive_seed(cfg.seed, {kStreamOffsets, static_cast<std::uint64_t>(snr_index),
                                    static_cast<std::uint64_t>(frame)}));
    HopParams hop;
    hop.h_sr_1 = chan.complex_gaussian(cfg.sigma_h2);
    hop.h_sr_2 = chan.complex_gaussian(cfg.sigma_h2);
    hop.h_rs_1 = chan.complex_gaussian(cfg.sigma_h2);

    const double tau_1 = open_uniform(offs, -0.5, 0.5);
    const double tau_2 = open_uniform(offs, -0.5, 0.5);
    const double nu_2 = open_uniform(offs, -0.5, 0.5);
    const double tau_relay = open_uniform(offs, -0.25, 0.25);
    const double nu_relay = open_uniform(offs, -0.25, 0.25);
    hop.tau_rs_1 = tau_relay;
    hop.tau_sr_1 = tau_1 - tau_relay;
    hop.tau_sr_2 = tau_2 - tau_relay;
    hop.nu_rs_1 = nu_relay;
    hop.nu_sr_1 = -nu_relay;
    hop.nu_sr_2 = nu_2 - nu_relay;
    return hop;
}

inline EstimationResult
estimate_offsets(const ExperimentConfig& cfg, MlCost& cost, int snr_index, int frame) {
    if (cfg.estimator == EstimatorKind::kDe) {
        DeConfig de = cfg.de;
        de.seed = derive_seed(cfg.seed, {kStreamDe, static_cast<std::uint64_t>(snr_index),
                                         static_cast<std::uint64_t>(frame)});
        return de_estimate(cost, cfg.grid.box, de);
    }
    if (!cfg.two_stage.enabled) return ml_grid_search(cost, cfg.grid);

    GridSpec coarse = cfg.grid;
    coarse.tau_step = cfg.two_stage.coarse_tau_step;
    coarse.nu_step = cfg.two_stage.coarse_nu_step;
    EstimationResult stage1 = ml_grid_search(cost, coarse);

    GridSpec refine = cfg.grid;
    refine.box.tau_lo = std::max(cfg.grid.box.tau_lo,
                                 std::min(stage1.tau_1, stage1.tau_2) -
                                     cfg.two_stage.refine_radius_tau);
    refine.box.tau_hi = std::min(cfg.grid.box.tau_hi,
                                 std::max(stage1.tau_1, stage1.tau_2) +
                                     cfg.two_stage.refine_radius_tau);
    refine.box.nu_lo =
        std::max(cfg.grid.box.nu_lo, stage1.nu_2 - cfg.two_stage.refine_radius_nu);
    refine.box.nu_hi =
        std::min(cfg.grid.box.nu_hi, stage1.nu_2 + cfg.two_stage.refine_radius_nu);
    EstimationResult stage2 = ml_grid_search(cost, refine);

    EstimationResult result = (stage2.cost <= stage1.cost) ? stage2 : stage1;
    result.evals = stage1.evals + stage2.evals;
    return result;
}

inline TrialRecord run_frame(const ExperimentConfig& cfg,
                             const std::pair<Eigen::VectorXcd, Eigen::VectorXcd>& training,
                             int snr_index, int frame) {
    const ModelGeometry geom = cfg.geometry();
    const NoiseModel noise = NoiseModel::from_snr_db(cfg.snr_db[static_cast<std::size_t>(snr_index)],
                                                     cfg.sigma_h2);
    TrialRecord rec;
    rec.snr_index = snr_index;
    rec.snr_db = cfg.snr_db[static_cast<std::size_t>(snr_index)];
    rec.frame = frame;
    rec.sub_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(snr_index),
                                          static_cast<std::uint64_t>(frame)});

    const HopParams hop = draw_hop(cfg, snr_index, frame);
    rec.truth = combine_params(hop, noise);

    const bool wants_estimate = cfg.experiment != ExperimentKind::kCrlbOnly;
    if (wants_estimate) {
        Rng tp_noise(derive_seed(cfg.seed, {kStreamNoiseTraining,
                                            static_cast<std::uint64_t>(snr_index),
                                            static_cast<std::uint64_t>(frame)}));
        const Eigen::VectorXcd y_tp = simulate_round(
            training.first, training.second, hop, noise,
            cfg.noiseless ? nullptr : &tp_noise, geom);

        OmegaBuilder omega(training.first, training.second, geom);
        MlCost cost(omega, y_tp);
        rec.estimate = estimate_offsets(cfg, cost, snr_index, frame);

        rec.sqerr_alpha_1 = std::norm(rec.estimate.alpha_1 - rec.truth.alpha_1);
        rec.sqerr_alpha_2 = std::norm(rec.estimate.alpha_2 - rec.truth.alpha_2);
        rec.sqerr_tau_1 = std::pow(rec.estimate.tau_1 - rec.truth.tau_1, 2);
        rec.sqerr_tau_2 = std::pow(rec.estimate.tau_2 - rec.truth.tau_2, 2);
        rec.sqerr_nu_2 = std::pow(rec.estimate.nu_2 - rec.truth.nu_2, 2);
    }

    {
        FimInputs fim;
        fim.params = rec.truth;
        fim.training_1 = training.first;
        fim.training_2 = training.second;
        fim.sigma_u2 = noise.sigma_u2;
        fim.geom = geom;
        const FimReport report = compute_crlb(fim);
        rec.crlb_alpha_1 = report.crlb_alpha_1;
        rec.crlb_alpha_2 = report.crlb_alpha_2;
        rec.crlb_tau_1 = report.crlb_tau_1;
        rec.crlb_tau_2 = report.crlb_tau_2;
        rec.crlb_nu_2 = report.crlb_nu_2;
    }

    if (cfg.experiment == ExperimentKind::kBer) {
        const Frame user1 = generate_data(
            cfg.data_length, derive_seed(cfg.seed, {kStreamDataUser1,
                                                    static_cast<std::uint64_t>(snr_index),
                                                    static_cast<std::uint64_t>(frame)}));
        const Frame user2 = generate_data(
            cfg.data_length, derive_seed(cfg.seed, {kStreamDataUser2,
                                                    static_cast<std::uint64_t>(snr_index),
                                                    static_cast<std::uint64_t>(frame)}));
        Rng dtp_noise(derive_seed(cfg.seed, {kStreamNoiseData,
                                             static_cast<std::uint64_t>(snr_index),
                                             static_cast<std::uint64_t>(frame)}));
        const Eigen::VectorXcd y_dtp = simulate_round(
            user1.data, user2.data, hop, noise, cfg.noiseless ? nullptr : &dtp_noise, geom);

        // Both receivers see the identical reception; only the parameter
        // knowledge differs.
        const Eigen::VectorXcd z_est = cancel_self_interference(
            y_dtp, user1.data, rec.estimate.alpha_1, rec.estimate.tau_1, geom);
        const DetectionResult det_est =
            mmse_detect(z_est, rec.estimate.alpha_2, rec.estimate.tau_2,
                        rec.estimate.nu_2, noise.sigma_u2, geom);
        const Eigen::VectorXcd z_bm = cancel_self_interference(
            y_dtp, user1.data, rec.truth.alpha_1, rec.truth.tau_1, geom);
        const DetectionResult det_bm = benchmark_detect(z_bm, rec.truth, noise.sigma_u2, geom);

        const auto est_errors = count_bit_errors(det_est.hard_bits, user2.data_bits);
        const auto bm_errors = count_bit_errors(det_bm.hard_bits, user2.data_bits);
        rec.bit_errors_est = est_errors.first;
        rec.bit_errors_benchmark = bm_errors.first;
        rec.bits_total = est_errors.second;
    }
    return rec;
}

/// Runs all frames of one SNR point, fanning out over worker threads. Each
/// frame owns derived streams, so the records are identical whatever the
/// thread count; aggregation happens afterwards in frame order.
inline std::vector<TrialRecord>
run_snr_point(const ExperimentConfig& cfg,
              const std::pair<Eigen::VectorXcd, Eigen::VectorXcd>& training, int snr_index) {
    std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.frames));
    int n_threads = cfg.threads > 0
                        ? cfg.threads
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_threads = std::min(n_threads, cfg.frames);

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const int frame = next.fetch_add(1);
            if (frame >= cfg.frames) break;
            try {
                records[static_cast<std::size_t>(frame)] =
                    run_frame(cfg, training, snr_index, frame);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const ConfigError& e) {
            throw ConfigError("snr index " + std::to_string(snr_index) + ": " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("snr index " + std::to_string(snr_index) + ": " + e.what());
        } catch (const std::exception& e) {
            throw NumericalError("snr index " + std::to_string(snr_index) + ": " + e.what());
        }
    }
    return records;
}

inline SnrSummary summarize(const ExperimentConfig& cfg,
                            const std::vector<TrialRecord>& records, int snr_index) {
    SnrSummary row;
    row.snr_db = cfg.snr_db[static_cast<std::size_t>(snr_index)];
    const double n = static_cast<double>(records.size());
    double se_a1 = 0, se_a2 = 0, se_t1 = 0, se_t2 = 0, se_n2 = 0;
    double cr_a1 = 0, cr_a2 = 0, cr_t1 = 0, cr_t2 = 0, cr_n2 = 0;
    std::size_t err_est = 0, err_bm = 0, bits = 0;
    for (const TrialRecord& r : records) {
        se_a1 += r.sqerr_alpha_1;
        se_a2 += r.sqerr_alpha_2;
        se_t1 += r.sqerr_tau_1;
        se_t2 += r.sqerr_tau_2;
        se_n2 += r.sqerr_nu_2;
        cr_a1 += r.crlb_alpha_1;
        cr_a2 += r.crlb_alpha_2;
        cr_t1 += r.crlb_tau_1;
        cr_t2 += r.crlb_tau_2;
        cr_n2 += r.crlb_nu_2;
        err_est += r.bit_errors_est;
        err_bm += r.bit_errors_benchmark;
        bits += r.bits_total;
        row.evals += r.estimate.evals;
    }
    row.mse_alpha_1 = se_a1 / n;
    row.mse_alpha_2 = se_a2 / n;
    row.mse_tau_1 = se_t1 / n;
    row.mse_tau_2 = se_t2 / n;
    row.mse_nu_2 = se_n2 / n;
    row.crlb_alpha_1 = cr_a1 / n;
    row.crlb_alpha_2 = cr_a2 / n;
    row.crlb_tau_1 = cr_t1 / n;
    row.crlb_tau_2 = cr_t2 / n;
    row.crlb_nu_2 = cr_n2 / n;
    if (bits > 0) {
        row.ber_est = static_cast<double>(err_est) / static_cast<double>(bits);
        row.ber_benchmark = static_cast<double>(err_bm) / static_cast<double>(bits);
    }
    return row;
}

inline CampaignSummary run_campaign(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto training = generate_training(
        cfg.training_length, derive_seed(cfg.seed, {kStreamTraining, 0, 0}), cfg.geometry());
    CampaignSummary summary;
    for (int s = 0; s < static_cast<int>(cfg.snr_db.size()); ++s) {
        std::vector<TrialRecord> records = run_snr_point(cfg, training, s);
        summary.rows.push_back(summarize(cfg, records, s));
        if (cfg.keep_trials)
            summary.trials.insert(summary.trials.end(), records.begin(), records.end());
    }
    return summary;
}

} // namespace detail

/// Estimation-accuracy campaign: per frame, draw impairments, simulate the
/// training reception, estimate, and record squared errors next to the
/// realized bounds.
inline CampaignSummary run_mse_campaign(const ExperimentConfig& cfg) {
    if (cfg.experiment != ExperimentKind::kMse)
        throw ConfigError("run_mse_campaign: config kind is not 'mse'");
    return detail::run_campaign(cfg);
}

/// Decoding campaign: additionally simulates the data period and detects it
/// twice, with estimated and with true parameters, on the same reception.
inline CampaignSummary run_ber_campaign(const ExperimentConfig& cfg) {
    if (cfg.experiment != ExperimentKind::kBer)
        throw ConfigError("run_ber_campaign: config kind is not 'ber'");
    return detail::run_campaign(cfg);
}

/// Bounds-only campaign: no estimation, just the realized per-frame bounds.
inline CampaignSummary run_crlb_campaign(const ExperimentConfig& cfg) {
    if (cfg.experiment != ExperimentKind::kCrlbOnly)
        throw ConfigError("run_crlb_campaign: config kind is not 'crlb-only'");
    return detail::run_campaign(cfg);
}

/// Pure arithmetic; no grid is ever executed.
inline ComplexityReport run_complexity_report(const ExperimentConfig& cfg) {
    if (cfg.experiment != ExperimentKind::kComplexity)
        throw ConfigError("run_complexity_report: config kind is not 'complexity'");
    cfg.validate();
    return count_complexity(cfg.grid, cfg.de, cfg.training_length, cfg.oversampling);
}

namespace detail {

/// Shortest exact decimal for a double; doubles survive the CSV round trip
/// bit-for-bit.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline const char* csv_header() {
    return "snr_db,mse_alpha1,mse_alpha2,mse_tau1,mse_tau2,mse_nu2,"
           "crlb_alpha1,crlb_alpha2,crlb_tau1,crlb_tau2,crlb_nu2,"
           "ber_est,ber_benchmark,evals";
}

/// Writes the per-SNR table (14 columns; inapplicable entries are nan).
inline void emit_csv(const CampaignSummary& summary, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv_header() << "\n";
    for (const SnrSummary& r : summary.rows) {
        out << detail::format_double(r.snr_db) << ','
            << detail::format_double(r.mse_alpha_1) << ','
            << detail::format_double(r.mse_alpha_2) << ','
            << detail::format_double(r.mse_tau_1) << ','
            << detail::format_double(r.mse_tau_2) << ','
            << detail::format_double(r.mse_nu_2) << ','
            << detail::format_double(r.crlb_alpha_1) << ','
            << detail::format_double(r.crlb_alpha_2) << ','
            << detail::format_double(r.crlb_tau_1) << ','
            << detail::format_double(r.crlb_tau_2) << ','
            << detail::format_double(r.crlb_nu_2) << ','
            << detail::format_double(r.ber_est) << ','
            << detail::format_double(r.ber_benchmark) << ','
            << r.evals << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Per-frame dump behind --keep-trials.
inline void emit_trials(const std::vector<TrialRecord>& trials, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "snr_db,frame,sub_seed,"
           "true_alpha1_re,true_alpha1_im,true_alpha2_re,true_alpha2_im,"
           "true_tau1,true_tau2,true_nu2,"
           "est_alpha1_re,est_alpha1_im,est_alpha2_re,est_alpha2_im,"
           "est_tau1,est_tau2,est_nu2,cost,evals,converged,"
           "sqerr_alpha1,sqerr_alpha2,sqerr_tau1,sqerr_tau2,sqerr_nu2,"
           "crlb_alpha1,crlb_alpha2,crlb_tau1,crlb_tau2,crlb_nu2,"
           "bit_errors_est,bit_errors_benchmark,bits_total\n";
    for (const TrialRecord& t : trials) {
        out << detail::format_double(t.snr_db) << ',' << t.frame << ',' << t.sub_seed << ','
            << detail::format_double(t.truth.alpha_1.real()) << ','
            << detail::format_double(t.truth.alpha_1.imag()) << ','
            << detail::format_double(t.truth.alpha_2.real()) << ','
            << detail::format_double(t.truth.alpha_2.imag()) << ','
            << detail::format_double(t.truth.tau_1) << ','
            << detail::format_double(t.truth.tau_2) << ','
            << detail::format_double(t.truth.nu_2) << ','
            << detail::format_double(t.estimate.alpha_1.real()) << ','
            << detail::format_double(t.estimate.alpha_1.imag()) << ','
            << detail::format_double(t.estimate.alpha_2.real()) << ','
            << detail::format_double(t.estimate.alpha_2.imag()) << ','
            << detail::format_double(t.estimate.tau_1) << ','
            << detail::format_double(t.estimate.tau_2) << ','
            << detail::format_double(t.estimate.nu_2) << ','
            << detail::format_double(t.estimate.cost) << ',' << t.estimate.evals << ','
            << (t.estimate.converged ? 1 : 0) << ','
            << detail::format_double(t.sqerr_alpha_1) << ','
            << detail::format_double(t.sqerr_alpha_2) << ','
            << detail::format_double(t.sqerr_tau_1) << ','
            << detail::format_double(t.sqerr_tau_2) << ','
            << detail::format_double(t.sqerr_nu_2) << ','
            << detail::format_double(t.crlb_alpha_1) << ','
            << detail::format_double(t.crlb_alpha_2) << ','
            << detail::format_double(t.crlb_tau_1) << ','
            << detail::format_double(t.crlb_tau_2) << ','
            << detail::format_double(t.crlb_nu_2) << ','
            << t.bit_errors_est << ',' << t.bit_errors_benchmark << ',' << t.bits_total
            << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Deterministic run description; feeding this file back as --config replays
/// the run bit-for-bit.
inline void emit_metadata(const ExperimentConfig& cfg, const std::string& path) {
    json j;
    j["tool"] = "twrn-sync";
    j["version"] = kVersion;
    j["rng_scheme"] =
        "mt19937_64 streams; sub-seed = splitmix64 chain over "
        "(master seed, purpose, snr_index, frame)";
    j["config"] = config_to_json(cfg);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

inline void emit_complexity(const ComplexityReport& rep, const std::string& path) {
    json j;
    j["grid_evals"] = rep.grid_evals;
    j["de_evals"] = rep.de_evals;
    j["flops_per_eval"] = rep.flops_per_eval;
    j["ml_total_flops"] = rep.ml_total_flops;
    j["de_total_flops"] = rep.de_total_flops;
    j["eval_ratio"] = rep.eval_ratio;
    j["flop_ratio"] = rep.flop_ratio;
    j["flop_formula"] = rep.flop_formula;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

struct RunOutputs {
    CampaignSummary summary;
    ComplexityReport complexity;
    bool has_complexity = false;
};

/// Runs the configured experiment and writes every output file into
/// cfg.out_dir: results.csv + metadata.json for campaigns (plus trials.csv
/// with --keep-trials), complexity.json + metadata.json for the complexity
/// report.
inline RunOutputs execute(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());

    RunOutputs out;
    const fs::path dir(cfg.out_dir);
    if (cfg.experiment == ExperimentKind::kComplexity) {
        out.complexity = run_complexity_report(cfg);
        out.has_complexity = true;
        emit_complexity(out.complexity, (dir / "complexity.json").string());
    } else {
        switch (cfg.experiment) {
            case ExperimentKind::kMse: out.summary = run_mse_campaign(cfg); break;
            case ExperimentKind::kBer: out.summary = run_ber_campaign(cfg); break;
            default: out.summary = run_crlb_campaign(cfg); break;
        }
        emit_csv(out.summary, (dir / "results.csv").string());
        if (cfg.keep_trials) emit_trials(out.summary.trials, (dir / "trials.csv").string());
    }
    emit_metadata(cfg, (dir / "metadata.json").string());
    return out;
}

} // namespace twrn
