// Command-line driver for the two-way relay synchronization testbed.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 I/O failure.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twrn/harness.hpp"
#include "twrn/version.hpp"

namespace {

void print_summary(const twrn::CampaignSummary& summary) {
    std::printf("%8s %12s %12s %12s %12s %10s %10s %12s\n", "snr_db", "mse_a1",
                "crlb_a1", "mse_nu2", "crlb_nu2", "ber_est", "ber_bm", "evals");
    for (const auto& r : summary.rows)
        std::printf("%8.2f %12.4e %12.4e %12.4e %12.4e %10.3e %10.3e %12llu\n", r.snr_db,
                    r.mse_alpha_1, r.crlb_alpha_1, r.mse_nu_2, r.crlb_nu_2, r.ber_est,
                    r.ber_benchmark, static_cast<unsigned long long>(r.evals));
}

void print_complexity(const twrn::ComplexityReport& rep) {
    std::printf("exhaustive grid evaluations : %llu\n",
                static_cast<unsigned long long>(rep.grid_evals));
    std::printf("DE evaluations (cap)        : %llu\n",
                static_cast<unsigned long long>(rep.de_evals));
    std::printf("flops per evaluation        : %.6g\n", rep.flops_per_eval);
    std::printf("grid total flops            : %.6g\n", rep.ml_total_flops);
    std::printf("DE total flops              : %.6g\n", rep.de_total_flops);
    std::printf("grid/DE operation ratio     : %.6g\n", rep.flop_ratio);
    std::printf("flop model: %s\n", rep.flop_formula.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("twrn-sync ") + twrn::kVersion +
                 " - synchronization and channel estimation testbed for "
                 "amplify-and-forward two-way relay links"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "run an experiment described by a config file");
    std::string config_path;
    std::string experiment, estimator, out_dir;
    std::vector<double> snr_db;
    int frames = 0;
    int threads = -1;
    std::uint64_t seed = 0;
    bool keep_trials = false;

    run->add_option("--config", config_path, "JSON config file (see README for the schema)");
    run->add_option("--experiment", experiment, "mse | ber | crlb-only | complexity");
    run->add_option("--snr", snr_db, "SNR points in dB (comma separated)")->delimiter(',');
    run->add_option("--frames", frames, "Monte Carlo frames per SNR point");
    run->add_option("--estimator", estimator, "ml | de");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    run->add_flag("--keep-trials", keep_trials, "also write per-frame trials.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        twrn::ExperimentConfig cfg;
        if (run->count("--config")) cfg = twrn::load_config_file(config_path);
        if (run->count("--experiment")) cfg.experiment = twrn::experiment_from_string(experiment);
        if (run->count("--snr")) cfg.snr_db = snr_db;
        if (run->count("--frames")) cfg.frames = frames;
        if (run->count("--estimator")) cfg.estimator = twrn::estimator_from_string(estimator);
        if (run->count("--seed")) cfg.seed = seed;
        if (run->count("--out")) cfg.out_dir = out_dir;
        if (run->count("--threads")) cfg.threads = threads;
        if (keep_trials) cfg.keep_trials = true;
        cfg.validate();

        const twrn::RunOutputs out = twrn::execute(cfg);
        if (out.has_complexity)
            print_complexity(out.complexity);
        else
            print_summary(out.summary);
        std::printf("outputs written to %s\n", cfg.out_dir.c_str());
        return 0;
    } catch (const twrn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const twrn::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const twrn::IoError& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
