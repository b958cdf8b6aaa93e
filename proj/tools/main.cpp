#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ebql/acceptance.hpp"
#include "ebql/config.hpp"
#include "ebql/csv.hpp"
#include "ebql/errors.hpp"
#include "ebql/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAcceptance = 2;
constexpr int kExitIo = 3;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int seeds = 0;
    long trials = 0;
    int jobs = 1;
};

ebql::ExperimentConfig resolve_config(const CliOptions& opts, ebql::ExperimentKind kind) {
    ebql::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = ebql::load_config(opts.config_path);
    cfg.kind = kind;
    if (opts.seed_set) cfg.master_seed = opts.seed;
    if (opts.seeds > 0) cfg.seeds = opts.seeds;
    if (opts.trials > 0) {
        cfg.trials = opts.trials;
        cfg.mc_trials = opts.trials;
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "key = value config file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "master seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--seeds", opts.seeds, "number of training seeds");
    cmd->add_option("--trials", opts.trials, "Monte Carlo trial count");
    cmd->add_option("--jobs", opts.jobs, "worker threads (results are jobs-independent)");
}

int run_estimate(const CliOptions& opts) {
    const auto cfg = resolve_config(opts, ebql::ExperimentKind::EstimatorStats);
    const auto stats = ebql::run_estimator_stats(cfg, opts.jobs);
    std::cout << "estimator=" << cfg.estimator << " n=" << cfg.n_samples
              << " trials=" << stats.trials << "\n"
              << "bias=" << ebql::csv_double(stats.bias)
              << " bias_se=" << ebql::csv_double(stats.bias_std_error) << "\n"
              << "variance=" << ebql::csv_double(stats.variance) << "\n"
              << "mse=" << ebql::csv_double(stats.mse)
              << " mse_se=" << ebql::csv_double(stats.mse_std_error) << "\n";
    if (!cfg.out_dir.empty() && !opts.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        ebql::CsvWriter w(std::filesystem::path(cfg.out_dir) / "estimate.csv",
                          {"estimator", "n", "trials", "bias", "bias_se", "variance", "mse",
                           "mse_se"});
        const std::string row[] = {cfg.estimator,
                                   std::to_string(cfg.n_samples),
                                   std::to_string(stats.trials),
                                   ebql::csv_double(stats.bias),
                                   ebql::csv_double(stats.bias_std_error),
                                   ebql::csv_double(stats.variance),
                                   ebql::csv_double(stats.mse),
                                   ebql::csv_double(stats.mse_std_error)};
        w.write_row(row);
        w.close();
    }
    return kExitOk;
}

int run_verify(const CliOptions& opts) {
    ebql::AcceptanceOptions acc;
    acc.jobs = opts.jobs;
    if (!opts.out_dir.empty()) acc.scratch_dir = opts.out_dir;
    const auto results = ebql::run_acceptance(acc, std::cout);
    return ebql::all_passed(results) ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-mean estimation and ensemble-bootstrapped Q-learning experiments"};
    app.require_subcommand(1);

    CliOptions opts;
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimator statistics");
    auto* mse_curve = app.add_subcommand("mse-curve", "MSE-vs-split and optimal-split figures");
    auto* split_sweep = app.add_subcommand("split-sweep", "optimal split across SNR values");
    auto* chain_train = app.add_subcommand("chain-train", "tabular agents on the meta chain");
    auto* bias_trace = app.add_subcommand("bias-trace", "per-episode value-bias traces");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    for (auto* cmd : {estimate, mse_curve, split_sweep, chain_train, bias_trace, verify})
        add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (estimate->parsed()) return run_estimate(opts);
        if (verify->parsed()) return run_verify(opts);

        const ebql::ExperimentKind kind =
            mse_curve->parsed()     ? ebql::ExperimentKind::MseCurve
            : split_sweep->parsed() ? ebql::ExperimentKind::SplitSweep
            : chain_train->parsed() ? ebql::ExperimentKind::ChainTrain
                                    : ebql::ExperimentKind::BiasTrace;
        const auto cfg = resolve_config(opts, kind);
        const std::filesystem::path out = cfg.out_dir;
        switch (kind) {
            case ebql::ExperimentKind::MseCurve:
                ebql::run_mse_figures(cfg, out, opts.jobs);
                break;
            case ebql::ExperimentKind::SplitSweep:
                ebql::run_split_sweep(cfg, out);
                break;
            case ebql::ExperimentKind::ChainTrain:
                ebql::run_chain_experiment(cfg, out, opts.jobs);
                break;
            default:
                ebql::run_bias_trace(cfg, out, opts.jobs);
                break;
        }
        std::cout << "wrote " << out.string() << "\n";
        return kExitOk;
    } catch (const ebql::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ebql::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
}
