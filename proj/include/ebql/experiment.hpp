#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ebql/config.hpp"
#include "ebql/mse.hpp"

namespace ebql {

// One training run: per-episode correct-action flags (greedy at A vs the
// true optimum of the sampled chain) and per-episode bias probes averaged
// over chains.
struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<int> chain;          // chain sampled per episode
    std::vector<std::uint8_t> correct;
    std::vector<double> bias;        // mean over chains of the A-state probe
};

struct ChainTrainData {
    // algorithm label -> one SeedRun per seed, in seed order
    std::map<std::string, std::vector<SeedRun>> runs;
};

// Trains every configured algorithm over all seeds. Deterministic given the
// config; seed-level parallelism does not change the result.
ChainTrainData train_chain_agents(const ExperimentConfig& config, int jobs);

// Mean of the last 10% of a per-episode series.
double terminal_window_mean(const std::vector<double>& series);
double terminal_window_rate(const std::vector<std::uint8_t>& series);

// Correct-action rate of a full run: fraction of episodes whose greedy
// action at A matched the sampled chain's optimum.
double overall_rate(const std::vector<std::uint8_t>& series);

// chain-train: per-seed CSVs plus an aggregate split by chain-mean sign.
void run_chain_experiment(const ExperimentConfig& config, const std::filesystem::path& out,
                          int jobs, const ChainTrainData* precomputed = nullptr);

// bias-trace: per-episode bias averaged over seeds and chains, per algorithm,
// plus a terminal-window summary.
void run_bias_trace(const ExperimentConfig& config, const std::filesystem::path& out,
                    int jobs, const ChainTrainData* precomputed = nullptr);

// MSE-vs-split-ratio curves and optimal-split-vs-gap curves, plus a plot
// script consuming the CSVs.
void run_mse_figures(const ExperimentConfig& config, const std::filesystem::path& out,
                     int jobs);

// SNR sweep of the optimal split point.
void run_split_sweep(const ExperimentConfig& config, const std::filesystem::path& out);

// Monte Carlo estimator statistics for the configured estimator kind.
McEstimatorStats run_estimator_stats(const ExperimentConfig& config, int jobs);

EstimatorKind estimator_kind_from_string(const std::string& s);

}  // namespace ebql
